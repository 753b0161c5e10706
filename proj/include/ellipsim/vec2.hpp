#pragma once

#include <cmath>

namespace ellipsim {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2& operator+=(const Vec2& o) { x += o.x; y += o.y; return *this; }
    constexpr Vec2& operator-=(const Vec2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Vec2& operator*=(double s) { x *= s; y *= s; return *this; }

    friend constexpr Vec2 operator+(Vec2 a, const Vec2& b) { return a += b; }
    friend constexpr Vec2 operator-(Vec2 a, const Vec2& b) { return a -= b; }
    friend constexpr Vec2 operator-(const Vec2& a) { return {-a.x, -a.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return a *= s; }
    friend constexpr Vec2 operator*(Vec2 a, double s) { return a *= s; }
    friend constexpr bool operator==(const Vec2&, const Vec2&) = default;
};

constexpr double dot(const Vec2& a, const Vec2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Vec2& a, const Vec2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Vec2& a) { return std::hypot(a.x, a.y); }
constexpr double norm2(const Vec2& a) { return dot(a, a); }

/// Unit vector at angle theta, measured from the x axis.
inline Vec2 direction(double theta) { return {std::cos(theta), std::sin(theta)}; }

/// Row-major 2x2 matrix; m[i][j] in the usual sense, stored as (xx, xy, yx, yy).
struct Mat2 {
    double xx = 0.0, xy = 0.0;
    double yx = 0.0, yy = 0.0;

    static constexpr Mat2 identity() { return {1.0, 0.0, 0.0, 1.0}; }

    constexpr Mat2& operator+=(const Mat2& o) { xx += o.xx; xy += o.xy; yx += o.yx; yy += o.yy; return *this; }
    friend constexpr Mat2 operator+(Mat2 a, const Mat2& b) { return a += b; }
    friend constexpr Mat2 operator*(double s, const Mat2& a) { return {s * a.xx, s * a.xy, s * a.yx, s * a.yy}; }
    friend constexpr Vec2 operator*(const Mat2& a, const Vec2& v) {
        return {a.xx * v.x + a.xy * v.y, a.yx * v.x + a.yy * v.y};
    }
    friend constexpr bool operator==(const Mat2&, const Mat2&) = default;

    constexpr double det() const { return xx * yy - xy * yx; }
    constexpr double trace() const { return xx + yy; }
    constexpr Mat2 transpose() const { return {xx, yx, xy, yy}; }
    /// Adjugate over determinant; caller guarantees det() != 0.
    constexpr Mat2 inverse() const {
        double const inv = 1.0 / det();
        return {yy * inv, -xy * inv, -yx * inv, xx * inv};
    }
};

constexpr Mat2 outer(const Vec2& a, const Vec2& b) { return {a.x * b.x, a.x * b.y, a.y * b.x, a.y * b.y}; }

} // namespace ellipsim
