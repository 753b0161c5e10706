#pragma once

#include "ellipsim/vec2.hpp"

#include <cstddef>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace ellipsim {

/// Velocity, Jacobian jac(i,j) = du_i/dx_j and curl du_2/dx - du_1/dy at a point.
struct FlowSample {
    Vec2 u;
    Mat2 jac;
    double rot = 0.0;
};

namespace flow {

/// u = (-x, y)
struct TopBottom {};
/// u = (y, -x), clockwise
struct Rotational {};
struct Uniform {
    Vec2 c;
};

/// Node values on a regular nx x ny lattice, row-major (y outer, x inner).
struct Gridded {
    std::size_t nx = 0;
    std::size_t ny = 0;
    double x0 = 0.0;
    double y0 = 0.0;
    double dx = 1.0;
    double dy = 1.0;
    std::vector<double> u1;
    std::vector<double> u2;
};

} // namespace flow

/// Stationary prescribed fluid velocity. Immutable after construction.
class FlowField {
public:
    using Kind = std::variant<flow::TopBottom, flow::Rotational, flow::Uniform, flow::Gridded>;

    FlowField() : kind_(flow::Uniform{}) {}
    explicit FlowField(Kind kind);

    static FlowField top_bottom() { return FlowField(flow::TopBottom{}); }
    static FlowField rotational() { return FlowField(flow::Rotational{}); }
    static FlowField uniform(Vec2 c) { return FlowField(flow::Uniform{c}); }
    static FlowField zero() { return uniform({0.0, 0.0}); }

    const Kind& kind() const { return kind_; }
    bool is_gridded() const { return std::holds_alternative<flow::Gridded>(kind_); }

    FlowSample eval(const Vec2& r) const;

private:
    FlowSample eval_grid(const flow::Gridded& g, const Vec2& r) const;

    Kind kind_;
    // node Jacobians for gridded fields, same layout as the node arrays
    std::vector<Mat2> node_jac_;
};

inline FlowSample eval_field(const FlowField& field, const Vec2& r) { return field.eval(r); }

/// Preferred rotation rate of an ellipse with shape factor lambda:
/// g = rot/2 + lambda (-sin, cos) E (cos, sin)^T, E = (jac + jac^T)/2.
double jeffery_g(double theta, const FlowSample& sample, double lambda_shape);

class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

/// Text format: "nx ny x0 y0 dx dy" then nx*ny lines "u1 u2", y outer, x inner.
FlowField load_grid_field(std::istream& in);
FlowField load_grid_field_file(const std::string& path);
void write_grid_field(std::ostream& out, const flow::Gridded& g);

/// Divergence-free stand-in for a lid-driven cavity on [0, 1]^2: stream
/// function psi = G(x) y^2 (y - 1) with the lid profile
/// G(x) = exp(-(x - 1/2)^2 / 0.02) - c + 50 c ((x - 1/2)^2 - 1/4),
/// c = exp(-12.5). G and G' vanish at x = 0, 1, so u = 0 on the left,
/// right and bottom walls and u = (G(x), 0) on the lid. Sampled on
/// nodes x nodes points.
flow::Gridded cavity_standin(std::size_t nodes = 101);

/// Samples an arbitrary field on a lattice, e.g. to build a gridded stand-in.
template <class Fn>
flow::Gridded sample_grid(std::size_t nx, std::size_t ny, double x0, double y0, double dx, double dy, Fn&& fn)
{
    flow::Gridded g{nx, ny, x0, y0, dx, dy, {}, {}};
    g.u1.reserve(nx * ny);
    g.u2.reserve(nx * ny);
    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            Vec2 const u = fn(Vec2{x0 + double(i) * dx, y0 + double(j) * dy});
            g.u1.push_back(u.x);
            g.u2.push_back(u.y);
        }
    }
    return g;
}

} // namespace ellipsim
