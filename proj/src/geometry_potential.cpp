#include "ellipsim/geometry_potential.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace ellipsim {

PotentialParams PotentialParams::make(double L, double D, double eps0)
{
    if (!(D > 0.0) || !(L >= D) || !std::isfinite(L)) {
        throw std::invalid_argument("potential: require L >= D > 0, got L=" + std::to_string(L) +
                                    " D=" + std::to_string(D));
    }
    if (!(eps0 >= 0.0) || !std::isfinite(eps0)) {
        throw std::invalid_argument("potential: eps0 must be finite and >= 0");
    }
    PotentialParams p;
    p.L = L;
    p.D = D;
    p.l = 2.0 * L;
    p.d = 2.0 * D;
    double const l2 = p.l * p.l;
    double const d2 = p.d * p.d;
    p.lambda_shape = (l2 - d2) / (l2 + d2);
    p.eps0 = eps0;
    return p;
}

Mat2 shape_matrix(double theta, const PotentialParams& p)
{
    Vec2 const eta = direction(theta);
    double const d2 = p.d * p.d;
    return (p.l * p.l - d2) * outer(eta, eta) + d2 * Mat2::identity();
}

double amplitude(double theta, double theta_bar, const PotentialParams& p)
{
    double const c = std::cos(theta - theta_bar);
    double const lc = p.lambda_shape * c;
    return p.eps0 / std::sqrt(1.0 - lc * lc);
}

namespace {

// Shared pieces of U and its derivatives for one pair.
struct Overlap {
    Vec2 w;       // (gamma(theta) + gamma(theta_bar))^{-1} (r_bar - r)
    double s = 0.0;
};

Overlap overlap(const Vec2& dr, double theta, double theta_bar, const PotentialParams& p)
{
    Mat2 const m = shape_matrix(theta, p) + shape_matrix(theta_bar, p);
    Overlap o;
    o.w = m.inverse() * dr;
    o.s = dot(dr, o.w);
    return o;
}

} // namespace

double potential(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar, const PotentialParams& p)
{
    Vec2 const dr = r_bar - r;
    Overlap const o = overlap(dr, theta, theta_bar, p);
    if (o.s >= 1.0) {
        return 0.0;
    }
    return amplitude(theta, theta_bar, p) * std::exp(-o.s / (1.0 - o.s));
}

PotentialEval potential_eval(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar,
                             const PotentialParams& p)
{
    PotentialEval out;
    Vec2 const dr = r_bar - r;
    Overlap const o = overlap(dr, theta, theta_bar, p);
    if (o.s >= 1.0 || p.eps0 == 0.0) {
        return out;
    }
    double const one_minus = 1.0 - o.s;
    double const f = std::exp(-o.s / one_minus);
    if (f == 0.0) {
        return out;
    }
    // f'(s) = -f / (1-s)^2
    double const dfds = -f / (one_minus * one_minus);

    double const delta = theta - theta_bar;
    double const c = std::cos(delta);
    double const sn = std::sin(delta);
    double const l2c2 = p.lambda_shape * p.lambda_shape * c * c;
    double const a = p.eps0 / std::sqrt(1.0 - l2c2);
    // da/dtheta = a lambda^2 c (dc/dtheta) / (1 - lambda^2 c^2), dc/dtheta = -sin(delta)
    double const da_dtheta = -a * p.lambda_shape * p.lambda_shape * c * sn / (1.0 - l2c2);

    out.value = a * f;
    // ds/dr = -2 w
    out.grad.grad_r = (-2.0 * a * dfds) * o.w;

    // ds/dtheta = -w^T gamma'(theta) w = -2 (l^2-d^2) (eta' . w)(eta . w)
    double const aniso = p.l * p.l - p.d * p.d;
    auto ds_dangle = [&](double ang) {
        Vec2 const eta = direction(ang);
        Vec2 const eta_p{-eta.y, eta.x};
        return -2.0 * aniso * dot(eta_p, o.w) * dot(eta, o.w);
    };
    out.grad.dtheta = da_dtheta * f + a * dfds * ds_dangle(theta);
    out.grad.dtheta_bar = -da_dtheta * f + a * dfds * ds_dangle(theta_bar);
    return out;
}

PotentialGrad potential_grad(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar,
                             const PotentialParams& p)
{
    return potential_eval(r, r_bar, theta, theta_bar, p).grad;
}

double cutoff_radius(const PotentialParams& p)
{
    return std::sqrt(2.0) * p.l;
}

} // namespace ellipsim
