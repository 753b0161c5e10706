#pragma once

#include "ellipsim/vec2.hpp"

namespace ellipsim {

/// Ellipse geometry and soft-repulsion strength.
///
/// L and D are the semi-axis length and width; the potential is written in
/// terms of the full axes l = 2L, d = 2D and the shape factor
/// lambda = (l^2 - d^2) / (l^2 + d^2). Build through make(), which validates.
struct PotentialParams {
    double L = 0.0;
    double D = 0.0;
    double l = 0.0;
    double d = 0.0;
    double lambda_shape = 0.0;
    double eps0 = 0.0;

    /// Throws std::invalid_argument unless L >= D > 0 and eps0 >= 0.
    /// eps0 == 0 switches the interaction off entirely.
    static PotentialParams make(double L, double D, double eps0);

    PotentialParams with_strength(double eps) const { return make(L, D, eps); }
};

/// gamma(theta) = (l^2 - d^2) eta eta^T + d^2 I with eta = (cos, sin).
Mat2 shape_matrix(double theta, const PotentialParams& p);

/// a(theta, theta_bar) = eps0 (1 - lambda^2 (eta . eta_bar)^2)^(-1/2).
double amplitude(double theta, double theta_bar, const PotentialParams& p);

/// Compact-support Berne potential U(r, r_bar, theta, theta_bar).
/// Zero whenever the anisotropic overlap s >= 1.
double potential(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar, const PotentialParams& p);

/// Derivatives of U. grad_r is with respect to the first position; the
/// gradient with respect to r_bar is its negative. dtheta and dtheta_bar
/// are the derivatives with respect to the first and second angle.
struct PotentialGrad {
    Vec2 grad_r;
    double dtheta = 0.0;
    double dtheta_bar = 0.0;
};

PotentialGrad potential_grad(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar,
                             const PotentialParams& p);

/// Value and derivatives in one pass (the force kernels need both only in tests
/// and in table construction).
struct PotentialEval {
    double value = 0.0;
    PotentialGrad grad;
};

PotentialEval potential_eval(const Vec2& r, const Vec2& r_bar, double theta, double theta_bar,
                             const PotentialParams& p);

/// sqrt(2) l: the eigenvalues of gamma(theta) + gamma(theta_bar) never exceed
/// 2 l^2, so s >= |dr|^2 / (2 l^2) and U vanishes beyond this distance.
double cutoff_radius(const PotentialParams& p);

} // namespace ellipsim
