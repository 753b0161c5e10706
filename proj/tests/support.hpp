#pragma once

#include "ellipsim/geometry_potential.hpp"
#include "ellipsim/particle_sim.hpp"

#include <array>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace testing {

using namespace ellipsim;

/// s = dr^T (gamma(theta) + gamma(theta_bar))^-1 dr, computed with a
/// hand-written 2x2 inverse so tests do not lean on the library's algebra.
inline double overlap(const Vec2& r, const Vec2& rb, double th, double thb, const PotentialParams& p)
{
    auto gam = [&](double t) {
        double const c = std::cos(t), s = std::sin(t), e = p.l * p.l - p.d * p.d, d2 = p.d * p.d;
        return std::array<double, 4>{e * c * c + d2, e * c * s, e * c * s, e * s * s + d2};
    };
    auto a = gam(th), b = gam(thb);
    double const m00 = a[0] + b[0], m01 = a[1] + b[1], m10 = a[2] + b[2], m11 = a[3] + b[3];
    double const det = m00 * m11 - m01 * m10;
    double const dx = rb.x - r.x, dy = rb.y - r.y;
    // adjugate / det
    return (dx * (m11 * dx - m01 * dy) + dy * (-m10 * dx + m00 * dy)) / det;
}

inline double amplitude_oracle(double th, double thb, const PotentialParams& p)
{
    double const dotp = std::cos(th) * std::cos(thb) + std::sin(th) * std::sin(thb);
    return p.eps0 / std::sqrt(1.0 - p.lambda_shape * p.lambda_shape * dotp * dotp);
}

inline double potential_oracle(const Vec2& r, const Vec2& rb, double th, double thb, const PotentialParams& p)
{
    double const s = overlap(r, rb, th, thb, p);
    if (s >= 1.0) {
        return 0.0;
    }
    return amplitude_oracle(th, thb, p) * std::exp(-s / (1.0 - s));
}

/// O(N^2) pair sums, straight from the equations of motion.
inline std::vector<Acceleration> direct_forces(const std::vector<ParticleState>& ps, const PotentialParams& pot,
                                               double m, double I_c)
{
    std::size_t const n = ps.size();
    std::vector<Acceleration> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) {
                continue;
            }
            auto const g = potential_grad(ps[i].r, ps[j].r, ps[i].theta, ps[j].theta, pot);
            out[i].a -= (1.0 / (m * double(n))) * g.grad_r;
            out[i].alpha -= g.dtheta / (I_c * double(n));
        }
    }
    return out;
}

inline std::vector<ParticleState> random_particles(std::size_t n, const Rect& box, std::mt19937_64& gen)
{
    std::uniform_real_distribution<double> ux(box.xmin, box.xmax), uy(box.ymin, box.ymax), ut(0.0, kTwoPi);
    std::vector<ParticleState> ps(n);
    for (auto& p : ps) {
        p.r = {ux(gen), uy(gen)};
        p.theta = ut(gen);
    }
    return ps;
}

inline std::filesystem::path scratch_dir(const std::string& name)
{
    std::filesystem::path const p = std::filesystem::path(ELLIPSIM_TEST_TMP) / name;
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

inline std::string slurp(const std::filesystem::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline std::string first_line(const std::filesystem::path& p)
{
    std::ifstream in(p);
    std::string line;
    std::getline(in, line);
    return line;
}

} // namespace testing
