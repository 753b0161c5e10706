#pragma once

#include "ellipsim/geometry_potential.hpp"
#include "ellipsim/lattice.hpp"

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace ellipsim {

/// Pair-interaction weights on a lattice, tabulated by spatial offset
/// (di, dj) in [-s, s]^2 and angle indices (t, tb) of the two cells.
///
/// Entry (di, dj, t, tb) describes a source cell at r_bar = r + (di h, dj h)
/// with angle theta(tb), acting on a target at r with angle theta(t):
///   value  = U           * measure / m
///   fx, fy = grad_r U    * measure / m
///   torque = d_theta U   * measure / I_c
/// where measure is the quadrature weight of one source cell (h^2 k for
/// (x, y, theta) densities, h^2 for spatial densities). Offsets beyond the
/// cutoff are zero.
struct KernelTable {
    std::size_t s = 0;
    std::size_t ntheta = 0;
    double h = 1.0;
    double k = 1.0;
    /// angles cover [0, period); pi suffices since U is pi-periodic in both
    double period = kTwoPi;
    double measure = 1.0;
    std::vector<double> value;
    std::vector<double> fx;
    std::vector<double> fy;
    std::vector<double> torque;

    std::size_t width() const { return 2 * s + 1; }
    std::size_t size() const { return width() * width() * ntheta * ntheta; }
    std::size_t index(long di, long dj, std::size_t t, std::size_t tb) const
    {
        auto const w = width();
        return ((std::size_t(dj + long(s)) * w + std::size_t(di + long(s))) * ntheta + t) * ntheta + tb;
    }
    double angle(std::size_t t) const { return (double(t) + 0.5) * k; }
};

/// Tabulates the kernel for spacing h and ntheta angles with stencil radius
/// s = ceil(cutoff / h). A stencil of radius 0 holds only the self offset,
/// whose force vanishes; in that case interaction is effectively off.
KernelTable build_kernel_table(double h, std::size_t ntheta, const PotentialParams& potential, double m, double I_c,
                               double measure, double period = kTwoPi);

/// Table for a q lattice: angles of the lattice, measure h^2 k.
KernelTable build_kernel_table(const Lattice& lattice, const PotentialParams& potential, double m, double I_c);

/// Discrete convolution out_c(r, t) = sum_{d, tb} K_c(d, t, tb) density(r + d, tb)
/// over an nx x ny x ntheta lattice, with zero density outside the lattice.
/// Uses zero-padded FFTs (FFTW, estimate-mode plans, so results are
/// reproducible run to run) and folds the angle axis in half when ntheta is
/// even, since U is pi-periodic in both angles.
class KernelConvolver {
public:
    enum Component { value = 0, fx = 1, fy = 2, torque = 3 };

    KernelConvolver(const KernelTable& table, std::size_t nx, std::size_t ny, std::vector<Component> components);
    ~KernelConvolver();
    KernelConvolver(const KernelConvolver&) = delete;
    KernelConvolver& operator=(const KernelConvolver&) = delete;

    /// density has nx*ny*ntheta entries, layout x fastest then y then theta.
    /// out[c] receives the same layout for components()[c].
    void apply(std::span<const double> density, std::vector<std::vector<double>>& out) const;

    const std::vector<Component>& components() const { return components_; }

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::vector<Component> components_;
};

} // namespace ellipsim
