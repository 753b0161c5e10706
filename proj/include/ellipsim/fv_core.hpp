#pragma once

#include "ellipsim/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace ellipsim {

/// Cells whose density falls below this are vacuum: density is reset to the
/// floor and every other component to zero.
inline constexpr double kDensityFloor = 1e-14;
inline constexpr std::size_t kMaxComponents = 8;

enum class BoundaryKind { neumann, periodic, reflective };

/// Per-axis boundary conditions for axes (x, y, theta). The theta axis, when
/// present, must be periodic.
struct BoundarySpec {
    std::array<BoundaryKind, 3> axis{BoundaryKind::neumann, BoundaryKind::neumann, BoundaryKind::periodic};

    static BoundarySpec spatial(BoundaryKind k) { return {{k, k, BoundaryKind::periodic}}; }
};

/// Cell averages of ncomp conserved quantities on an nx x ny (x ntheta) lattice.
/// Layout: components innermost, then x, then y, then theta.
class ConservedField {
public:
    ConservedField() = default;
    /// extents[2] == 0 means a 2D field; spacing[2] is then ignored.
    ConservedField(std::array<std::size_t, 3> extents, std::size_t ncomp, std::array<double, 3> spacing);

    std::size_t ndim() const { return ndim_; }
    std::size_t ncomp() const { return ncomp_; }
    std::size_t extent(std::size_t axis) const { return extents_[axis]; }
    double spacing(std::size_t axis) const { return spacing_[axis]; }
    std::size_t num_cells() const { return extents_[0] * extents_[1] * extents_[2]; }
    double cell_volume() const;

    std::size_t cell_index(std::size_t ix, std::size_t iy, std::size_t it = 0) const
    {
        return (it * extents_[1] + iy) * extents_[0] + ix;
    }
    std::span<double> cell(std::size_t c) { return {data_.data() + c * ncomp_, ncomp_}; }
    std::span<const double> cell(std::size_t c) const { return {data_.data() + c * ncomp_, ncomp_}; }
    double& at(std::size_t c, std::size_t comp) { return data_[c * ncomp_ + comp]; }
    double at(std::size_t c, std::size_t comp) const { return data_[c * ncomp_ + comp]; }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

    /// Sum of component comp times cell volume.
    double total(std::size_t comp = 0) const;
    bool same_geometry(const ConservedField& o) const;

private:
    std::array<std::size_t, 3> extents_{1, 1, 1};
    std::array<double, 3> spacing_{1.0, 1.0, 1.0};
    std::size_t ndim_ = 2;
    std::size_t ncomp_ = 0;
    std::vector<double> data_;
};

/// A hyperbolic system: flux per axis, a wave-speed bound per axis and the
/// component that holds the momentum normal to each axis (-1: none), which
/// reflective boundaries negate.
template <class M>
concept FluxModel = requires(const M& m, std::size_t axis, std::span<const double> u, std::span<double> f) {
    { m.ncomp() } -> std::convertible_to<std::size_t>;
    m.flux(axis, u, f);
    { m.wave_speed(axis, u) } -> std::convertible_to<double>;
    { m.normal_momentum(axis) } -> std::convertible_to<int>;
};

using StateBuf = std::array<double, kMaxComponents>;

/// FORCE flux: 1/4 [F(uL) + 2 F(u_LW) + F(uR) - (dx/dt)(uR - uL)],
/// u_LW = (uL + uR)/2 - dt/(2 dx) (F(uR) - F(uL)). flux_fn(u, f) fills f.
template <class FluxFn>
void force_flux(std::span<const double> uL, std::span<const double> uR, FluxFn&& flux_fn, double dt, double dx,
                std::span<double> out)
{
    std::size_t const n = uL.size();
    StateBuf fl{}, fr{}, ulw{}, flw{};
    flux_fn(uL, std::span<double>(fl.data(), n));
    flux_fn(uR, std::span<double>(fr.data(), n));
    double const r = dt / (2.0 * dx);
    for (std::size_t c = 0; c < n; ++c) {
        ulw[c] = 0.5 * (uL[c] + uR[c]) - r * (fr[c] - fl[c]);
    }
    flux_fn(std::span<const double>(ulw.data(), n), std::span<double>(flw.data(), n));
    double const lf = dx / dt;
    for (std::size_t c = 0; c < n; ++c) {
        out[c] = 0.25 * (fl[c] + 2.0 * flw[c] + fr[c] - lf * (uR[c] - uL[c]));
    }
}

inline const char* axis_name(std::size_t axis)
{
    static constexpr const char* names[3] = {"x", "y", "theta"};
    return names[axis];
}

/// Largest wave speed of model over field along axis.
template <FluxModel M>
double max_wave_speed(const ConservedField& field, const M& model, std::size_t axis)
{
    double s = 0.0;
    for (std::size_t c = 0; c < field.num_cells(); ++c) {
        s = std::max(s, double(model.wave_speed(axis, field.cell(c))));
    }
    return s;
}

/// dt = cfl * min(spacing) / max wave speed over all active axes, capped at dt_max.
template <FluxModel M>
double cfl_dt(const ConservedField& field, const M& model, double dt_max, double cfl = 0.5)
{
    double hmin = field.spacing(0);
    double smax = 0.0;
    for (std::size_t axis = 0; axis < field.ndim(); ++axis) {
        hmin = std::min(hmin, field.spacing(axis));
        smax = std::max(smax, max_wave_speed(field, model, axis));
    }
    if (smax <= 0.0) {
        return dt_max;
    }
    return std::min(dt_max, cfl * hmin / smax);
}

/// One conservative FORCE sweep along axis with one ghost cell per side.
template <FluxModel M>
void sweep(ConservedField& field, const M& model, BoundaryKind bc, std::size_t axis, double dt)
{
    std::size_t const n = field.extent(axis);
    if (n < 2) {
        return;
    }
    double const h = field.spacing(axis);
    double const speed = max_wave_speed(field, model, axis);
    if (speed * dt / h > 1.0) {
        throw NumericalError(std::string("CFL violation on axis ") + axis_name(axis) + ": speed " +
                             std::to_string(speed) + " * dt " + std::to_string(dt) + " / spacing " +
                             std::to_string(h) + " > 1");
    }
    std::size_t const nc = field.ncomp();
    std::size_t const nx = field.extent(0);
    std::size_t const ny = field.extent(1);
    std::size_t const stride = axis == 0 ? 1 : axis == 1 ? nx : nx * ny;
    int const normal = model.normal_momentum(axis);

    // lines are indexed by the two other axes
    std::size_t const n_lines = field.num_cells() / n;
    std::vector<double> line((n + 2) * nc);
    std::vector<double> flux((n + 1) * nc);
    auto flux_fn = [&](std::span<const double> u, std::span<double> f) { model.flux(axis, u, f); };
    double* data = field.data().data();

    for (std::size_t l = 0; l < n_lines; ++l) {
        std::size_t base = 0;
        if (axis == 0) {
            base = l * nx;
        } else if (axis == 1) {
            base = (l / nx) * nx * ny + (l % nx);
        } else {
            base = l;
        }
        for (std::size_t i = 0; i < n; ++i) {
            std::copy_n(data + (base + i * stride) * nc, nc, line.data() + (i + 1) * nc);
        }
        double* lo = line.data();
        double* hi = line.data() + (n + 1) * nc;
        const double* first = line.data() + nc;
        const double* lastc = line.data() + n * nc;
        switch (bc) {
        case BoundaryKind::periodic:
            std::copy_n(lastc, nc, lo);
            std::copy_n(first, nc, hi);
            break;
        case BoundaryKind::neumann:
            std::copy_n(first, nc, lo);
            std::copy_n(lastc, nc, hi);
            break;
        case BoundaryKind::reflective:
            std::copy_n(first, nc, lo);
            std::copy_n(lastc, nc, hi);
            if (normal >= 0) {
                lo[normal] = -lo[normal];
                hi[normal] = -hi[normal];
            }
            break;
        }
        for (std::size_t i = 0; i <= n; ++i) {
            std::span<const double> uL(line.data() + i * nc, nc);
            std::span<const double> uR(line.data() + (i + 1) * nc, nc);
            std::span<double> f(flux.data() + i * nc, nc);
            force_flux(uL, uR, flux_fn, dt, h, f);
            for (double v : f) {
                if (!std::isfinite(v)) {
                    throw NumericalError(std::string("non-finite FORCE flux on axis ") + axis_name(axis) +
                                         " at interface " + std::to_string(i) + " of line " + std::to_string(l));
                }
            }
        }
        double const r = dt / h;
        for (std::size_t i = 0; i < n; ++i) {
            double* u = data + (base + i * stride) * nc;
            const double* fm = flux.data() + i * nc;
            const double* fp = flux.data() + (i + 1) * nc;
            for (std::size_t c = 0; c < nc; ++c) {
                u[c] -= r * (fp[c] - fm[c]);
            }
        }
    }
}

/// Dimensionally split FORCE step, sweeping the axes in order (default x, y, theta).
template <FluxModel M>
void hyperbolic_step(ConservedField& field, const M& model, const BoundarySpec& bc, double dt,
                     std::array<std::size_t, 3> order = {0, 1, 2})
{
    if (field.ndim() == 3 && bc.axis[2] != BoundaryKind::periodic) {
        throw std::invalid_argument("hyperbolic_step: theta axis must be periodic");
    }
    for (std::size_t axis : order) {
        if (axis < field.ndim()) {
            sweep(field, model, bc.axis[axis], axis, dt);
        }
    }
}

/// Per-cell linear source du/dt = b - R u with diagonal R >= 0.
struct CellSource {
    StateBuf relax{};
    StateBuf forcing{};
};

/// Implicit Euler: (1 + dt R_c) u_c_new = u_c_old + dt b_c per component.
/// source_fn(cell_index, u, CellSource&) fills the rates and forcing.
template <class SourceFn>
void implicit_source_step(ConservedField& field, SourceFn&& source_fn, double dt)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("implicit_source_step: dt must be positive");
    }
    std::size_t const nc = field.ncomp();
    for (std::size_t c = 0; c < field.num_cells(); ++c) {
        auto u = field.cell(c);
        CellSource src;
        source_fn(c, std::span<const double>(u.data(), nc), src);
        for (std::size_t k = 0; k < nc; ++k) {
            double const denom = 1.0 + dt * src.relax[k];
            if (denom == 0.0 || !std::isfinite(denom)) {
                throw NumericalError("implicit_source_step: singular relaxation in cell " + std::to_string(c));
            }
            u[k] = (u[k] + dt * src.forcing[k]) / denom;
        }
    }
}

/// Resets cells with density below kDensityFloor to (floor, 0, ..., 0).
void apply_density_floor(ConservedField& field);

/// Velocity-like ratio m / density with vacuum cells reporting 0.
inline double ratio(double m, double density) { return density > kDensityFloor ? m / density : 0.0; }

} // namespace ellipsim
