#pragma once

#include "ellipsim/particle_sim.hpp"

#include <cstddef>

namespace ellipsim {

/// Cell-centred (x, y[, theta]) lattice over a rectangle. Angles sit at cell
/// centres (t + 1/2) k with k = 2 pi / ntheta; ntheta == 0 means spatial only.
struct Lattice {
    Rect domain;
    double h = 1.0;
    std::size_t nx = 1;
    std::size_t ny = 1;
    std::size_t ntheta = 0;

    /// nx = width / h rounded; throws std::invalid_argument if h does not
    /// divide the domain to 1e-9 relative.
    static Lattice make(const Rect& domain, double h, std::size_t ntheta = 0);

    double k() const { return ntheta == 0 ? 1.0 : kTwoPi / double(ntheta); }
    double x(std::size_t i) const { return domain.xmin + (double(i) + 0.5) * h; }
    double y(std::size_t j) const { return domain.ymin + (double(j) + 0.5) * h; }
    double theta(std::size_t t) const { return (double(t) + 0.5) * k(); }
    Vec2 center(std::size_t i, std::size_t j) const { return {x(i), y(j)}; }
    std::size_t spatial_cells() const { return nx * ny; }
};

} // namespace ellipsim
