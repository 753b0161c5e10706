#include "ellipsim/lattice.hpp"

#include <cmath>
#include <stdexcept>

namespace ellipsim {

Lattice Lattice::make(const Rect& domain, double h, std::size_t ntheta)
{
    if (!(h > 0.0) || !(domain.width() > 0.0) || !(domain.height() > 0.0)) {
        throw std::invalid_argument("lattice: need h > 0 and a non-empty domain");
    }
    double const fx = domain.width() / h;
    double const fy = domain.height() / h;
    auto const nx = std::llround(fx);
    auto const ny = std::llround(fy);
    if (nx < 1 || ny < 1 || std::abs(fx - double(nx)) > 1e-9 * fx || std::abs(fy - double(ny)) > 1e-9 * fy) {
        throw std::invalid_argument("lattice: spacing h must divide the domain");
    }
    return Lattice{domain, h, std::size_t(nx), std::size_t(ny), ntheta};
}

} // namespace ellipsim
