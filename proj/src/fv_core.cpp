#include "ellipsim/fv_core.hpp"

#include <stdexcept>

namespace ellipsim {

ConservedField::ConservedField(std::array<std::size_t, 3> extents, std::size_t ncomp, std::array<double, 3> spacing)
    : extents_(extents), spacing_(spacing), ndim_(extents[2] == 0 ? 2 : 3), ncomp_(ncomp)
{
    if (extents_[2] == 0) {
        extents_[2] = 1;
        spacing_[2] = 1.0;
    }
    if (ncomp == 0 || ncomp > kMaxComponents) {
        throw std::invalid_argument("ConservedField: component count out of range");
    }
    for (std::size_t a = 0; a < ndim_; ++a) {
        if (extents_[a] == 0 || !(spacing_[a] > 0.0)) {
            throw std::invalid_argument("ConservedField: extents and spacings must be positive");
        }
    }
    data_.assign(num_cells() * ncomp_, 0.0);
}

double ConservedField::cell_volume() const
{
    double v = 1.0;
    for (std::size_t a = 0; a < ndim_; ++a) {
        v *= spacing_[a];
    }
    return v;
}

double ConservedField::total(std::size_t comp) const
{
    double s = 0.0;
    for (std::size_t c = 0; c < num_cells(); ++c) {
        s += at(c, comp);
    }
    return s * cell_volume();
}

bool ConservedField::same_geometry(const ConservedField& o) const
{
    return extents_ == o.extents_ && spacing_ == o.spacing_ && ndim_ == o.ndim_;
}

void apply_density_floor(ConservedField& field)
{
    std::size_t const nc = field.ncomp();
    for (std::size_t c = 0; c < field.num_cells(); ++c) {
        auto u = field.cell(c);
        if (u[0] < kDensityFloor) {
            u[0] = kDensityFloor;
            for (std::size_t k = 1; k < nc; ++k) {
                u[k] = 0.0;
            }
        }
    }
}

} // namespace ellipsim
