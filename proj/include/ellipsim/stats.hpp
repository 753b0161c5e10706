#pragma once

#include "ellipsim/particle_sim.hpp"

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

namespace ellipsim {

/// Spatial bins over a rectangle (ny == 0 with nx bins means a 1D angle
/// histogram over [0, 2 pi)).
struct HistGeometry {
    Rect domain;
    std::size_t nx = 1;
    std::size_t ny = 1;

    static HistGeometry spatial(const Rect& domain, double h);
    static HistGeometry angular(std::size_t nbins);

    bool is_angular() const { return ny == 0; }
    std::size_t size() const { return is_angular() ? nx : nx * ny; }
    /// Bin area h^2 (spatial) or bin width (angular).
    double measure() const;
    bool operator==(const HistGeometry&) const = default;
};

/// Density per bin. Histograms of every sample (clamp policy) satisfy
/// sum value * measure = 1; with the drop policy the sum is the fraction of
/// samples inside the domain.
struct DensityHistogram {
    HistGeometry geom;
    std::vector<double> values;
    /// Samples that fell outside the domain and were clamped or dropped.
    std::size_t outside = 0;

    double mass() const;
};

/// What to do with samples outside the histogram domain.
enum class OutsidePolicy { clamp, drop };

DensityHistogram histogram(std::span<const ParticleState> particles, const HistGeometry& geom,
                           OutsidePolicy policy = OutsidePolicy::clamp);

/// Ensemble average of per-realization densities (each normalized first).
DensityHistogram histogram(std::span<const std::vector<ParticleState>> stack, const HistGeometry& geom,
                           OutsidePolicy policy = OutsidePolicy::clamp);

/// Separable discrete Gaussian smoothing with standard deviation bandwidth,
/// truncated at 4 bandwidths. Mass leaving the domain is reflected back
/// (angular histograms wrap), so the total mass is preserved.
DensityHistogram smooth(const DensityHistogram& hist, double bandwidth);

/// Histogram of particle angles in nbins bins over [0, 2 pi).
DensityHistogram angular_distribution(std::span<const ParticleState> particles, std::size_t nbins);
DensityHistogram angular_distribution(std::span<const std::vector<ParticleState>> stack, std::size_t nbins);

/// Wraps a per-bin density array (e.g. from a PDE field) as a histogram,
/// values taken as they are.
DensityHistogram as_histogram(const HistGeometry& geom, std::vector<double> values);

enum class Norm { L1, L2 };

/// (sum |a - b|^p measure)^(1/p); throws std::invalid_argument on mismatched geometry.
double field_distance(const DensityHistogram& a, const DensityHistogram& b, Norm norm);

/// Index of the largest bin (first one on ties).
std::size_t peak_bin(const DensityHistogram& h);

/// CSV: ix,iy,value (spatial) or itheta,value (angular)
void write_histogram_csv(std::ostream& out, const DensityHistogram& h);

/// CSV: t,id,x,y,vx,vy,theta,omega with id = k N + i over the realizations.
void write_particles_csv(std::ostream& out, double t, std::span<const std::vector<ParticleState>> stack);

} // namespace ellipsim
