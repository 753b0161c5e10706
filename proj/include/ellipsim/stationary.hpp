#pragma once

#include "ellipsim/kernel_table.hpp"
#include "ellipsim/lattice.hpp"
#include "ellipsim/particle_sim.hpp"

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

namespace ellipsim {

/// Normalized stationary density on an (x, y, theta) lattice, x fastest.
struct StationaryState {
    std::vector<double> q;
    double Z = 1.0;
    std::size_t iterations = 0;
    double residual = 0.0;
};

struct StationaryOptions {
    double damping = 0.5;
    double tolerance = 1e-10;
    std::size_t max_iterations = 10000;
};

class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double residual) : std::runtime_error(what), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

/// Damped fixed point q <- (1 - a) q + a exp(-V1 - V2 - K[q]) / Z with
/// K[q](r, t) = (1/m) sum U(r, r_bar, theta_t, theta_tb) q h^2 k, starting
/// from the non-interacting Gibbs state. Stops once the L2 change is below
/// the tolerance; throws ConvergenceError otherwise.
StationaryState solve_stationary_q(const Lattice& lattice, const ExternalPotentials& ext,
                                   const PotentialParams& potential, double m, const StationaryOptions& opt = {});

/// The map q -> exp(-V1 - V2 - K[q]) / Z itself, for re-substitution checks.
std::vector<double> stationary_map(const Lattice& lattice, const ExternalPotentials& ext,
                                   const PotentialParams& potential, double m, std::span<const double> q,
                                   double* Z = nullptr);

/// L2 norm of a - b over an (x, y, theta) lattice (cell measure h^2 k).
double l2_distance(const Lattice& lattice, std::span<const double> a, std::span<const double> b);

struct FitWindow {
    double t_begin = 0.0;
    double t_end = 0.0;
};

/// Least-squares slope of log(error) against t, negated and clipped at 0.
/// Without a window the fit runs from the first sample up to the first time
/// the error falls below 1e-3 of its initial value. Throws
/// std::invalid_argument with fewer than 3 positive samples in the window.
double fit_decay_rate(std::span<const double> times, std::span<const double> errors,
                      std::optional<FitWindow> window = std::nullopt);

/// Number of strict interior local maxima.
std::size_t count_local_maxima(std::span<const double> series);

/// At least two strict interior local maxima.
bool is_oscillatory(std::span<const double> series);

/// CSV: t,l2_error
void write_error_series_csv(std::ostream& out, std::span<const double> times, std::span<const double> errors);

struct DecayRow {
    double A = 0.0;
    double B = 0.0;
    double lambda = 0.0;
};

/// CSV: A,B,lambda
void write_decay_csv(std::ostream& out, std::span<const DecayRow> rows);

} // namespace ellipsim
