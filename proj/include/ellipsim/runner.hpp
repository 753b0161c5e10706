#pragma once

#include "ellipsim/hydro_q.hpp"
#include "ellipsim/hydro_rho.hpp"
#include "ellipsim/scenario.hpp"
#include "ellipsim/stationary.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace ellipsim {

struct ManifestEntry {
    std::string file;
    std::string model;
    std::string quantity;
    std::string t;
    std::string schema;
};

struct RunReport {
    std::vector<ManifestEntry> files;
    double wall_seconds = 0.0;
};

// Model setup from a scenario, shared by the runner and the acceptance suite.
PotentialParams potential_of(const Scenario& s);
EnsembleSpec micro_spec(const Scenario& s, const FlowField& flow);
QProblem q_problem(const Scenario& s, const FlowField& flow, Closure closure);
/// Initial q with momenta q v0, q omega0 on the occupied cells.
ConservedField q_start(const Scenario& s, const Lattice& lat);
RhoProblem rho_problem(const Scenario& s, const FlowField& flow);
ConservedField rho_start(const Scenario& s, const Lattice& lat);

/// Error series of one q-maxwellian run against the stationary state.
struct DecaySeries {
    double noise = 0.0; // A = B
    std::vector<double> times;
    std::vector<double> errors;
    double lambda = 0.0;
};

struct StationaryStudy {
    StationaryState stationary;
    std::vector<DecaySeries> series;
};

/// Runs the q-maxwellian model from the scenario's initial data once per
/// entry of s.noise (A = B = noise), sampling the L2 distance to q_stat every
/// s.sample_dt up to s.T, and fits a decay rate to each series.
StationaryStudy stationary_study(const Scenario& s, const FlowField& flow);

/// Snapshot file name <prefix>_<quantity>_t<time>.csv.
std::string snapshot_name(ModelKind m, const std::string& quantity, double t);

/// Runs every model of a validated scenario and writes snapshots, angular
/// distributions, the stationary study (if configured), manifest.csv and
/// resolved_scenario into s.out. Progress goes to log.
RunReport run_scenario(const Scenario& s, std::ostream& log);

} // namespace ellipsim
