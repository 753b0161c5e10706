#pragma once

#include "ellipsim/error.hpp"
#include "ellipsim/flowfield.hpp"
#include "ellipsim/fv_core.hpp"
#include "ellipsim/particle_sim.hpp"
#include "ellipsim/stats.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace ellipsim {

enum class ModelKind { micro, q_maxwellian, q_monokinetic, rho, diffusive };

/// Scenario spelling: micro, q-maxwellian, q-monokinetic, rho, diffusive.
std::string model_name(ModelKind m);
/// Output file prefix: micro, qmax, q, rho, diffusive.
std::string model_prefix(ModelKind m);
std::optional<ModelKind> parse_model(const std::string& s);

struct FlowSpec {
    /// top-bottom, rotational, uniform, zero, cavity (built-in stand-in) or file
    std::string kind = "zero";
    Vec2 uniform;
    std::string path;

    FlowField build() const;
};

/// A complete run description. Every field has a documented default; the
/// resolved values are echoed to the output directory.
struct Scenario {
    std::string name = "custom";
    std::vector<ModelKind> models{ModelKind::micro};
    double T = 1.0;
    std::vector<double> snapshots{1.0};
    std::uint64_t seed = 1;
    std::string out = "out";

    Rect domain{-1.5, 1.5, -1.5, 1.5};

    double L = 0.1;
    double D = 0.05;
    double eps0 = 1.0;

    DynamicsParams dyn{1.0, 1.0, 1.0, 0.001, 0.0, 0.0};
    ExternalPotentials ext;
    FlowSpec flow;

    // micro
    std::size_t n_particles = 1000;
    std::size_t realizations = 1;
    double micro_dt = 1e-3;
    bool micro_interaction = true;
    bool wall_ghosts = false;

    // PDE lattice
    double h = 0.05;
    std::size_t ntheta = 60;
    BoundaryKind bc = BoundaryKind::neumann;
    bool pde_interaction = true;
    bool ghost_cells = false;
    double pde_dt_max = 0.05; // binds only while the CFL speed is still near zero
    std::size_t table_ntheta = 60;

    // initial data
    Rect support{-1.0, 1.0, -1.0, 1.0};
    double theta0 = 0.0;
    double omega0 = 0.0;
    Vec2 v0;

    // stationary study (q-maxwellian only); empty noise list disables it
    std::vector<double> noise;
    double sample_dt = 0.1;

    // statistics
    double hist_h = 0.05;
    double bandwidth = 0.1;
    std::size_t angular_bins = 60;
    OutsidePolicy outside = OutsidePolicy::drop;

    bool has(ModelKind m) const;
    bool has_pde() const;
};

/// Built-in presets: stationary, top-bottom, rotational, cavity.
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

/// Reads an INI file on top of base (missing keys keep base values).
/// Throws ValidationError naming the key on malformed values.
Scenario load_scenario(const std::string& path, Scenario base = {});

/// Throws ValidationError naming the first offending field.
void validate(const Scenario& s);

/// INI text that load_scenario reads back to the same scenario.
void write_scenario(std::ostream& out, const Scenario& s);

} // namespace ellipsim
