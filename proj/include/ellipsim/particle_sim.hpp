#pragma once

#include "ellipsim/flowfield.hpp"
#include "ellipsim/geometry_potential.hpp"
#include "ellipsim/rng.hpp"
#include "ellipsim/vec2.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace ellipsim {

inline constexpr double kTwoPi = 6.283185307179586476925286766559;
inline constexpr double kPi = 3.141592653589793238462643383280;

/// Wraps an angle into [0, 2 pi).
double wrap_angle(double theta);

struct Rect {
    double xmin = 0.0;
    double xmax = 1.0;
    double ymin = 0.0;
    double ymax = 1.0;

    double width() const { return xmax - xmin; }
    double height() const { return ymax - ymin; }
    double area() const { return width() * height(); }
    bool operator==(const Rect&) const = default;
    bool contains(const Vec2& p) const { return p.x >= xmin && p.x <= xmax && p.y >= ymin && p.y <= ymax; }
    bool contains(const Rect& o) const
    {
        return o.xmin >= xmin && o.xmax <= xmax && o.ymin >= ymin && o.ymax <= ymax;
    }
};

struct ParticleState {
    Vec2 r;
    Vec2 v;
    double theta = 0.0;
    double omega = 0.0;
};

struct DynamicsParams {
    double gamma = 0.0;
    double gamma_bar = 0.0;
    double m = 1.0;
    double I_c = 1.0;
    double A = 0.0;
    double B = 0.0;

    /// Throws std::invalid_argument unless m, I_c > 0 and the rest >= 0.
    void validate() const;
};

/// Outer potentials from a fixed catalog: V1 in {0, |r|^2/2}, V2 in {0, sin theta}.
struct ExternalPotentials {
    enum class Spatial { zero, quadratic };
    enum class Angular { zero, sine };

    Spatial v1 = Spatial::zero;
    Angular v2 = Angular::zero;

    double V1(const Vec2& r) const { return v1 == Spatial::quadratic ? 0.5 * norm2(r) : 0.0; }
    Vec2 grad_V1(const Vec2& r) const { return v1 == Spatial::quadratic ? r : Vec2{}; }
    double V2(double theta) const;
    double dV2(double theta) const;
};

/// Fixed wall particles. They enter pair sums like real particles (same 1/N
/// prefactor) with the interaction strength multiplied by strength_factor.
struct GhostParticles {
    std::vector<Vec2> r;
    std::vector<double> theta;
    double strength_factor = 10.0;

    std::size_t size() const { return r.size(); }
    bool empty() const { return r.empty(); }
};

/// Ghosts spaced l/2 along every wall of domain, parallel to their wall
/// (theta = 0 on horizontal, pi/2 on vertical walls). Corners are kept once,
/// on the horizontal walls.
GhostParticles wall_ghosts(const Rect& domain, const PotentialParams& potential);

/// Translational and angular acceleration of one particle.
struct Acceleration {
    Vec2 a;
    double alpha = 0.0;
};

/// Pair-interaction accelerations -(1/m)(1/N) sum grad_r U and
/// -(1/I_c)(1/N) sum d_theta U, N = states.size(). Uses a cell list with
/// cell edge cutoff_radius; ghosts (may be null) are included in the sums.
std::vector<Acceleration> interaction_forces(std::span<const ParticleState> states, const PotentialParams& potential,
                                             double m, double I_c, const GhostParticles* ghosts = nullptr);

/// Everything that defines the right-hand side of the particle dynamics.
struct MicroModel {
    PotentialParams potential = PotentialParams::make(1.0, 1.0, 0.0);
    bool interaction = true;
    DynamicsParams dyn;
    ExternalPotentials ext;
    FlowField flow;
    GhostParticles ghosts;
};

class ParticleEnsemble {
public:
    ParticleEnsemble(std::vector<ParticleState> states, CounterRng rng);

    std::span<const ParticleState> states() const { return states_; }
    std::span<ParticleState> states() { return states_; }
    std::size_t size() const { return states_.size(); }
    const CounterRng& rng() const { return rng_; }

    double normal() { return normal_(rng_); }

private:
    std::vector<ParticleState> states_;
    CounterRng rng_;
    std::normal_distribution<double> normal_;
};

/// One kick-drift step. Kick: v and omega get relaxation, interaction, outer
/// potential and friction forces evaluated at the current positions, then the
/// Euler-Maruyama noise A sqrt(dt) xi. Drift: r and theta move with the new
/// velocities. Throws NumericalError on non-finite state.
void step(ParticleEnsemble& ensemble, const MicroModel& model, double dt);

struct InitialCondition {
    Rect support;
    double theta = 0.0;
    double omega = 0.0;
    Vec2 v;
};

/// N particles uniform in init.support with the given velocities and angle.
std::vector<ParticleState> sample_initial(std::size_t n, const InitialCondition& init, CounterRng& rng);

struct EnsembleSpec {
    MicroModel model;
    std::size_t n_particles = 1;
    InitialCondition init;
    double dt = 1e-3;
    std::vector<double> snapshot_times;
    std::uint64_t seed = 0;
    std::size_t realizations = 1;
};

struct Snapshot {
    double t = 0.0;
    std::vector<ParticleState> states;
};

/// Snapshots of every realization; runs[k][s] is realization k at snapshot s.
struct EnsembleResult {
    std::vector<std::vector<Snapshot>> runs;
};

/// Realization k uses CounterRng(seed, k). Snapshot times are rounded to the
/// nearest step. Independent realizations run in parallel; the result does not
/// depend on the thread count.
EnsembleResult run_ensemble(const EnsembleSpec& spec);

/// Single realization (used by run_ensemble).
std::vector<Snapshot> run_realization(const EnsembleSpec& spec, std::size_t k);

} // namespace ellipsim
