#pragma once

#include "ellipsim/flowfield.hpp"
#include "ellipsim/fv_core.hpp"
#include "ellipsim/kernel_table.hpp"
#include "ellipsim/lattice.hpp"
#include "ellipsim/particle_sim.hpp"

#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace ellipsim {

/// Velocity closure of the (x, y, theta) moment system. The Maxwellian one
/// has unit temperature in v and omega, so the pressure is q itself.
enum class Closure { maxwellian, monokinetic };

/// Components of a q field: (q, q v1, q v2, q w).
inline constexpr std::size_t kQComponents = 4;

/// Physical flux of (q, qv1, qv2, qw) along axis 0 (x), 1 (y) or 2 (theta).
void q_flux(std::span<const double> u, std::size_t axis, Closure closure, std::span<double> f);

struct QModel {
    Closure closure = Closure::monokinetic;

    std::size_t ncomp() const { return kQComponents; }
    void flux(std::size_t axis, std::span<const double> u, std::span<double> f) const { q_flux(u, axis, closure, f); }
    double wave_speed(std::size_t axis, std::span<const double> u) const
    {
        double const c = closure == Closure::maxwellian ? 1.0 : 0.0;
        return std::abs(ratio(u[axis + 1], u[0])) + c;
    }
    int normal_momentum(std::size_t axis) const { return int(axis) + 1; }
};

/// Zero field on the lattice (ntheta must be > 0).
ConservedField make_qgrid(const Lattice& lattice);

/// q = 1 / (count h^2 k) on the cells whose centres lie in support and whose
/// angle cell contains theta0; zero momenta. Total mass is exactly 1.
ConservedField q_initial(const Lattice& lattice, const Rect& support, double theta0);

/// Per-cell interaction accelerations a = -(1/m) sum grad_r U q h^2 k and
/// alpha = -(1/I_c) sum d_theta U q h^2 k, layout x, y, theta like the field.
struct QInteraction {
    std::vector<double> ax;
    std::vector<double> ay;
    std::vector<double> alpha;
};

/// Convolution of the q component with a precomputed table.
class QInteractionOperator {
public:
    QInteractionOperator(const Lattice& lattice, const KernelTable& table);
    void apply(const ConservedField& q, QInteraction& out) const;

private:
    std::size_t cells_;
    KernelConvolver conv_;
};

/// Convenience wrapper: builds the operator for one call.
QInteraction q_interaction(const Lattice& lattice, const ConservedField& q, const KernelTable& table);

/// Everything that defines a q run.
struct QProblem {
    Lattice lattice;
    Closure closure = Closure::monokinetic;
    DynamicsParams dyn;
    ExternalPotentials ext;
    FlowField flow;
    PotentialParams potential = PotentialParams::make(1.0, 1.0, 0.0);
    bool interaction = true;
    BoundarySpec bc;
};

/// Split stepper: FORCE sweeps x, y, theta, then an implicit source stage
/// with relaxation rates (gamma + A^2/2) and (gamma_bar + B^2/2) and forcing
/// q (gamma u - grad V1 + a) resp. q (gamma_bar g - V2' + alpha), the
/// interaction evaluated on the post-sweep density; finally the vacuum floor.
class QSolver {
public:
    explicit QSolver(QProblem problem);

    const QProblem& problem() const { return problem_; }
    const Lattice& lattice() const { return problem_.lattice; }

    double stable_dt(const ConservedField& q, double dt_max) const;
    void advance(ConservedField& q, double dt) const;
    /// Steps from t to t_end with CFL-chosen steps, landing exactly on t_end.
    /// Returns the number of steps.
    std::size_t run_to(ConservedField& q, double& t, double t_end, double dt_max) const;

private:
    QProblem problem_;
    QModel model_;
    std::optional<QInteractionOperator> inter_;
    // per spatial cell
    std::vector<Vec2> u_, gradV1_;
    // per (x, y, theta) cell
    std::vector<double> g_, dV2_;
};

/// Spatial density sum_theta q k, layout x fastest.
std::vector<double> q_marginal(const ConservedField& q);

/// Angular density sum_xy q h^2 per theta cell (integrates to 1 against k).
std::vector<double> q_angular(const ConservedField& q);

/// CSV: t,ix,iy,itheta,q,qv1,qv2,qw
void write_q_grid_csv(std::ostream& out, double t, const ConservedField& q);
/// CSV: t,ix,iy,rho
void write_q_marginal_csv(std::ostream& out, double t, const ConservedField& q);

} // namespace ellipsim
