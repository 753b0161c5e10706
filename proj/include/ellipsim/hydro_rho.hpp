#pragma once

#include "ellipsim/flowfield.hpp"
#include "ellipsim/fv_core.hpp"
#include "ellipsim/kernel_table.hpp"
#include "ellipsim/lattice.hpp"
#include "ellipsim/particle_sim.hpp"

#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

namespace ellipsim {

/// Components of a rho field: (rho, rho phi, rho v1, rho v2, rho w).
inline constexpr std::size_t kRhoComponents = 5;

/// Pressureless flux of (rho, rho phi, rho v1, rho v2, rho w) along axis 0 or 1.
void rho_flux(std::span<const double> u, std::size_t axis, std::span<double> f);

struct RhoModel {
    std::size_t ncomp() const { return kRhoComponents; }
    void flux(std::size_t axis, std::span<const double> u, std::span<double> f) const { rho_flux(u, axis, f); }
    double wave_speed(std::size_t axis, std::span<const double> u) const
    {
        return std::abs(ratio(u[axis + 2], u[0]));
    }
    int normal_momentum(std::size_t axis) const { return int(axis) + 2; }
};

ConservedField make_rhogrid(const Lattice& lattice);

/// rho = 1 / (count h^2) on cells whose centres lie in support, phi = phi0,
/// zero momenta. Mass is exactly 1.
ConservedField rho_initial(const Lattice& lattice, const Rect& support, double phi0);

/// phi of a cell; floored cells report 0.
inline double cell_phi(std::span<const double> u) { return ratio(u[1], u[0]); }

/// Layer of fixed wall cells around the lattice that only enter the
/// interaction sums: density 1/h^2, phi = 0 beyond the bottom and top walls,
/// pi/2 beyond the left and right ones, strength multiplied by strength_factor.
struct GhostCells {
    bool enabled = false;
    double strength_factor = 10.0;
};

/// Per-cell interaction terms evaluated with the current phi field:
///   K1 = (1/m) sum grad_r U(r, r_bar, phi(r), phi(r_bar)) rho(r_bar) h^2
///   K2 = (1/I_c) sum d_theta U(...) rho(r_bar) h^2
/// Kernel values come from the table by bilinear interpolation in both angles.
struct RhoKernels {
    std::vector<double> k1x;
    std::vector<double> k1y;
    std::vector<double> k2;
};

class RhoInteraction {
public:
    /// ntheta is the angular resolution of the interpolation table, which
    /// spans [0, pi).
    RhoInteraction(const Lattice& lattice, const PotentialParams& potential, double m, double I_c,
                   std::size_t ntheta = 60, GhostCells ghosts = {});

    /// rho and phi per spatial cell, x fastest.
    void apply(std::span<const double> rho, std::span<const double> phi, RhoKernels& out) const;
    void apply(const ConservedField& field, RhoKernels& out) const;

    const KernelTable& table() const { return table_; }

private:
    Lattice lattice_;
    KernelTable table_;
    GhostCells ghosts_;
};

struct RhoProblem {
    Lattice lattice;
    DynamicsParams dyn;
    ExternalPotentials ext;
    FlowField flow;
    PotentialParams potential = PotentialParams::make(1.0, 1.0, 0.0);
    bool interaction = true;
    BoundarySpec bc;
    GhostCells ghosts;
    std::size_t table_ntheta = 60;
};

/// Split stepper for the mono-kinetic rho system: FORCE sweeps in x and y,
/// then implicit relaxation of the momenta with explicit forcing
/// rho (gamma u - grad V1 - K1), rho (gamma_bar g(phi, u) - V2'(phi) - K2) and
/// the source rho w for rho phi; finally the vacuum floor.
class RhoSolver {
public:
    explicit RhoSolver(RhoProblem problem);

    const RhoProblem& problem() const { return problem_; }
    double stable_dt(const ConservedField& f, double dt_max) const { return cfl_dt(f, RhoModel{}, dt_max); }
    void advance(ConservedField& f, double dt) const;
    std::size_t run_to(ConservedField& f, double& t, double t_end, double dt_max) const;

private:
    RhoProblem problem_;
    std::optional<RhoInteraction> inter_;
    std::vector<FlowSample> flow_;
    std::vector<Vec2> gradV1_;
};

/// sigma1 = 2/(2 gamma - A^2), sigma2 = 2/(2 gamma_bar - B^2).
struct DiffusiveParams {
    double sigma1 = 1.0;
    double sigma2 = 1.0;

    /// Throws std::invalid_argument unless 2 gamma > A^2 and 2 gamma_bar > B^2.
    static DiffusiveParams make(const DynamicsParams& dyn);
};

/// Diffusive limit state: (rho, rho phi) on a spatial lattice.
inline constexpr std::size_t kDiffusiveComponents = 2;

ConservedField make_diffusive_grid(const Lattice& lattice);
ConservedField diffusive_initial(const Lattice& lattice, const Rect& support, double phi0);

/// Drift-only solver: rho and rho phi are transported by
/// w = sigma1 (gamma u - K1 - grad V1) with first-order upwind fluxes on
/// face-averaged w (reflective walls carry no flux, Neumann walls copy the
/// boundary cell), then rho phi += dt sigma2 rho (gamma_bar g - K2 - V2').
class DiffusiveSolver {
public:
    explicit DiffusiveSolver(RhoProblem problem);

    const DiffusiveParams& params() const { return sigma_; }
    double stable_dt(const ConservedField& f, double dt_max) const;
    void advance(ConservedField& f, double dt) const;
    std::size_t run_to(ConservedField& f, double& t, double t_end, double dt_max) const;

    /// Drift velocity per spatial cell for the current state.
    std::vector<Vec2> drift(const ConservedField& f, RhoKernels* kernels = nullptr) const;

private:
    RhoProblem problem_;
    DiffusiveParams sigma_;
    std::optional<RhoInteraction> inter_;
    std::vector<FlowSample> flow_;
    std::vector<Vec2> gradV1_;
};

/// CSV: t,ix,iy,rho,phi,v1,v2,w (the diffusive model reports zero v and w).
void write_rho_csv(std::ostream& out, double t, const ConservedField& f);

/// Density component per cell, x fastest.
std::vector<double> density_of(const ConservedField& f);

/// Angular histogram of a rho/phi field: mass rho h^2 of each cell deposited
/// in the bin of phi mod 2 pi; values are divided by the bin width.
std::vector<double> rho_angular(const ConservedField& f, std::size_t nbins);

} // namespace ellipsim
