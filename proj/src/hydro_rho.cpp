#include "ellipsim/hydro_rho.hpp"

#include "ellipsim/csv.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ellipsim {

void rho_flux(std::span<const double> u, std::size_t axis, std::span<double> f)
{
    double const va = ratio(u[axis + 2], u[0]);
    for (std::size_t c = 0; c < kRhoComponents; ++c) {
        f[c] = u[c] * va;
    }
}

ConservedField make_rhogrid(const Lattice& lattice)
{
    return ConservedField({lattice.nx, lattice.ny, 0}, kRhoComponents, {lattice.h, lattice.h, 1.0});
}

namespace {

ConservedField fill_support(ConservedField f, const Lattice& lattice, const Rect& support, double phi0)
{
    std::vector<std::size_t> cells;
    for (std::size_t j = 0; j < lattice.ny; ++j) {
        for (std::size_t i = 0; i < lattice.nx; ++i) {
            if (support.contains(lattice.center(i, j))) {
                cells.push_back(f.cell_index(i, j));
            }
        }
    }
    if (cells.empty()) {
        throw std::invalid_argument("initial support contains no cell centre");
    }
    double const value = 1.0 / (double(cells.size()) * f.cell_volume());
    for (std::size_t c : cells) {
        f.at(c, 0) = value;
        f.at(c, 1) = value * phi0;
    }
    apply_density_floor(f);
    return f;
}

// Continuous angle index (table angles sit at (t + 1/2) k), wrapped to the
// table period.
struct AngleInterp {
    std::size_t t0 = 0;
    std::size_t t1 = 0;
    double w1 = 0.0;
};

AngleInterp angle_interp(double phi, const KernelTable& table)
{
    double p = std::fmod(wrap_angle(phi), table.period) / table.k - 0.5;
    double const fl = std::floor(p);
    long t0 = long(fl);
    double const w1 = p - fl;
    long const n = long(table.ntheta);
    t0 = ((t0 % n) + n) % n;
    return {std::size_t(t0), std::size_t((t0 + 1) % n), w1};
}

std::vector<FlowSample> sample_flow(const Lattice& lat, const FlowField& flow)
{
    std::vector<FlowSample> s(lat.spatial_cells());
    for (std::size_t j = 0; j < lat.ny; ++j) {
        for (std::size_t i = 0; i < lat.nx; ++i) {
            s[j * lat.nx + i] = flow.eval(lat.center(i, j));
        }
    }
    return s;
}

std::vector<Vec2> sample_gradV1(const Lattice& lat, const ExternalPotentials& ext)
{
    std::vector<Vec2> s(lat.spatial_cells());
    for (std::size_t j = 0; j < lat.ny; ++j) {
        for (std::size_t i = 0; i < lat.nx; ++i) {
            s[j * lat.nx + i] = ext.grad_V1(lat.center(i, j));
        }
    }
    return s;
}

} // namespace

ConservedField rho_initial(const Lattice& lattice, const Rect& support, double phi0)
{
    return fill_support(make_rhogrid(lattice), lattice, support, phi0);
}

RhoInteraction::RhoInteraction(const Lattice& lattice, const PotentialParams& potential, double m, double I_c,
                               std::size_t ntheta, GhostCells ghosts)
    : lattice_(lattice), table_(build_kernel_table(lattice.h, ntheta, potential, m, I_c, lattice.h * lattice.h, kPi)),
      ghosts_(ghosts)
{
}

void RhoInteraction::apply(const ConservedField& field, RhoKernels& out) const
{
    std::size_t const n = field.num_cells();
    std::vector<double> rho(n), phi(n);
    for (std::size_t c = 0; c < n; ++c) {
        rho[c] = field.at(c, 0);
        phi[c] = cell_phi(field.cell(c));
    }
    apply(rho, phi, out);
}

void RhoInteraction::apply(std::span<const double> rho, std::span<const double> phi, RhoKernels& out) const
{
    std::size_t const nx = lattice_.nx;
    std::size_t const ny = lattice_.ny;
    std::size_t const n = nx * ny;
    if (rho.size() != n || phi.size() != n) {
        throw std::invalid_argument("rho interaction: field size does not match the lattice");
    }
    out.k1x.assign(n, 0.0);
    out.k1y.assign(n, 0.0);
    out.k2.assign(n, 0.0);
    long const s = long(table_.s);
    if (s == 0) {
        return;
    }
    std::vector<AngleInterp> ang(n);
    for (std::size_t c = 0; c < n; ++c) {
        ang[c] = angle_interp(phi[c], table_);
    }
    AngleInterp const ghost_h = angle_interp(0.0, table_);
    AngleInterp const ghost_v = angle_interp(kPi / 2, table_);
    double const ghost_rho = 1.0 / (lattice_.h * lattice_.h);
    double const rc = table_.h * double(s) + 1e-12;
    std::size_t const nt = table_.ntheta;

    for (std::size_t j = 0; j < ny; ++j) {
        for (std::size_t i = 0; i < nx; ++i) {
            std::size_t const c = j * nx + i;
            AngleInterp const a = ang[c];
            double sx = 0.0, sy = 0.0, st = 0.0;
            for (long dj = -s; dj <= s; ++dj) {
                long const jj = long(j) + dj;
                for (long di = -s; di <= s; ++di) {
                    if (double(di * di + dj * dj) * table_.h * table_.h > rc * rc) {
                        continue;
                    }
                    long const ii = long(i) + di;
                    bool const inside = ii >= 0 && jj >= 0 && ii < long(nx) && jj < long(ny);
                    double weight = 0.0;
                    AngleInterp b;
                    if (inside) {
                        std::size_t const cb = std::size_t(jj) * nx + std::size_t(ii);
                        weight = rho[cb];
                        b = ang[cb];
                    } else if (ghosts_.enabled) {
                        weight = ghost_rho * ghosts_.strength_factor;
                        b = (jj < 0 || jj >= long(ny)) ? ghost_h : ghost_v;
                    } else {
                        continue;
                    }
                    if (weight == 0.0) {
                        continue;
                    }
                    std::size_t const base = table_.index(di, dj, 0, 0);
                    std::size_t const i00 = base + a.t0 * nt + b.t0;
                    std::size_t const i01 = base + a.t0 * nt + b.t1;
                    std::size_t const i10 = base + a.t1 * nt + b.t0;
                    std::size_t const i11 = base + a.t1 * nt + b.t1;
                    double const w00 = (1 - a.w1) * (1 - b.w1);
                    double const w01 = (1 - a.w1) * b.w1;
                    double const w10 = a.w1 * (1 - b.w1);
                    double const w11 = a.w1 * b.w1;
                    auto interp = [&](const std::vector<double>& tab) {
                        return w00 * tab[i00] + w01 * tab[i01] + w10 * tab[i10] + w11 * tab[i11];
                    };
                    sx += weight * interp(table_.fx);
                    sy += weight * interp(table_.fy);
                    st += weight * interp(table_.torque);
                }
            }
            out.k1x[c] = sx;
            out.k1y[c] = sy;
            out.k2[c] = st;
        }
    }
}

RhoSolver::RhoSolver(RhoProblem problem) : problem_(std::move(problem))
{
    problem_.dyn.validate();
    if (problem_.interaction && problem_.potential.eps0 > 0.0) {
        inter_.emplace(problem_.lattice, problem_.potential, problem_.dyn.m, problem_.dyn.I_c,
                       problem_.table_ntheta, problem_.ghosts);
    }
    flow_ = sample_flow(problem_.lattice, problem_.flow);
    gradV1_ = sample_gradV1(problem_.lattice, problem_.ext);
}

void RhoSolver::advance(ConservedField& f, double dt) const
{
    hyperbolic_step(f, RhoModel{}, problem_.bc, dt);
    RhoKernels k;
    if (inter_) {
        inter_->apply(f, k);
    }
    const DynamicsParams& d = problem_.dyn;
    double const rv = d.gamma + 0.5 * d.A * d.A;
    double const rw = d.gamma_bar + 0.5 * d.B * d.B;
    double const lambda = problem_.potential.lambda_shape;
    bool const has_inter = bool(inter_);
    implicit_source_step(
        f,
        [&](std::size_t c, std::span<const double> u, CellSource& s) {
            double const rho = u[0];
            double const phi = cell_phi(u);
            Vec2 acc = d.gamma * flow_[c].u - gradV1_[c];
            double tq = d.gamma_bar * jeffery_g(phi, flow_[c], lambda) - problem_.ext.dV2(phi);
            if (has_inter) {
                acc -= Vec2{k.k1x[c], k.k1y[c]};
                tq -= k.k2[c];
            }
            s.relax = {0.0, 0.0, rv, rv, rw};
            s.forcing = {0.0, u[4], rho * acc.x, rho * acc.y, rho * tq};
        },
        dt);
    apply_density_floor(f);
}

namespace {

template <class Solver>
std::size_t run_steps(const Solver& solver, ConservedField& f, double& t, double t_end, double dt_max)
{
    std::size_t steps = 0;
    while (t < t_end) {
        double dt = solver.stable_dt(f, dt_max);
        if (t + dt >= t_end || t_end - (t + dt) < 1e-9 * dt) {
            dt = t_end - t;
        }
        solver.advance(f, dt);
        t = (t + dt >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) ? t_end : t + dt;
        ++steps;
    }
    return steps;
}

} // namespace

std::size_t RhoSolver::run_to(ConservedField& f, double& t, double t_end, double dt_max) const
{
    return run_steps(*this, f, t, t_end, dt_max);
}

DiffusiveParams DiffusiveParams::make(const DynamicsParams& dyn)
{
    double const a = 2.0 * dyn.gamma - dyn.A * dyn.A;
    double const b = 2.0 * dyn.gamma_bar - dyn.B * dyn.B;
    if (!(a > 0.0) || !(b > 0.0)) {
        throw std::invalid_argument("diffusive limit needs 2 gamma > A^2 and 2 gamma_bar > B^2");
    }
    return {2.0 / a, 2.0 / b};
}

ConservedField make_diffusive_grid(const Lattice& lattice)
{
    return ConservedField({lattice.nx, lattice.ny, 0}, kDiffusiveComponents, {lattice.h, lattice.h, 1.0});
}

ConservedField diffusive_initial(const Lattice& lattice, const Rect& support, double phi0)
{
    return fill_support(make_diffusive_grid(lattice), lattice, support, phi0);
}

DiffusiveSolver::DiffusiveSolver(RhoProblem problem)
    : problem_(std::move(problem)), sigma_(DiffusiveParams::make(problem_.dyn))
{
    problem_.dyn.validate();
    if (problem_.interaction && problem_.potential.eps0 > 0.0) {
        inter_.emplace(problem_.lattice, problem_.potential, problem_.dyn.m, problem_.dyn.I_c,
                       problem_.table_ntheta, problem_.ghosts);
    }
    flow_ = sample_flow(problem_.lattice, problem_.flow);
    gradV1_ = sample_gradV1(problem_.lattice, problem_.ext);
}

std::vector<Vec2> DiffusiveSolver::drift(const ConservedField& f, RhoKernels* kernels) const
{
    RhoKernels local;
    RhoKernels& k = kernels ? *kernels : local;
    if (inter_) {
        inter_->apply(f, k);
    }
    std::size_t const n = f.num_cells();
    std::vector<Vec2> w(n);
    double const g = problem_.dyn.gamma;
    for (std::size_t c = 0; c < n; ++c) {
        Vec2 v = g * flow_[c].u - gradV1_[c];
        if (inter_) {
            v -= Vec2{k.k1x[c], k.k1y[c]};
        }
        w[c] = sigma_.sigma1 * v;
    }
    return w;
}

double DiffusiveSolver::stable_dt(const ConservedField& f, double dt_max) const
{
    auto const w = drift(f);
    double smax = 0.0;
    for (const Vec2& v : w) {
        smax = std::max({smax, std::abs(v.x), std::abs(v.y)});
    }
    if (smax <= 0.0) {
        return dt_max;
    }
    return std::min(dt_max, 0.5 * problem_.lattice.h / smax);
}

void DiffusiveSolver::advance(ConservedField& f, double dt) const
{
    RhoKernels k;
    auto const w = drift(f, &k);
    std::size_t const nx = f.extent(0);
    std::size_t const ny = f.extent(1);
    double const h = problem_.lattice.h;
    double smax = 0.0;
    for (std::size_t c = 0; c < w.size(); ++c) {
        smax = std::max({smax, std::abs(w[c].x), std::abs(w[c].y)});
    }
    if (smax * dt / h > 1.0) {
        throw NumericalError("CFL violation in diffusive drift: speed " + std::to_string(smax) + " * dt " +
                             std::to_string(dt) + " / spacing " + std::to_string(h) + " > 1");
    }

    ConservedField old = f;
    auto cell = [&](std::size_t i, std::size_t j) { return j * nx + i; };
    auto wcomp = [&](std::size_t c, std::size_t axis) { return axis == 0 ? w[c].x : w[c].y; };

    // face flux between cells a (low side) and b (high side)
    auto face = [&](std::size_t a, std::size_t b, std::size_t axis, double out[2]) {
        double const wf = 0.5 * (wcomp(a, axis) + wcomp(b, axis));
        std::size_t const up = wf > 0.0 ? a : b;
        out[0] = wf * old.at(up, 0);
        out[1] = wf * old.at(up, 1);
    };
    // boundary face of cell c
    auto wall = [&](std::size_t c, std::size_t axis, double out[2]) {
        out[0] = out[1] = 0.0;
        if (problem_.bc.axis[axis] != BoundaryKind::neumann) {
            return;
        }
        // ghost copies the boundary cell, so the face carries the cell's own drift
        double const wf = wcomp(c, axis);
        out[0] = wf * old.at(c, 0);
        out[1] = wf * old.at(c, 1);
    };

    double const r = dt / h;
    for (std::size_t axis = 0; axis < 2; ++axis) {
        std::size_t const n_along = axis == 0 ? nx : ny;
        std::size_t const n_lines = axis == 0 ? ny : nx;
        bool const periodic = problem_.bc.axis[axis] == BoundaryKind::periodic;
        std::vector<double> flux((n_along + 1) * 2);
        for (std::size_t l = 0; l < n_lines; ++l) {
            auto at = [&](std::size_t s) { return axis == 0 ? cell(s, l) : cell(l, s); };
            for (std::size_t s = 1; s < n_along; ++s) {
                face(at(s - 1), at(s), axis, &flux[s * 2]);
            }
            if (periodic) {
                face(at(n_along - 1), at(0), axis, &flux[0]);
                flux[n_along * 2] = flux[0];
                flux[n_along * 2 + 1] = flux[1];
            } else {
                wall(at(0), axis, &flux[0]);
                wall(at(n_along - 1), axis, &flux[n_along * 2]);
            }
            for (std::size_t s = 0; s < n_along; ++s) {
                std::size_t const c = at(s);
                f.at(c, 0) -= r * (flux[(s + 1) * 2] - flux[s * 2]);
                f.at(c, 1) -= r * (flux[(s + 1) * 2 + 1] - flux[s * 2 + 1]);
            }
        }
    }

    double const gb = problem_.dyn.gamma_bar;
    double const lambda = problem_.potential.lambda_shape;
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        double const rho = old.at(c, 0);
        if (rho <= kDensityFloor) {
            continue;
        }
        double const phi = cell_phi(old.cell(c));
        double src = gb * jeffery_g(phi, flow_[c], lambda) - problem_.ext.dV2(phi);
        if (inter_) {
            src -= k.k2[c];
        }
        f.at(c, 1) += dt * sigma_.sigma2 * rho * src;
    }
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        if (!std::isfinite(f.at(c, 0)) || !std::isfinite(f.at(c, 1))) {
            throw NumericalError("non-finite state in diffusive step at cell " + std::to_string(c));
        }
    }
    apply_density_floor(f);
}

std::size_t DiffusiveSolver::run_to(ConservedField& f, double& t, double t_end, double dt_max) const
{
    return run_steps(*this, f, t, t_end, dt_max);
}

void write_rho_csv(std::ostream& out, double t, const ConservedField& f)
{
    CsvWriter w(out, {"t", "ix", "iy", "rho", "phi", "v1", "v2", "w"});
    bool const full = f.ncomp() == kRhoComponents;
    for (std::size_t iy = 0; iy < f.extent(1); ++iy) {
        for (std::size_t ix = 0; ix < f.extent(0); ++ix) {
            auto u = f.cell(f.cell_index(ix, iy));
            double const rho = u[0];
            double const v1 = full ? ratio(u[2], rho) : 0.0;
            double const v2 = full ? ratio(u[3], rho) : 0.0;
            double const om = full ? ratio(u[4], rho) : 0.0;
            w.row(t, ix, iy, rho, cell_phi(u), v1, v2, om);
        }
    }
}

std::vector<double> density_of(const ConservedField& f)
{
    std::vector<double> d(f.num_cells());
    for (std::size_t c = 0; c < d.size(); ++c) {
        d[c] = f.at(c, 0);
    }
    return d;
}

std::vector<double> rho_angular(const ConservedField& f, std::size_t nbins)
{
    std::vector<double> a(nbins, 0.0);
    double const width = kTwoPi / double(nbins);
    double const area = f.spacing(0) * f.spacing(1);
    double total = 0.0;
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        double const rho = f.at(c, 0);
        if (rho <= kDensityFloor) {
            continue;
        }
        auto b = std::size_t(wrap_angle(cell_phi(f.cell(c))) / width);
        b = std::min(b, nbins - 1);
        a[b] += rho * area;
        total += rho * area;
    }
    if (total > 0.0) {
        for (double& v : a) {
            v /= total * width;
        }
    }
    return a;
}

} // namespace ellipsim
