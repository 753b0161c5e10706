#include "ellipsim/hydro_q.hpp"

#include "ellipsim/csv.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ellipsim {

void q_flux(std::span<const double> u, std::size_t axis, Closure closure, std::span<double> f)
{
    double const q = u[0];
    double const va = ratio(u[axis + 1], q);
    double const p = closure == Closure::maxwellian ? q : 0.0;
    f[0] = u[axis + 1];
    f[1] = u[1] * va;
    f[2] = u[2] * va;
    f[3] = u[3] * va;
    f[axis + 1] += p;
}

ConservedField make_qgrid(const Lattice& lattice)
{
    if (lattice.ntheta == 0) {
        throw std::invalid_argument("q grid needs ntheta > 0");
    }
    return ConservedField({lattice.nx, lattice.ny, lattice.ntheta}, kQComponents, {lattice.h, lattice.h, lattice.k()});
}

ConservedField q_initial(const Lattice& lattice, const Rect& support, double theta0)
{
    ConservedField q = make_qgrid(lattice);
    auto const it = std::size_t(std::floor(wrap_angle(theta0) / lattice.k() + 1e-9)) % lattice.ntheta;
    std::vector<std::size_t> cells;
    for (std::size_t j = 0; j < lattice.ny; ++j) {
        for (std::size_t i = 0; i < lattice.nx; ++i) {
            if (support.contains(lattice.center(i, j))) {
                cells.push_back(q.cell_index(i, j, it));
            }
        }
    }
    if (cells.empty()) {
        throw std::invalid_argument("initial support contains no cell centre");
    }
    double const value = 1.0 / (double(cells.size()) * q.cell_volume());
    for (std::size_t c : cells) {
        q.at(c, 0) = value;
    }
    apply_density_floor(q);
    return q;
}

QInteractionOperator::QInteractionOperator(const Lattice& lattice, const KernelTable& table)
    : cells_(lattice.nx * lattice.ny * lattice.ntheta),
      conv_(table, lattice.nx, lattice.ny, {KernelConvolver::fx, KernelConvolver::fy, KernelConvolver::torque})
{
    if (table.ntheta != lattice.ntheta) {
        throw std::invalid_argument("kernel table angle count does not match the lattice");
    }
}

void QInteractionOperator::apply(const ConservedField& q, QInteraction& out) const
{
    if (q.num_cells() != cells_) {
        throw std::invalid_argument("q field does not match the interaction lattice");
    }
    std::vector<double> density(cells_);
    for (std::size_t c = 0; c < cells_; ++c) {
        density[c] = q.at(c, 0);
    }
    std::vector<std::vector<double>> conv;
    conv_.apply(density, conv);
    out.ax = std::move(conv[0]);
    out.ay = std::move(conv[1]);
    out.alpha = std::move(conv[2]);
    for (std::size_t c = 0; c < cells_; ++c) {
        out.ax[c] = -out.ax[c];
        out.ay[c] = -out.ay[c];
        out.alpha[c] = -out.alpha[c];
    }
}

QInteraction q_interaction(const Lattice& lattice, const ConservedField& q, const KernelTable& table)
{
    QInteraction out;
    QInteractionOperator(lattice, table).apply(q, out);
    return out;
}

QSolver::QSolver(QProblem problem) : problem_(std::move(problem)), model_{problem_.closure}
{
    const Lattice& lat = problem_.lattice;
    if (lat.ntheta == 0) {
        throw std::invalid_argument("q solver needs ntheta > 0");
    }
    problem_.dyn.validate();
    if (problem_.interaction && problem_.potential.eps0 > 0.0) {
        KernelTable const table = build_kernel_table(lat, problem_.potential, problem_.dyn.m, problem_.dyn.I_c);
        inter_.emplace(lat, table);
    }
    std::size_t const plane = lat.spatial_cells();
    u_.resize(plane);
    gradV1_.resize(plane);
    g_.resize(plane * lat.ntheta);
    dV2_.resize(plane * lat.ntheta);
    std::vector<FlowSample> samples(plane);
    for (std::size_t j = 0; j < lat.ny; ++j) {
        for (std::size_t i = 0; i < lat.nx; ++i) {
            Vec2 const r = lat.center(i, j);
            samples[j * lat.nx + i] = problem_.flow.eval(r);
            u_[j * lat.nx + i] = samples[j * lat.nx + i].u;
            gradV1_[j * lat.nx + i] = problem_.ext.grad_V1(r);
        }
    }
    double const lambda = problem_.potential.lambda_shape;
    for (std::size_t t = 0; t < lat.ntheta; ++t) {
        double const th = lat.theta(t);
        for (std::size_t p = 0; p < plane; ++p) {
            g_[t * plane + p] = jeffery_g(th, samples[p], lambda);
            dV2_[t * plane + p] = problem_.ext.dV2(th);
        }
    }
}

double QSolver::stable_dt(const ConservedField& q, double dt_max) const { return cfl_dt(q, model_, dt_max); }

void QSolver::advance(ConservedField& q, double dt) const
{
    hyperbolic_step(q, model_, problem_.bc, dt);

    QInteraction acc;
    if (inter_) {
        inter_->apply(q, acc);
    }
    const DynamicsParams& d = problem_.dyn;
    double const rv = d.gamma + 0.5 * d.A * d.A;
    double const rw = d.gamma_bar + 0.5 * d.B * d.B;
    std::size_t const plane = problem_.lattice.spatial_cells();
    bool const has_inter = bool(inter_);
    implicit_source_step(
        q,
        [&](std::size_t c, std::span<const double> u, CellSource& s) {
            std::size_t const p = c % plane;
            double const dens = u[0];
            Vec2 f = d.gamma * u_[p] - gradV1_[p];
            double tq = d.gamma_bar * g_[c] - dV2_[c];
            if (has_inter) {
                f += Vec2{acc.ax[c], acc.ay[c]};
                tq += acc.alpha[c];
            }
            s.relax = {0.0, rv, rv, rw};
            s.forcing = {0.0, dens * f.x, dens * f.y, dens * tq};
        },
        dt);
    apply_density_floor(q);
}

std::size_t QSolver::run_to(ConservedField& q, double& t, double t_end, double dt_max) const
{
    std::size_t steps = 0;
    while (t < t_end) {
        double dt = stable_dt(q, dt_max);
        // avoid a sliver step at the end
        if (t + dt >= t_end || t_end - (t + dt) < 1e-9 * dt) {
            dt = t_end - t;
        }
        advance(q, dt);
        t = (t + dt >= t_end - 1e-12 * std::max(1.0, std::abs(t_end))) ? t_end : t + dt;
        ++steps;
    }
    return steps;
}

std::vector<double> q_marginal(const ConservedField& q)
{
    std::size_t const plane = q.extent(0) * q.extent(1);
    std::vector<double> rho(plane, 0.0);
    double const k = q.spacing(2);
    for (std::size_t t = 0; t < q.extent(2); ++t) {
        for (std::size_t p = 0; p < plane; ++p) {
            rho[p] += q.at(t * plane + p, 0) * k;
        }
    }
    return rho;
}

std::vector<double> q_angular(const ConservedField& q)
{
    std::size_t const plane = q.extent(0) * q.extent(1);
    double const area = q.spacing(0) * q.spacing(1);
    std::vector<double> a(q.extent(2), 0.0);
    for (std::size_t t = 0; t < q.extent(2); ++t) {
        for (std::size_t p = 0; p < plane; ++p) {
            a[t] += q.at(t * plane + p, 0) * area;
        }
    }
    return a;
}

void write_q_grid_csv(std::ostream& out, double t, const ConservedField& q)
{
    CsvWriter w(out, {"t", "ix", "iy", "itheta", "q", "qv1", "qv2", "qw"});
    for (std::size_t it = 0; it < q.extent(2); ++it) {
        for (std::size_t iy = 0; iy < q.extent(1); ++iy) {
            for (std::size_t ix = 0; ix < q.extent(0); ++ix) {
                auto u = q.cell(q.cell_index(ix, iy, it));
                w.row(t, ix, iy, it, u[0], u[1], u[2], u[3]);
            }
        }
    }
}

void write_q_marginal_csv(std::ostream& out, double t, const ConservedField& q)
{
    auto const rho = q_marginal(q);
    CsvWriter w(out, {"t", "ix", "iy", "rho"});
    for (std::size_t iy = 0; iy < q.extent(1); ++iy) {
        for (std::size_t ix = 0; ix < q.extent(0); ++ix) {
            w.row(t, ix, iy, rho[iy * q.extent(0) + ix]);
        }
    }
}

} // namespace ellipsim
