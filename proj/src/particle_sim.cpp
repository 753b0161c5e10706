#include "ellipsim/particle_sim.hpp"

#include "ellipsim/error.hpp"
#include "ellipsim/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace ellipsim {

double wrap_angle(double theta)
{
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) {
        t += kTwoPi;
    }
    if (t >= kTwoPi) {
        t = 0.0;
    }
    return t;
}

void DynamicsParams::validate() const
{
    if (!(m > 0.0) || !(I_c > 0.0)) {
        throw std::invalid_argument("dynamics: m and I_c must be positive");
    }
    if (!(gamma >= 0.0) || !(gamma_bar >= 0.0) || !(A >= 0.0) || !(B >= 0.0)) {
        throw std::invalid_argument("dynamics: gamma, gamma_bar, A, B must be >= 0");
    }
}

double ExternalPotentials::V2(double theta) const
{
    return v2 == Angular::sine ? std::sin(theta) : 0.0;
}

double ExternalPotentials::dV2(double theta) const
{
    return v2 == Angular::sine ? std::cos(theta) : 0.0;
}

GhostParticles wall_ghosts(const Rect& domain, const PotentialParams& potential)
{
    if (domain.width() < potential.l || domain.height() < potential.l) {
        throw std::invalid_argument("wall_ghosts: domain sides must be at least l");
    }
    double const spacing = 0.5 * potential.l;
    auto count = [&](double len) { return std::size_t(std::floor(len / spacing + 1e-9)) + 1; };
    std::size_t const nx = count(domain.width());
    std::size_t const ny = count(domain.height());

    GhostParticles g;
    for (double y : {domain.ymin, domain.ymax}) {
        for (std::size_t i = 0; i < nx; ++i) {
            g.r.push_back({domain.xmin + double(i) * spacing, y});
            g.theta.push_back(0.0);
        }
    }
    auto on_horizontal = [&](const Vec2& p) {
        for (std::size_t k = 0; k < 2 * nx; ++k) {
            if (std::abs(g.r[k].x - p.x) < 1e-12 && std::abs(g.r[k].y - p.y) < 1e-12) {
                return true;
            }
        }
        return false;
    };
    for (double x : {domain.xmin, domain.xmax}) {
        for (std::size_t j = 0; j < ny; ++j) {
            Vec2 const p{x, domain.ymin + double(j) * spacing};
            if (on_horizontal(p)) {
                continue;
            }
            g.r.push_back(p);
            g.theta.push_back(0.5 * kPi);
        }
    }
    return g;
}

std::vector<Acceleration> interaction_forces(std::span<const ParticleState> states, const PotentialParams& potential,
                                             double m, double I_c, const GhostParticles* ghosts)
{
    std::size_t const n = states.size();
    std::vector<Acceleration> acc(n);
    std::size_t const ng = ghosts != nullptr ? ghosts->size() : 0;
    if (n == 0 || potential.eps0 == 0.0 || (n == 1 && ng == 0)) {
        return acc;
    }
    std::size_t const total = n + ng;
    auto pos = [&](std::size_t i) { return i < n ? states[i].r : ghosts->r[i - n]; };
    auto ang = [&](std::size_t i) { return i < n ? states[i].theta : ghosts->theta[i - n]; };

    double const rc = cutoff_radius(potential);
    double const rc2 = rc * rc;

    double xmin = pos(0).x, xmax = xmin, ymin = pos(0).y, ymax = ymin;
    for (std::size_t i = 1; i < total; ++i) {
        Vec2 const p = pos(i);
        xmin = std::min(xmin, p.x);
        xmax = std::max(xmax, p.x);
        ymin = std::min(ymin, p.y);
        ymax = std::max(ymax, p.y);
    }
    // cells at least rc wide, so neighbors live in the 3x3 block; the cap
    // bounds memory if a particle has drifted far away
    double const extent = std::max(xmax - xmin, ymax - ymin);
    double const cell = std::max(rc, extent / 1024.0);
    auto const ncx = std::size_t((xmax - xmin) / cell) + 1;
    auto const ncy = std::size_t((ymax - ymin) / cell) + 1;
    auto cell_of = [&](const Vec2& p) {
        auto cx = std::min(std::size_t((p.x - xmin) / cell), ncx - 1);
        auto cy = std::min(std::size_t((p.y - ymin) / cell), ncy - 1);
        return cy * ncx + cx;
    };

    // counting sort; order within a cell follows particle index
    std::vector<std::size_t> start(ncx * ncy + 1, 0);
    std::vector<std::size_t> cell_index(total);
    for (std::size_t i = 0; i < total; ++i) {
        cell_index[i] = cell_of(pos(i));
        ++start[cell_index[i] + 1];
    }
    for (std::size_t c = 0; c < ncx * ncy; ++c) {
        start[c + 1] += start[c];
    }
    std::vector<std::size_t> order(total);
    {
        std::vector<std::size_t> fill(start.begin(), start.end() - 1);
        for (std::size_t i = 0; i < total; ++i) {
            order[fill[cell_index[i]]++] = i;
        }
    }

    double const force_scale = 1.0 / (m * double(n));
    double const torque_scale = 1.0 / (I_c * double(n));
    double const ghost_factor = ghosts != nullptr ? ghosts->strength_factor : 1.0;

    auto pair = [&](std::size_t i, std::size_t j) {
        bool const gi = i >= n;
        bool const gj = j >= n;
        if (gi && gj) {
            return;
        }
        Vec2 const ri = pos(i);
        Vec2 const rj = pos(j);
        if (norm2(rj - ri) >= rc2) {
            return;
        }
        PotentialGrad g = potential_grad(ri, rj, ang(i), ang(j), potential);
        if (gi || gj) {
            g.grad_r *= ghost_factor;
            g.dtheta *= ghost_factor;
            g.dtheta_bar *= ghost_factor;
        }
        if (!gi) {
            acc[i].a -= force_scale * g.grad_r;
            acc[i].alpha -= torque_scale * g.dtheta;
        }
        if (!gj) {
            acc[j].a += force_scale * g.grad_r;
            acc[j].alpha -= torque_scale * g.dtheta_bar;
        }
    };

    // half stencil: own cell plus E, NW, N, NE
    constexpr int kOffsets[4][2] = {{1, 0}, {-1, 1}, {0, 1}, {1, 1}};
    for (std::size_t cy = 0; cy < ncy; ++cy) {
        for (std::size_t cx = 0; cx < ncx; ++cx) {
            std::size_t const c = cy * ncx + cx;
            for (std::size_t a = start[c]; a < start[c + 1]; ++a) {
                std::size_t const i = order[a];
                for (std::size_t b = a + 1; b < start[c + 1]; ++b) {
                    pair(i, order[b]);
                }
                for (auto const& off : kOffsets) {
                    long const nxc = long(cx) + off[0];
                    long const nyc = long(cy) + off[1];
                    if (nxc < 0 || nxc >= long(ncx) || nyc >= long(ncy)) {
                        continue;
                    }
                    std::size_t const nc = std::size_t(nyc) * ncx + std::size_t(nxc);
                    for (std::size_t b = start[nc]; b < start[nc + 1]; ++b) {
                        pair(i, order[b]);
                    }
                }
            }
        }
    }
    return acc;
}

ParticleEnsemble::ParticleEnsemble(std::vector<ParticleState> states, CounterRng rng)
    : states_(std::move(states)), rng_(rng)
{
    if (states_.empty()) {
        throw std::invalid_argument("ensemble: need at least one particle");
    }
}

void step(ParticleEnsemble& ensemble, const MicroModel& model, double dt)
{
    if (!(dt > 0.0)) {
        throw std::invalid_argument("step: dt must be positive");
    }
    auto states = ensemble.states();
    const DynamicsParams& p = model.dyn;
    std::vector<Acceleration> inter;
    if (model.interaction) {
        inter = interaction_forces(states, model.potential, p.m, p.I_c,
                                   model.ghosts.empty() ? nullptr : &model.ghosts);
    }
    double const fric_v = 0.5 * p.A * p.A;
    double const fric_w = 0.5 * p.B * p.B;
    double const noise_v = p.A * std::sqrt(dt);
    double const noise_w = p.B * std::sqrt(dt);
    double const lambda = model.potential.lambda_shape;

    for (std::size_t i = 0; i < states.size(); ++i) {
        ParticleState& s = states[i];
        FlowSample const fs = model.flow.eval(s.r);
        Vec2 acc = p.gamma * (fs.u - s.v) - model.ext.grad_V1(s.r) - fric_v * s.v;
        double alpha = p.gamma_bar * (jeffery_g(s.theta, fs, lambda) - s.omega) - model.ext.dV2(s.theta) -
                       fric_w * s.omega;
        if (!inter.empty()) {
            acc += inter[i].a;
            alpha += inter[i].alpha;
        }
        s.v += dt * acc;
        s.omega += dt * alpha;
        if (p.A != 0.0) {
            s.v.x += noise_v * ensemble.normal();
            s.v.y += noise_v * ensemble.normal();
        }
        if (p.B != 0.0) {
            s.omega += noise_w * ensemble.normal();
        }
        s.r += dt * s.v;
        s.theta = wrap_angle(s.theta + dt * s.omega);

        if (!std::isfinite(s.r.x) || !std::isfinite(s.r.y) || !std::isfinite(s.v.x) || !std::isfinite(s.v.y) ||
            !std::isfinite(s.theta) || !std::isfinite(s.omega)) {
            std::ostringstream msg;
            msg << "particle " << i << " has non-finite state after step (dt=" << dt
                << "); reduce dt or check interaction strength";
            throw NumericalError(msg.str());
        }
    }
}

std::vector<ParticleState> sample_initial(std::size_t n, const InitialCondition& init, CounterRng& rng)
{
    std::vector<ParticleState> out(n);
    for (auto& s : out) {
        s.r.x = init.support.xmin + rng.uniform() * init.support.width();
        s.r.y = init.support.ymin + rng.uniform() * init.support.height();
        s.v = init.v;
        s.theta = wrap_angle(init.theta);
        s.omega = init.omega;
    }
    return out;
}

std::vector<Snapshot> run_realization(const EnsembleSpec& spec, std::size_t k)
{
    CounterRng rng(spec.seed, k);
    auto init = sample_initial(spec.n_particles, spec.init, rng);
    ParticleEnsemble ens(std::move(init), rng);

    std::vector<long long> snap_steps;
    snap_steps.reserve(spec.snapshot_times.size());
    for (double t : spec.snapshot_times) {
        snap_steps.push_back(std::llround(t / spec.dt));
    }
    std::vector<Snapshot> out;
    out.reserve(snap_steps.size());
    long long const last = snap_steps.empty() ? 0 : *std::max_element(snap_steps.begin(), snap_steps.end());
    std::size_t next = 0;
    for (long long it = 0;; ++it) {
        while (next < snap_steps.size() && snap_steps[next] == it) {
            auto st = ens.states();
            out.push_back({double(it) * spec.dt, {st.begin(), st.end()}});
            ++next;
        }
        if (it >= last) {
            break;
        }
        try {
            step(ens, spec.model, spec.dt);
        } catch (const NumericalError& e) {
            std::ostringstream msg;
            msg << "realization " << k << " at t=" << double(it) * spec.dt << ": " << e.what();
            throw NumericalError(msg.str());
        }
    }
    return out;
}

EnsembleResult run_ensemble(const EnsembleSpec& spec)
{
    if (spec.realizations == 0 || spec.n_particles == 0) {
        throw std::invalid_argument("run_ensemble: need at least one realization and one particle");
    }
    if (!std::is_sorted(spec.snapshot_times.begin(), spec.snapshot_times.end())) {
        throw std::invalid_argument("run_ensemble: snapshot times must be sorted");
    }
    spec.model.dyn.validate();
    EnsembleResult res;
    res.runs.resize(spec.realizations);
    parallel_for(spec.realizations, [&](std::size_t k) { res.runs[k] = run_realization(spec, k); });
    return res;
}

} // namespace ellipsim
