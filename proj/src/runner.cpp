#include "ellipsim/runner.hpp"

#include "ellipsim/csv.hpp"
#include "ellipsim/hydro_q.hpp"
#include "ellipsim/hydro_rho.hpp"
#include "ellipsim/lattice.hpp"
#include "ellipsim/parallel.hpp"
#include "ellipsim/stationary.hpp"
#include "ellipsim/stats.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace ellipsim {

namespace fs = std::filesystem;

std::string snapshot_name(ModelKind m, const std::string& quantity, double t)
{
    return model_prefix(m) + "_" + quantity + "_t" + format_double(t) + ".csv";
}

PotentialParams potential_of(const Scenario& s) { return PotentialParams::make(s.L, s.D, s.eps0); }

EnsembleSpec micro_spec(const Scenario& s, const FlowField& flow)
{
    EnsembleSpec spec;
    spec.model.potential = potential_of(s);
    spec.model.interaction = s.micro_interaction;
    spec.model.dyn = s.dyn;
    spec.model.ext = s.ext;
    spec.model.flow = flow;
    if (s.wall_ghosts) {
        spec.model.ghosts = wall_ghosts(s.domain, spec.model.potential);
    }
    spec.n_particles = s.n_particles;
    spec.init = {s.support, s.theta0, s.omega0, s.v0};
    spec.dt = s.micro_dt;
    spec.snapshot_times = s.snapshots;
    spec.seed = s.seed;
    spec.realizations = s.realizations;
    return spec;
}

QProblem q_problem(const Scenario& s, const FlowField& flow, Closure closure)
{
    QProblem p;
    p.lattice = Lattice::make(s.domain, s.h, s.ntheta);
    p.closure = closure;
    p.dyn = s.dyn;
    p.ext = s.ext;
    p.flow = flow;
    p.potential = potential_of(s);
    p.interaction = s.pde_interaction;
    p.bc = BoundarySpec::spatial(s.bc);
    return p;
}

ConservedField q_start(const Scenario& s, const Lattice& lat)
{
    ConservedField q = q_initial(lat, s.support, s.theta0);
    for (std::size_t c = 0; c < q.num_cells(); ++c) {
        double const d = q.at(c, 0);
        if (d > kDensityFloor) {
            q.at(c, 1) = d * s.v0.x;
            q.at(c, 2) = d * s.v0.y;
            q.at(c, 3) = d * s.omega0;
        }
    }
    return q;
}

RhoProblem rho_problem(const Scenario& s, const FlowField& flow)
{
    RhoProblem p;
    p.lattice = Lattice::make(s.domain, s.h, 0);
    p.dyn = s.dyn;
    p.ext = s.ext;
    p.flow = flow;
    p.potential = potential_of(s);
    p.interaction = s.pde_interaction;
    p.bc = BoundarySpec::spatial(s.bc);
    p.ghosts = {s.ghost_cells, 10.0};
    p.table_ntheta = s.table_ntheta;
    return p;
}

ConservedField rho_start(const Scenario& s, const Lattice& lat)
{
    ConservedField f = rho_initial(lat, s.support, s.theta0);
    for (std::size_t c = 0; c < f.num_cells(); ++c) {
        double const d = f.at(c, 0);
        if (d > kDensityFloor) {
            f.at(c, 2) = d * s.v0.x;
            f.at(c, 3) = d * s.v0.y;
            f.at(c, 4) = d * s.omega0;
        }
    }
    return f;
}

namespace {

constexpr const char* kParticlesSchema = "t;id;x;y;vx;vy;theta;omega";
constexpr const char* kHistSchema = "ix;iy;value";
constexpr const char* kAngularSchema = "itheta;value";
constexpr const char* kQGridSchema = "t;ix;iy;itheta;q;qv1;qv2;qw";
constexpr const char* kQRhoSchema = "t;ix;iy;rho";
constexpr const char* kRhoSchema = "t;ix;iy;rho;phi;v1;v2;w";
constexpr const char* kErrorSchema = "t;l2_error";
constexpr const char* kDecaySchema = "A;B;lambda";

class Writer {
public:
    Writer(const fs::path& dir, RunReport& report) : dir_(dir), report_(report) {}

    void emit(const std::string& file, ModelKind m, const std::string& quantity, const std::string& t,
              const char* schema, const std::function<void(std::ostream&)>& body)
    {
        fs::path const p = dir_ / file;
        std::ofstream out(p, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot open " + p.string() + " for writing");
        }
        body(out);
        out.flush();
        if (!out) {
            throw std::runtime_error("write failed for " + p.string());
        }
        report_.files.push_back({file, model_name(m), quantity, t, schema});
    }

    void snapshot(ModelKind m, const std::string& quantity, double t, const char* schema,
                  const std::function<void(std::ostream&)>& body)
    {
        emit(snapshot_name(m, quantity, t), m, quantity, format_double(t), schema, body);
    }

private:
    fs::path dir_;
    RunReport& report_;
};


void run_micro(const Scenario& s, const FlowField& flow, Writer& w, std::ostream& log)
{
    EnsembleSpec const spec = micro_spec(s, flow);
    log << "micro: " << s.n_particles << " particles x " << s.realizations << " realizations" << std::endl;
    EnsembleResult const res = run_ensemble(spec);

    HistGeometry const geom = HistGeometry::spatial(s.domain, s.hist_h);
    for (std::size_t k = 0; k < s.snapshots.size(); ++k) {
        double const t = s.snapshots[k];
        std::vector<std::vector<ParticleState>> stack;
        stack.reserve(res.runs.size());
        for (const auto& run : res.runs) {
            stack.push_back(run[k].states);
        }
        w.snapshot(ModelKind::micro, "particles", t, kParticlesSchema,
                   [&](std::ostream& o) { write_particles_csv(o, t, stack); });
        DensityHistogram const hist = histogram(std::span<const std::vector<ParticleState>>(stack), geom, s.outside);
        w.snapshot(ModelKind::micro, "hist", t, kHistSchema, [&](std::ostream& o) { write_histogram_csv(o, hist); });
        DensityHistogram const sm = smooth(hist, s.bandwidth);
        w.snapshot(ModelKind::micro, "smoothhist", t, kHistSchema,
                   [&](std::ostream& o) { write_histogram_csv(o, sm); });
        DensityHistogram const ang =
            angular_distribution(std::span<const std::vector<ParticleState>>(stack), s.angular_bins);
        w.snapshot(ModelKind::micro, "angular", t, kAngularSchema,
                   [&](std::ostream& o) { write_histogram_csv(o, ang); });
    }
}

void run_q(const Scenario& s, const FlowField& flow, ModelKind m, Writer& w, std::ostream& log)
{
    Closure const closure = m == ModelKind::q_maxwellian ? Closure::maxwellian : Closure::monokinetic;
    QSolver const solver(q_problem(s, flow, closure));
    const Lattice& lat = solver.lattice();
    ConservedField q = q_start(s, lat);
    log << model_name(m) << ": " << lat.nx << "x" << lat.ny << "x" << lat.ntheta << " cells" << std::endl;
    double t = 0.0;
    HistGeometry const ag = HistGeometry::angular(lat.ntheta);
    for (double ts : s.snapshots) {
        solver.run_to(q, t, ts, s.pde_dt_max);
        w.snapshot(m, "grid", ts, kQGridSchema, [&](std::ostream& o) { write_q_grid_csv(o, ts, q); });
        w.snapshot(m, "rho", ts, kQRhoSchema, [&](std::ostream& o) { write_q_marginal_csv(o, ts, q); });
        DensityHistogram const ang = as_histogram(ag, q_angular(q));
        w.snapshot(m, "angular", ts, kAngularSchema, [&](std::ostream& o) { write_histogram_csv(o, ang); });
    }
}

void run_stationary_study(const Scenario& s, const FlowField& flow, Writer& w, std::ostream& log)
{
    ModelKind const m = ModelKind::q_maxwellian;
    Lattice const lat = Lattice::make(s.domain, s.h, s.ntheta);
    StationaryStudy const study = stationary_study(s, flow);
    const StationaryState& st = study.stationary;
    log << "stationary state: " << st.iterations << " iterations, change " << format_double(st.residual)
        << std::endl;
    w.emit(model_prefix(m) + "_stationary.csv", m, "stationary", "", kQGridSchema, [&](std::ostream& o) {
        ConservedField f = make_qgrid(lat);
        for (std::size_t c = 0; c < f.num_cells(); ++c) {
            f.at(c, 0) = st.q[c];
        }
        write_q_grid_csv(o, 0.0, f);
    });
    std::vector<DecayRow> rows;
    for (const auto& ser : study.series) {
        std::string const a = format_double(ser.noise);
        w.emit(model_prefix(m) + "_l2error_A" + a + ".csv", m, "l2error", "", kErrorSchema,
               [&](std::ostream& o) { write_error_series_csv(o, ser.times, ser.errors); });
        rows.push_back({ser.noise, ser.noise, ser.lambda});
        log << "A = B = " << a << ": decay rate " << format_double(ser.lambda) << std::endl;
    }
    w.emit(model_prefix(m) + "_decay.csv", m, "decay", "", kDecaySchema,
           [&](std::ostream& o) { write_decay_csv(o, rows); });
}

void run_rho(const Scenario& s, const FlowField& flow, Writer& w, std::ostream& log)
{
    RhoSolver const solver(rho_problem(s, flow));
    const Lattice& lat = solver.problem().lattice;
    ConservedField f = rho_start(s, lat);
    log << "rho: " << lat.nx << "x" << lat.ny << " cells" << std::endl;
    double t = 0.0;
    HistGeometry const ag = HistGeometry::angular(s.angular_bins);
    for (double ts : s.snapshots) {
        solver.run_to(f, t, ts, s.pde_dt_max);
        w.snapshot(ModelKind::rho, "grid", ts, kRhoSchema, [&](std::ostream& o) { write_rho_csv(o, ts, f); });
        DensityHistogram const ang = as_histogram(ag, rho_angular(f, s.angular_bins));
        w.snapshot(ModelKind::rho, "angular", ts, kAngularSchema,
                   [&](std::ostream& o) { write_histogram_csv(o, ang); });
    }
}

void run_diffusive(const Scenario& s, const FlowField& flow, Writer& w, std::ostream& log)
{
    DiffusiveSolver const solver(rho_problem(s, flow));
    Lattice const lat = Lattice::make(s.domain, s.h, 0);
    ConservedField f = diffusive_initial(lat, s.support, s.theta0);
    log << "diffusive: " << lat.nx << "x" << lat.ny << " cells, sigma1 " << format_double(solver.params().sigma1)
        << std::endl;
    double t = 0.0;
    HistGeometry const ag = HistGeometry::angular(s.angular_bins);
    for (double ts : s.snapshots) {
        solver.run_to(f, t, ts, s.pde_dt_max);
        w.snapshot(ModelKind::diffusive, "grid", ts, kRhoSchema, [&](std::ostream& o) { write_rho_csv(o, ts, f); });
        DensityHistogram const ang = as_histogram(ag, rho_angular(f, s.angular_bins));
        w.snapshot(ModelKind::diffusive, "angular", ts, kAngularSchema,
                   [&](std::ostream& o) { write_histogram_csv(o, ang); });
    }
}

} // namespace

StationaryStudy stationary_study(const Scenario& s, const FlowField& flow)
{
    QProblem const base = q_problem(s, flow, Closure::maxwellian);
    const Lattice& lat = base.lattice;
    StationaryStudy study;
    study.stationary = solve_stationary_q(lat, s.ext, base.potential, s.dyn.m);
    const std::vector<double>& ref = study.stationary.q;

    std::size_t const n_samples = std::size_t(std::llround(s.T / s.sample_dt));
    study.series.resize(s.noise.size());
    parallel_for(s.noise.size(), [&](std::size_t i) {
        DecaySeries& ser = study.series[i];
        ser.noise = s.noise[i];
        QProblem p = base;
        p.dyn.A = s.noise[i];
        p.dyn.B = s.noise[i];
        QSolver const solver(std::move(p));
        ConservedField q = q_start(s, lat);
        std::vector<double> dens(q.num_cells());
        auto error = [&] {
            for (std::size_t c = 0; c < dens.size(); ++c) {
                dens[c] = q.at(c, 0);
            }
            return l2_distance(lat, dens, ref);
        };
        double t = 0.0;
        ser.times.push_back(0.0);
        ser.errors.push_back(error());
        for (std::size_t k = 1; k <= n_samples; ++k) {
            double const target = std::min(s.T, double(k) * s.sample_dt);
            solver.run_to(q, t, target, s.pde_dt_max);
            ser.times.push_back(t);
            ser.errors.push_back(error());
        }
        ser.lambda = fit_decay_rate(ser.times, ser.errors);
    });
    return study;
}

RunReport run_scenario(const Scenario& s, std::ostream& log)
{
    auto const start = std::chrono::steady_clock::now();
    validate(s);
    FlowField const flow = s.flow.build();
    fs::path const dir(s.out);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) {
        throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
    }
    RunReport report;
    Writer w(dir, report);

    w.emit("resolved_scenario", ModelKind::micro, "scenario", "", "ini",
           [&](std::ostream& o) { write_scenario(o, s); });
    report.files.back().model = "";

    for (ModelKind m : s.models) {
        switch (m) {
        case ModelKind::micro: run_micro(s, flow, w, log); break;
        case ModelKind::q_maxwellian:
        case ModelKind::q_monokinetic: run_q(s, flow, m, w, log); break;
        case ModelKind::rho: run_rho(s, flow, w, log); break;
        case ModelKind::diffusive: run_diffusive(s, flow, w, log); break;
        }
        if (m == ModelKind::q_maxwellian && !s.noise.empty()) {
            run_stationary_study(s, flow, w, log);
        }
    }

    fs::path const manifest = dir / "manifest.csv";
    std::ofstream out(manifest, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot open " + manifest.string() + " for writing");
    }
    CsvWriter mw(out, {"file", "model", "quantity", "t", "schema", "schema_version"});
    for (const auto& e : report.files) {
        mw.row(e.file, e.model, e.quantity, e.t, e.schema, 1);
    }
    out.flush();
    if (!out) {
        throw std::runtime_error("write failed for " + manifest.string());
    }
    report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return report;
}

} // namespace ellipsim
