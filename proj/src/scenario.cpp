#include "ellipsim/scenario.hpp"

#include "ellipsim/csv.hpp"
#include "ellipsim/lattice.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

namespace ellipsim {

namespace pt = boost::property_tree;

std::string model_name(ModelKind m)
{
    switch (m) {
    case ModelKind::micro: return "micro";
    case ModelKind::q_maxwellian: return "q-maxwellian";
    case ModelKind::q_monokinetic: return "q-monokinetic";
    case ModelKind::rho: return "rho";
    case ModelKind::diffusive: return "diffusive";
    }
    return "?";
}

std::string model_prefix(ModelKind m)
{
    switch (m) {
    case ModelKind::micro: return "micro";
    case ModelKind::q_maxwellian: return "qmax";
    case ModelKind::q_monokinetic: return "q";
    case ModelKind::rho: return "rho";
    case ModelKind::diffusive: return "diffusive";
    }
    return "?";
}

std::optional<ModelKind> parse_model(const std::string& s)
{
    for (auto m : {ModelKind::micro, ModelKind::q_maxwellian, ModelKind::q_monokinetic, ModelKind::rho,
                   ModelKind::diffusive}) {
        if (s == model_name(m)) {
            return m;
        }
    }
    return std::nullopt;
}

FlowField FlowSpec::build() const
{
    if (kind == "top-bottom") {
        return FlowField::top_bottom();
    }
    if (kind == "rotational") {
        return FlowField::rotational();
    }
    if (kind == "uniform") {
        return FlowField::uniform(uniform);
    }
    if (kind == "zero") {
        return FlowField::zero();
    }
    if (kind == "cavity") {
        return FlowField(cavity_standin());
    }
    if (kind == "file") {
        try {
            return load_grid_field_file(path);
        } catch (const std::exception& e) {
            throw ValidationError("flow.path", e.what());
        }
    }
    throw ValidationError("flow.kind", "unknown flow '" + kind + "'");
}

bool Scenario::has(ModelKind m) const { return std::find(models.begin(), models.end(), m) != models.end(); }

bool Scenario::has_pde() const
{
    return std::any_of(models.begin(), models.end(), [](ModelKind m) { return m != ModelKind::micro; });
}

std::vector<std::string> preset_names() { return {"stationary", "top-bottom", "rotational", "cavity"}; }

Scenario preset(const std::string& name)
{
    Scenario s;
    s.name = name;
    if (name == "stationary") {
        s.models = {ModelKind::micro, ModelKind::q_maxwellian};
        s.T = 20.0;
        s.snapshots = {5.0, 10.0, 20.0};
        s.domain = {-6.0, 6.0, -6.0, 6.0};
        s.L = 1.0;
        s.D = 0.5;
        s.eps0 = 1.0;
        s.dyn = {0.0, 0.0, 1.0, 1.0, 1.0, 1.0};
        s.ext = {ExternalPotentials::Spatial::quadratic, ExternalPotentials::Angular::sine};
        s.flow.kind = "zero";
        s.n_particles = 200;
        s.realizations = 16;
        s.h = 0.2;
        s.ntheta = 8;
        s.bc = BoundaryKind::reflective;
        s.pde_dt_max = 0.05;
        s.support = {1.5, 3.5, 1.5, 3.5};
        s.noise = {0.2, 1.0, 2.0, 5.0, 10.0};
        s.sample_dt = 0.1;
        s.hist_h = 0.2;
        s.bandwidth = 0.4;
        s.angular_bins = 8;
        return s;
    }
    if (name == "top-bottom") {
        s.models = {ModelKind::micro, ModelKind::q_monokinetic, ModelKind::rho, ModelKind::diffusive};
        s.T = 5.0;
        s.snapshots = {0.75, 1.5, 5.0};
        s.flow.kind = "top-bottom";
        s.realizations = 128;
        s.support = {-1.0, 1.0, -1.0, 1.0};
        s.theta0 = 0.0;
        return s;
    }
    if (name == "rotational") {
        s.models = {ModelKind::micro, ModelKind::q_monokinetic, ModelKind::rho};
        s.T = 3.0;
        s.snapshots = {1.5, 2.5, 3.0};
        s.flow.kind = "rotational";
        s.realizations = 128;
        s.h = 0.02;
        s.hist_h = 0.02;
        s.bandwidth = 0.04;
        s.support = {0.2, 0.7, -0.25, 0.25};
        s.theta0 = kPi / 2;
        return s;
    }
    if (name == "cavity") {
        s.models = {ModelKind::micro, ModelKind::rho};
        s.T = 5.0;
        s.snapshots = {2.0, 3.5, 5.0};
        s.domain = {0.0, 1.0, 0.0, 1.0};
        s.L = 0.05;
        s.D = 0.025;
        s.dyn = {10.0, 10.0, 1.0, 0.001, 0.0, 0.0};
        s.flow.kind = "cavity";
        s.realizations = 128;
        s.wall_ghosts = true;
        s.h = 0.01;
        s.bc = BoundaryKind::reflective;
        s.ghost_cells = true;
        s.hist_h = 0.01;
        s.bandwidth = 0.02;
        s.support = {0.4, 0.6, 0.4, 0.6};
        return s;
    }
    throw ValidationError("run.preset", "unknown preset '" + name + "'");
}

namespace {

std::string trim(std::string s)
{
    auto const b = s.find_first_not_of(" \t\r");
    auto const e = s.find_last_not_of(" \t\r");
    return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep)
{
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item = trim(item);
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

double to_double(const std::string& field, const std::string& v)
{
    double x = 0.0;
    auto const t = trim(v);
    auto const res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || !std::isfinite(x)) {
        throw ValidationError(field, "expected a finite number, got '" + v + "'");
    }
    return x;
}

std::uint64_t to_uint(const std::string& field, const std::string& v)
{
    std::uint64_t x = 0;
    auto const t = trim(v);
    auto const res = std::from_chars(t.data(), t.data() + t.size(), x);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size()) {
        throw ValidationError(field, "expected a non-negative integer, got '" + v + "'");
    }
    return x;
}

bool to_bool(const std::string& field, const std::string& v)
{
    auto const t = trim(v);
    if (t == "true" || t == "1" || t == "yes") {
        return true;
    }
    if (t == "false" || t == "0" || t == "no") {
        return false;
    }
    throw ValidationError(field, "expected true or false, got '" + v + "'");
}

std::vector<double> to_list(const std::string& field, const std::string& v)
{
    std::vector<double> out;
    for (const auto& item : split(v, ',')) {
        out.push_back(to_double(field, item));
    }
    return out;
}

Rect to_rect(const std::string& field, const std::string& v)
{
    auto const l = to_list(field, v);
    if (l.size() != 4) {
        throw ValidationError(field, "expected xmin,xmax,ymin,ymax");
    }
    return {l[0], l[1], l[2], l[3]};
}

BoundaryKind to_bc(const std::string& field, const std::string& v)
{
    auto const t = trim(v);
    if (t == "neumann") {
        return BoundaryKind::neumann;
    }
    if (t == "reflective") {
        return BoundaryKind::reflective;
    }
    if (t == "periodic") {
        return BoundaryKind::periodic;
    }
    throw ValidationError(field, "expected neumann, reflective or periodic, got '" + v + "'");
}

const char* bc_name(BoundaryKind b)
{
    switch (b) {
    case BoundaryKind::neumann: return "neumann";
    case BoundaryKind::reflective: return "reflective";
    case BoundaryKind::periodic: return "periodic";
    }
    return "?";
}

std::string join(const std::vector<double>& v)
{
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        s += (i ? "," : "") + format_double(v[i]);
    }
    return s;
}

std::string rect_str(const Rect& r)
{
    return join({r.xmin, r.xmax, r.ymin, r.ymax});
}

using Setter = void (*)(Scenario&, const std::string& field, const std::string& value);

const std::map<std::string, Setter>& setters()
{
    static const std::map<std::string, Setter> m = {
        {"run.name", [](Scenario& s, const std::string&, const std::string& v) { s.name = trim(v); }},
        {"run.models",
         [](Scenario& s, const std::string& f, const std::string& v) {
             s.models.clear();
             for (const auto& item : split(v, ',')) {
                 auto const m = parse_model(item);
                 if (!m) {
                     throw ValidationError(f, "unknown model '" + item + "'");
                 }
                 s.models.push_back(*m);
             }
         }},
        {"run.T", [](Scenario& s, const std::string& f, const std::string& v) { s.T = to_double(f, v); }},
        {"run.snapshots",
         [](Scenario& s, const std::string& f, const std::string& v) { s.snapshots = to_list(f, v); }},
        {"run.seed", [](Scenario& s, const std::string& f, const std::string& v) { s.seed = to_uint(f, v); }},
        {"run.out", [](Scenario& s, const std::string&, const std::string& v) { s.out = trim(v); }},
        {"domain.rect", [](Scenario& s, const std::string& f, const std::string& v) { s.domain = to_rect(f, v); }},
        {"particle.L", [](Scenario& s, const std::string& f, const std::string& v) { s.L = to_double(f, v); }},
        {"particle.D", [](Scenario& s, const std::string& f, const std::string& v) { s.D = to_double(f, v); }},
        {"particle.eps0", [](Scenario& s, const std::string& f, const std::string& v) { s.eps0 = to_double(f, v); }},
        {"dynamics.gamma",
         [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.gamma = to_double(f, v); }},
        {"dynamics.gamma_bar",
         [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.gamma_bar = to_double(f, v); }},
        {"dynamics.m", [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.m = to_double(f, v); }},
        {"dynamics.I_c",
         [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.I_c = to_double(f, v); }},
        {"dynamics.A", [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.A = to_double(f, v); }},
        {"dynamics.B", [](Scenario& s, const std::string& f, const std::string& v) { s.dyn.B = to_double(f, v); }},
        {"potentials.V1",
         [](Scenario& s, const std::string& f, const std::string& v) {
             auto const t = trim(v);
             if (t == "zero") {
                 s.ext.v1 = ExternalPotentials::Spatial::zero;
             } else if (t == "quadratic") {
                 s.ext.v1 = ExternalPotentials::Spatial::quadratic;
             } else {
                 throw ValidationError(f, "expected zero or quadratic, got '" + v + "'");
             }
         }},
        {"potentials.V2",
         [](Scenario& s, const std::string& f, const std::string& v) {
             auto const t = trim(v);
             if (t == "zero") {
                 s.ext.v2 = ExternalPotentials::Angular::zero;
             } else if (t == "sine") {
                 s.ext.v2 = ExternalPotentials::Angular::sine;
             } else {
                 throw ValidationError(f, "expected zero or sine, got '" + v + "'");
             }
         }},
        {"flow.kind", [](Scenario& s, const std::string&, const std::string& v) { s.flow.kind = trim(v); }},
        {"flow.uniform",
         [](Scenario& s, const std::string& f, const std::string& v) {
             auto const l = to_list(f, v);
             if (l.size() != 2) {
                 throw ValidationError(f, "expected ux,uy");
             }
             s.flow.uniform = {l[0], l[1]};
         }},
        {"flow.path", [](Scenario& s, const std::string&, const std::string& v) { s.flow.path = trim(v); }},
        {"micro.n_particles",
         [](Scenario& s, const std::string& f, const std::string& v) { s.n_particles = to_uint(f, v); }},
        {"micro.realizations",
         [](Scenario& s, const std::string& f, const std::string& v) { s.realizations = to_uint(f, v); }},
        {"micro.dt", [](Scenario& s, const std::string& f, const std::string& v) { s.micro_dt = to_double(f, v); }},
        {"micro.interaction",
         [](Scenario& s, const std::string& f, const std::string& v) { s.micro_interaction = to_bool(f, v); }},
        {"micro.wall_ghosts",
         [](Scenario& s, const std::string& f, const std::string& v) { s.wall_ghosts = to_bool(f, v); }},
        {"grid.h", [](Scenario& s, const std::string& f, const std::string& v) { s.h = to_double(f, v); }},
        {"grid.ntheta", [](Scenario& s, const std::string& f, const std::string& v) { s.ntheta = to_uint(f, v); }},
        {"grid.bc", [](Scenario& s, const std::string& f, const std::string& v) { s.bc = to_bc(f, v); }},
        {"grid.interaction",
         [](Scenario& s, const std::string& f, const std::string& v) { s.pde_interaction = to_bool(f, v); }},
        {"grid.ghost_cells",
         [](Scenario& s, const std::string& f, const std::string& v) { s.ghost_cells = to_bool(f, v); }},
        {"grid.dt_max",
         [](Scenario& s, const std::string& f, const std::string& v) { s.pde_dt_max = to_double(f, v); }},
        {"grid.table_ntheta",
         [](Scenario& s, const std::string& f, const std::string& v) { s.table_ntheta = to_uint(f, v); }},
        {"initial.support",
         [](Scenario& s, const std::string& f, const std::string& v) { s.support = to_rect(f, v); }},
        {"initial.theta", [](Scenario& s, const std::string& f, const std::string& v) { s.theta0 = to_double(f, v); }},
        {"initial.omega", [](Scenario& s, const std::string& f, const std::string& v) { s.omega0 = to_double(f, v); }},
        {"initial.v",
         [](Scenario& s, const std::string& f, const std::string& v) {
             auto const l = to_list(f, v);
             if (l.size() != 2) {
                 throw ValidationError(f, "expected vx,vy");
             }
             s.v0 = {l[0], l[1]};
         }},
        {"stationary.noise",
         [](Scenario& s, const std::string& f, const std::string& v) { s.noise = to_list(f, v); }},
        {"stationary.sample_dt",
         [](Scenario& s, const std::string& f, const std::string& v) { s.sample_dt = to_double(f, v); }},
        {"stats.hist_h", [](Scenario& s, const std::string& f, const std::string& v) { s.hist_h = to_double(f, v); }},
        {"stats.bandwidth",
         [](Scenario& s, const std::string& f, const std::string& v) { s.bandwidth = to_double(f, v); }},
        {"stats.angular_bins",
         [](Scenario& s, const std::string& f, const std::string& v) { s.angular_bins = to_uint(f, v); }},
        {"stats.outside",
         [](Scenario& s, const std::string& f, const std::string& v) {
             auto const t = trim(v);
             if (t == "clamp") {
                 s.outside = OutsidePolicy::clamp;
             } else if (t == "drop") {
                 s.outside = OutsidePolicy::drop;
             } else {
                 throw ValidationError(f, "expected clamp or drop, got '" + v + "'");
             }
         }},
    };
    return m;
}

} // namespace

Scenario load_scenario(const std::string& path, Scenario base)
{
    pt::ptree tree;
    try {
        pt::read_ini(path, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError("scenario", e.what());
    }
    const auto& set = setters();
    for (const auto& [section, body] : tree) {
        if (body.empty() && !body.data().empty()) {
            throw ValidationError(section, "key outside of a section");
        }
        for (const auto& [key, value] : body) {
            std::string const field = section + "." + key;
            auto const it = set.find(field);
            if (it == set.end()) {
                throw ValidationError(field, "unknown setting");
            }
            it->second(base, field, value.data());
        }
    }
    return base;
}

void validate(const Scenario& s)
{
    auto fail = [](const char* field, const std::string& msg) { throw ValidationError(field, msg); };
    if (s.models.empty()) {
        fail("run.models", "at least one model is required");
    }
    std::set<ModelKind> seen(s.models.begin(), s.models.end());
    if (seen.size() != s.models.size()) {
        fail("run.models", "models must not repeat");
    }
    if (!(s.T > 0.0)) {
        fail("run.T", "end time must be positive");
    }
    if (!std::is_sorted(s.snapshots.begin(), s.snapshots.end()) ||
        std::adjacent_find(s.snapshots.begin(), s.snapshots.end()) != s.snapshots.end()) {
        fail("run.snapshots", "snapshot times must be strictly increasing");
    }
    for (double t : s.snapshots) {
        if (t < 0.0 || t > s.T) {
            fail("run.snapshots", "snapshot time " + format_double(t) + " outside [0, T]");
        }
    }
    if (s.out.empty()) {
        fail("run.out", "output directory must be set");
    }
    if (!(s.domain.width() > 0.0) || !(s.domain.height() > 0.0)) {
        fail("domain.rect", "domain must have positive extent");
    }
    if (!(s.D > 0.0)) {
        fail("particle.D", "width must be positive");
    }
    if (!(s.L >= s.D)) {
        fail("particle.L", "length must be at least the width");
    }
    if (!(s.eps0 >= 0.0)) {
        fail("particle.eps0", "strength must be non-negative");
    }
    if (!(s.dyn.m > 0.0)) {
        fail("dynamics.m", "mass must be positive");
    }
    if (!(s.dyn.I_c > 0.0)) {
        fail("dynamics.I_c", "moment of inertia must be positive");
    }
    if (!(s.dyn.gamma >= 0.0)) {
        fail("dynamics.gamma", "must be non-negative");
    }
    if (!(s.dyn.gamma_bar >= 0.0)) {
        fail("dynamics.gamma_bar", "must be non-negative");
    }
    if (!(s.dyn.A >= 0.0)) {
        fail("dynamics.A", "must be non-negative");
    }
    if (!(s.dyn.B >= 0.0)) {
        fail("dynamics.B", "must be non-negative");
    }
    if (!(s.support.width() > 0.0) || !(s.support.height() > 0.0)) {
        fail("initial.support", "support must have positive extent");
    }
    if (!s.domain.contains(s.support)) {
        fail("initial.support", "support must lie inside the domain");
    }
    if (s.flow.kind == "file" && s.flow.path.empty()) {
        fail("flow.path", "a file flow needs a path");
    }
    if (s.has(ModelKind::micro)) {
        if (s.n_particles < 1) {
            fail("micro.n_particles", "need at least one particle");
        }
        if (s.realizations < 1) {
            fail("micro.realizations", "need at least one realization");
        }
        if (!(s.micro_dt > 0.0)) {
            fail("micro.dt", "time step must be positive");
        }
        if (s.wall_ghosts && (s.domain.width() < 2 * s.L || s.domain.height() < 2 * s.L)) {
            fail("micro.wall_ghosts", "domain sides must be at least l = 2L");
        }
    }
    if (s.has_pde()) {
        if (!(s.h > 0.0)) {
            fail("grid.h", "spacing must be positive");
        }
        try {
            (void)Lattice::make(s.domain, s.h, s.ntheta);
        } catch (const std::invalid_argument& e) {
            fail("grid.h", e.what());
        }
        if ((s.has(ModelKind::q_maxwellian) || s.has(ModelKind::q_monokinetic)) && s.ntheta < 1) {
            fail("grid.ntheta", "q models need at least one angle cell");
        }
        if (s.table_ntheta < 1) {
            fail("grid.table_ntheta", "need at least one angle in the table");
        }
        if (!(s.pde_dt_max > 0.0)) {
            fail("grid.dt_max", "must be positive");
        }
    }
    if (s.has(ModelKind::diffusive)) {
        if (!(2.0 * s.dyn.gamma > s.dyn.A * s.dyn.A)) {
            fail("dynamics.gamma", "diffusive limit needs 2 gamma > A^2");
        }
        if (!(2.0 * s.dyn.gamma_bar > s.dyn.B * s.dyn.B)) {
            fail("dynamics.gamma_bar", "diffusive limit needs 2 gamma_bar > B^2");
        }
    }
    for (double a : s.noise) {
        if (!(a > 0.0)) {
            fail("stationary.noise", "noise amplitudes must be positive");
        }
    }
    if (!s.noise.empty() && !(s.sample_dt > 0.0)) {
        fail("stationary.sample_dt", "must be positive");
    }
    if (!(s.hist_h > 0.0)) {
        fail("stats.hist_h", "must be positive");
    }
    if (!(s.bandwidth > 0.0)) {
        fail("stats.bandwidth", "must be positive");
    }
    if (s.angular_bins < 1) {
        fail("stats.angular_bins", "need at least one bin");
    }
}

void write_scenario(std::ostream& out, const Scenario& s)
{
    std::string models;
    for (std::size_t i = 0; i < s.models.size(); ++i) {
        models += (i ? "," : "") + model_name(s.models[i]);
    }
    auto b = [](bool v) { return v ? "true" : "false"; };
    auto d = [](double v) { return format_double(v); };
    out << "[run]\n"
        << "name = " << s.name << "\n"
        << "models = " << models << "\n"
        << "T = " << d(s.T) << "\n"
        << "snapshots = " << join(s.snapshots) << "\n"
        << "seed = " << s.seed << "\n"
        << "out = " << s.out << "\n\n"
        << "[domain]\n"
        << "rect = " << rect_str(s.domain) << "\n\n"
        << "[particle]\n"
        << "L = " << d(s.L) << "\n"
        << "D = " << d(s.D) << "\n"
        << "eps0 = " << d(s.eps0) << "\n\n"
        << "[dynamics]\n"
        << "gamma = " << d(s.dyn.gamma) << "\n"
        << "gamma_bar = " << d(s.dyn.gamma_bar) << "\n"
        << "m = " << d(s.dyn.m) << "\n"
        << "I_c = " << d(s.dyn.I_c) << "\n"
        << "A = " << d(s.dyn.A) << "\n"
        << "B = " << d(s.dyn.B) << "\n\n"
        << "[potentials]\n"
        << "V1 = " << (s.ext.v1 == ExternalPotentials::Spatial::quadratic ? "quadratic" : "zero") << "\n"
        << "V2 = " << (s.ext.v2 == ExternalPotentials::Angular::sine ? "sine" : "zero") << "\n\n"
        << "[flow]\n"
        << "kind = " << s.flow.kind << "\n"
        << "uniform = " << join({s.flow.uniform.x, s.flow.uniform.y}) << "\n"
        << "path = " << s.flow.path << "\n\n"
        << "[micro]\n"
        << "n_particles = " << s.n_particles << "\n"
        << "realizations = " << s.realizations << "\n"
        << "dt = " << d(s.micro_dt) << "\n"
        << "interaction = " << b(s.micro_interaction) << "\n"
        << "wall_ghosts = " << b(s.wall_ghosts) << "\n\n"
        << "[grid]\n"
        << "h = " << d(s.h) << "\n"
        << "ntheta = " << s.ntheta << "\n"
        << "bc = " << bc_name(s.bc) << "\n"
        << "interaction = " << b(s.pde_interaction) << "\n"
        << "ghost_cells = " << b(s.ghost_cells) << "\n"
        << "dt_max = " << d(s.pde_dt_max) << "\n"
        << "table_ntheta = " << s.table_ntheta << "\n\n"
        << "[initial]\n"
        << "support = " << rect_str(s.support) << "\n"
        << "theta = " << d(s.theta0) << "\n"
        << "omega = " << d(s.omega0) << "\n"
        << "v = " << join({s.v0.x, s.v0.y}) << "\n\n"
        << "[stationary]\n"
        << "noise = " << join(s.noise) << "\n"
        << "sample_dt = " << d(s.sample_dt) << "\n\n"
        << "[stats]\n"
        << "hist_h = " << d(s.hist_h) << "\n"
        << "bandwidth = " << d(s.bandwidth) << "\n"
        << "angular_bins = " << s.angular_bins << "\n"
        << "outside = " << (s.outside == OutsidePolicy::drop ? "drop" : "clamp") << "\n";
}

} // namespace ellipsim
