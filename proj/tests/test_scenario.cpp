#include "doctest.h"
#include "support.hpp"

#include "ellipsim/scenario.hpp"

#include <fstream>
#include <sstream>

using namespace ellipsim;
using namespace testing;

namespace {

std::filesystem::path write_file(const std::filesystem::path& dir, const std::string& name, const std::string& text)
{
    auto const p = dir / name;
    std::ofstream(p) << text;
    return p;
}

std::string field_of(const Scenario& s)
{
    try {
        validate(s);
    } catch (const ValidationError& e) {
        return e.field();
    }
    return "";
}

void check_same(const Scenario& a, const Scenario& b)
{
    std::ostringstream x, y;
    write_scenario(x, a);
    write_scenario(y, b);
    CHECK(x.str() == y.str());
}

} // namespace

TEST_SUITE("scenario") {

TEST_CASE("model names") {
    for (ModelKind m : {ModelKind::micro, ModelKind::q_maxwellian, ModelKind::q_monokinetic, ModelKind::rho,
                        ModelKind::diffusive}) {
        CHECK(parse_model(model_name(m)) == m);
    }
    CHECK(model_prefix(ModelKind::q_monokinetic) == "q");
    CHECK(model_prefix(ModelKind::q_maxwellian) == "qmax");
    CHECK(!parse_model("kinetic"));
}

TEST_CASE("stationary preset parameters") {
    Scenario const s = preset("stationary");
    CHECK(s.domain == Rect{-6, 6, -6, 6});
    CHECK(s.L == 1.0);
    CHECK(s.D == 0.5);
    CHECK(s.eps0 == 1.0);
    CHECK(s.dyn.gamma == 0.0);
    CHECK(s.dyn.gamma_bar == 0.0);
    CHECK(s.dyn.m == 1.0);
    CHECK(s.dyn.I_c == 1.0);
    CHECK(s.ext.v1 == ExternalPotentials::Spatial::quadratic);
    CHECK(s.ext.v2 == ExternalPotentials::Angular::sine);
    CHECK(s.support == Rect{1.5, 3.5, 1.5, 3.5});
    CHECK(s.n_particles == 200);
    CHECK(s.theta0 == 0.0);
    // 60 x 60 x 8 cells
    CHECK(std::lround(12.0 / s.h) == 60);
    CHECK(s.ntheta == 8);
    CHECK(s.has(ModelKind::micro));
    CHECK(s.has(ModelKind::q_maxwellian));
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("top-bottom preset parameters") {
    Scenario const s = preset("top-bottom");
    CHECK(s.domain == Rect{-1.5, 1.5, -1.5, 1.5});
    CHECK(s.L == 0.1);
    CHECK(s.D == 0.05);
    CHECK(s.eps0 == 1.0);
    CHECK(s.dyn.gamma == 1.0);
    CHECK(s.dyn.gamma_bar == 1.0);
    CHECK(s.dyn.m == 1.0);
    CHECK(s.dyn.I_c == 0.001);
    CHECK(s.dyn.A == 0.0);
    CHECK(s.dyn.B == 0.0);
    CHECK(s.flow.kind == "top-bottom");
    CHECK(s.support == Rect{-1, 1, -1, 1});
    CHECK(s.n_particles == 1000);
    CHECK(s.realizations == 128);
    CHECK(s.h == 0.05);
    CHECK(s.ntheta == 60); // k = pi / 30
    CHECK(s.bc == BoundaryKind::neumann);
    CHECK(s.T == 5.0);
    CHECK(s.snapshots == std::vector<double>{0.75, 1.5, 5.0});
    CHECK(s.models ==
          std::vector<ModelKind>{ModelKind::micro, ModelKind::q_monokinetic, ModelKind::rho, ModelKind::diffusive});
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("rotational preset parameters") {
    Scenario const s = preset("rotational");
    CHECK(s.flow.kind == "rotational");
    CHECK(s.dyn.I_c == 0.001);
    CHECK(s.support == Rect{0.2, 0.7, -0.25, 0.25});
    CHECK(s.theta0 == doctest::Approx(kPi / 2));
    CHECK(s.h == 0.02);
    CHECK(s.ntheta == 60);
    CHECK(s.snapshots == std::vector<double>{1.5, 2.5, 3.0});
    CHECK(!s.has(ModelKind::diffusive));
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("cavity preset parameters") {
    Scenario const s = preset("cavity");
    CHECK(s.domain == Rect{0, 1, 0, 1});
    CHECK(s.L == 0.05);
    CHECK(s.D == 0.025);
    CHECK(s.dyn.gamma == 10.0);
    CHECK(s.dyn.gamma_bar == 10.0);
    CHECK(s.support == Rect{0.4, 0.6, 0.4, 0.6});
    CHECK(s.wall_ghosts);
    CHECK(s.ghost_cells);
    CHECK(s.bc == BoundaryKind::reflective);
    CHECK(s.snapshots == std::vector<double>{2.0, 3.5, 5.0});
    CHECK(s.models == std::vector<ModelKind>{ModelKind::micro, ModelKind::rho});
    CHECK_NOTHROW(validate(s));
}

TEST_CASE("unknown preset") {
    CHECK_THROWS_AS(preset("lid"), ValidationError);
    CHECK(preset_names().size() == 4);
}

TEST_CASE("scenario files round trip") {
    auto const dir = scratch_dir("scenario_roundtrip");
    for (const auto& name : preset_names()) {
        Scenario const s = preset(name);
        std::ostringstream text;
        write_scenario(text, s);
        auto const p = write_file(dir, name + ".ini", text.str());
        check_same(load_scenario(p.string()), s);
    }
    Scenario odd;
    odd.noise.clear();
    odd.snapshots = {0.125, 1.0 / 3.0};
    odd.T = 1.0;
    odd.flow.kind = "uniform";
    odd.flow.uniform = {0.1, -0.7};
    std::ostringstream text;
    write_scenario(text, odd);
    auto const p = write_file(dir, "odd.ini", text.str());
    Scenario const back = load_scenario(p.string());
    check_same(back, odd);
    CHECK(back.snapshots[1] == 1.0 / 3.0);
}

TEST_CASE("files override only what they set") {
    auto const dir = scratch_dir("scenario_partial");
    auto const p = write_file(dir, "partial.ini", "[micro]\nrealizations = 7\n[run]\nmodels = micro, rho\n");
    Scenario const s = load_scenario(p.string(), preset("top-bottom"));
    CHECK(s.realizations == 7);
    CHECK(s.models == std::vector<ModelKind>{ModelKind::micro, ModelKind::rho});
    CHECK(s.T == 5.0);
    CHECK(s.flow.kind == "top-bottom");
}

TEST_CASE("malformed files name the key") {
    auto const dir = scratch_dir("scenario_bad");
    auto field = [&](const std::string& text) {
        auto const p = write_file(dir, "bad.ini", text);
        try {
            load_scenario(p.string());
        } catch (const ValidationError& e) {
            return e.field();
        }
        return std::string("none");
    };
    CHECK(field("[run]\nspeed = 3\n") == "run.speed");
    CHECK(field("[run]\nT = fast\n") == "run.T");
    CHECK(field("[initial]\nsupport = 0,1,2\n") == "initial.support");
    CHECK(field("[grid]\nbc = sticky\n") == "grid.bc");
    CHECK(field("[run]\nmodels = micro, lattice-boltzmann\n") == "run.models");
}

TEST_CASE("validation") {
    Scenario s;
    CHECK(field_of(s) == "");
    s.support = {-1, 2, -1, 1};
    CHECK(field_of(s) == "initial.support");
    s = {};
    s.snapshots = {0.5, 0.2};
    CHECK(field_of(s) == "run.snapshots");
    s = {};
    s.snapshots = {2.0};
    CHECK(field_of(s) == "run.snapshots");
    s = {};
    s.T = 0.0;
    CHECK(field_of(s) == "run.T");
    s = {};
    s.L = 0.01;
    CHECK(field_of(s) == "particle.L");
    s = {};
    s.models = {ModelKind::diffusive};
    s.dyn.A = 2.0;
    CHECK(field_of(s) == "dynamics.gamma");
    s = {};
    s.models = {ModelKind::rho};
    s.h = 0.07;
    CHECK(field_of(s) == "grid.h");
    s = {};
    s.models = {ModelKind::micro, ModelKind::micro};
    CHECK(field_of(s) == "run.models");
    s = {};
    s.flow.kind = "file";
    CHECK(field_of(s) == "flow.path");
}

TEST_CASE("flow selection") {
    FlowSpec f;
    f.kind = "rotational";
    CHECK(f.build().eval({1, 0}).u == Vec2{0, -1});
    f.kind = "cavity";
    CHECK(std::abs(f.build().eval({0.5, 1.0}).u.x - 1.0) < 1e-3);
    f.kind = "swirl";
    CHECK_THROWS_AS(f.build(), ValidationError);

    auto const dir = scratch_dir("scenario_flow");
    auto const p = write_file(dir, "u.txt", "2 2 0 0 1 1\n0.5 0\n0.5 0\n0.5 0\n0.5 0\n");
    f.kind = "file";
    f.path = p.string();
    CHECK(f.build().eval({0.2, 0.3}).u.x == doctest::Approx(0.5));
}

}
