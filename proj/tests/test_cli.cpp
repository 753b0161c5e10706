#include "doctest.h"
#include "support.hpp"

#include <cstdlib>
#include <fstream>
#include <map>
#include <sys/wait.h>

using namespace testing;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string err;
};

Result run_cli(const std::string& args, const fs::path& scratch)
{
    auto const err = scratch / "stderr.txt";
    std::string const cmd = std::string("\"") + ELLIPSIM_CLI + "\" " + args + " 2> \"" + err.string() + "\" > /dev/null";
    int const status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.err = slurp(err);
    return r;
}

// reduced top-bottom run with every model
const char* kSmall = R"([run]
models = micro, q-monokinetic, q-maxwellian, rho, diffusive
T = 0.2
snapshots = 0.1, 0.2
[micro]
n_particles = 30
realizations = 2
[grid]
h = 0.1
ntheta = 8
[stats]
hist_h = 0.1
bandwidth = 0.2
angular_bins = 12
)";

std::map<std::string, std::string> read_dir(const fs::path& dir)
{
    std::map<std::string, std::string> files;
    for (const auto& e : fs::directory_iterator(dir)) {
        files[e.path().filename().string()] = slurp(e.path());
    }
    return files;
}

std::size_t count_lines(const std::string& s)
{
    std::size_t n = 0;
    for (char c : s) {
        n += c == '\n';
    }
    return n;
}

} // namespace

TEST_SUITE("cli") {

TEST_CASE("usage errors exit with 2") {
    auto const dir = scratch_dir("cli_usage");
    CHECK(run_cli("", dir).code == 2);
    CHECK(run_cli("run --bogus", dir).code == 2);
    Result const r = run_cli("run --preset nowhere", dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("run.preset") != std::string::npos);
    CHECK(run_cli("run --preset top-bottom --model hydro", dir).code == 2);
}

TEST_CASE("a support outside the domain is rejected by name") {
    auto const dir = scratch_dir("cli_support");
    std::ofstream(dir / "bad.ini") << "[initial]\nsupport = -2, 1, -1, 1\n";
    Result const r = run_cli("run --preset top-bottom --scenario \"" + (dir / "bad.ini").string() + "\" --out \"" +
                                 (dir / "out").string() + "\"",
                             dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("initial.support") != std::string::npos);
    CHECK(!fs::exists(dir / "out"));
}

TEST_CASE("runtime failures exit with 1") {
    auto const dir = scratch_dir("cli_runtime");
    std::ofstream(dir / "f.ini") << "[run]\nmodels = micro\nT = 0.01\nsnapshots = 0.01\n[micro]\nn_particles = 2\n"
                                    "[flow]\nkind = file\npath = "
                                 << (dir / "missing.txt").string() << "\n";
    Result const r =
        run_cli("run --scenario \"" + (dir / "f.ini").string() + "\" --out \"" + (dir / "out").string() + "\"", dir);
    CHECK(r.code != 0);
    CHECK(!r.err.empty());
}

TEST_CASE("small run: files, manifest and determinism") {
    auto const dir = scratch_dir("cli_small");
    std::ofstream(dir / "small.ini") << kSmall;
    std::string const base = "run --quiet --preset top-bottom --scenario \"" + (dir / "small.ini").string() + "\"";
    REQUIRE(run_cli(base + " --seed 5 --out \"" + (dir / "a").string() + "\"", dir).code == 0);
    REQUIRE(run_cli(base + " --seed 5 --out \"" + (dir / "b").string() + "\"", dir).code == 0);
    REQUIRE(run_cli(base + " --seed 6 --out \"" + (dir / "c").string() + "\"", dir).code == 0);

    auto const a = read_dir(dir / "a");
    auto b = read_dir(dir / "b");
    auto const c = read_dir(dir / "c");
    // only the output directory differs
    std::string rb = b.at("resolved_scenario");
    rb.replace(rb.find((dir / "b").string()), (dir / "b").string().size(), (dir / "a").string());
    b["resolved_scenario"] = rb;
    CHECK(a == b);
    CHECK(a.at("micro_particles_t0.2.csv") != c.at("micro_particles_t0.2.csv"));

    for (const char* name :
         {"micro_particles_t0.2.csv", "micro_hist_t0.2.csv", "micro_angular_t0.2.csv", "micro_smoothhist_t0.1.csv",
          "q_grid_t0.1.csv", "q_rho_t0.2.csv", "q_angular_t0.2.csv", "qmax_grid_t0.2.csv", "rho_grid_t0.2.csv",
          "rho_angular_t0.1.csv", "diffusive_grid_t0.2.csv", "diffusive_angular_t0.2.csv", "resolved_scenario",
          "manifest.csv"}) {
        CHECK_MESSAGE(a.count(name) == 1, name);
    }

    CHECK(first_line(dir / "a" / "micro_particles_t0.2.csv") == "t,id,x,y,vx,vy,theta,omega");
    CHECK(first_line(dir / "a" / "micro_hist_t0.2.csv") == "ix,iy,value");
    CHECK(first_line(dir / "a" / "micro_angular_t0.2.csv") == "itheta,value");
    CHECK(first_line(dir / "a" / "q_grid_t0.2.csv") == "t,ix,iy,itheta,q,qv1,qv2,qw");
    CHECK(first_line(dir / "a" / "q_rho_t0.2.csv") == "t,ix,iy,rho");
    CHECK(first_line(dir / "a" / "rho_grid_t0.2.csv") == "t,ix,iy,rho,phi,v1,v2,w");

    // 2 realizations x 30 particles, 30 x 30 histogram bins, 12 angle bins
    CHECK(count_lines(a.at("micro_particles_t0.2.csv")) == 61);
    CHECK(count_lines(a.at("micro_hist_t0.2.csv")) == 901);
    CHECK(count_lines(a.at("micro_angular_t0.2.csv")) == 13);
    CHECK(count_lines(a.at("q_grid_t0.2.csv")) == 30 * 30 * 8 + 1);

    std::string const manifest = a.at("manifest.csv");
    CHECK(manifest.rfind("file,model,quantity,t,schema,schema_version\n", 0) == 0);
    // every other file has a row
    CHECK(count_lines(manifest) - 1 == a.size() - 1);
    for (const auto& [name, body] : a) {
        if (name != "manifest.csv") {
            CHECK_MESSAGE(manifest.find(name + ",") != std::string::npos, name);
        }
    }

    // the echoed scenario reproduces the run
    REQUIRE(run_cli("run --quiet --scenario \"" + (dir / "a" / "resolved_scenario").string() + "\" --out \"" +
                        (dir / "d").string() + "\"",
                    dir)
                .code == 0);
    auto d = read_dir(dir / "d");
    auto a2 = a;
    d.erase("resolved_scenario");
    a2.erase("resolved_scenario");
    CHECK(d == a2);
}

TEST_CASE("flags override the scenario file") {
    auto const dir = scratch_dir("cli_override");
    std::ofstream(dir / "s.ini") << kSmall;
    REQUIRE(run_cli("run --quiet --preset top-bottom --scenario \"" + (dir / "s.ini").string() +
                        "\" --model micro --realizations 3 --out \"" + (dir / "o").string() + "\"",
                    dir)
                .code == 0);
    auto const files = read_dir(dir / "o");
    CHECK(files.count("q_grid_t0.2.csv") == 0);
    CHECK(count_lines(files.at("micro_particles_t0.2.csv")) == 91);
    std::string const resolved = files.at("resolved_scenario");
    CHECK(resolved.find("realizations = 3") != std::string::npos);
    CHECK(resolved.find("models = micro\n") != std::string::npos);
}

TEST_CASE("cavity field export") {
    auto const dir = scratch_dir("cli_cavity");
    auto const path = dir / "field.txt";
    REQUIRE(run_cli("cavity-field --nodes 11 --out \"" + path.string() + "\"", dir).code == 0);
    std::ifstream in(path);
    FlowField const f = load_grid_field(in);
    CHECK(std::abs(f.eval({0.5, 1.0}).u.x - 1.0) < 1e-3);
    CHECK(run_cli("cavity-field --nodes 1", dir).code == 2);
}

}
