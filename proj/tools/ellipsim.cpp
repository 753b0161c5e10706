// ellipsim: command-line front end.
//
//   ellipsim run --preset top-bottom --out results
//   ellipsim run --scenario my.ini --seed 7 --model q-monokinetic
//   ellipsim cavity-field --nodes 101 --out cavity.txt
//
// Exit codes: 0 success, 1 runtime failure, 2 invalid input.

#include "ellipsim/flowfield.hpp"
#include "ellipsim/runner.hpp"
#include "ellipsim/scenario.hpp"

#include "CLI11.hpp"

#include <fstream>
#include <iostream>
#include <optional>

using namespace ellipsim;

namespace {

constexpr int kRuntimeFailure = 1;
constexpr int kInvalidInput = 2;

struct RunArgs {
    std::string preset;
    std::string scenario;
    std::optional<std::string> out;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> realizations;
    std::optional<std::string> model;
    bool quiet = false;
};

Scenario resolve(const RunArgs& a)
{
    Scenario s = a.preset.empty() ? Scenario{} : preset(a.preset);
    if (!a.scenario.empty()) {
        s = load_scenario(a.scenario, s);
    }
    if (a.out) {
        s.out = *a.out;
    }
    if (a.seed) {
        s.seed = *a.seed;
    }
    if (a.realizations) {
        s.realizations = *a.realizations;
    }
    if (a.model) {
        auto const m = parse_model(*a.model);
        if (!m) {
            throw ValidationError("run.models", "unknown model '" + *a.model + "'");
        }
        s.models = {*m};
    }
    validate(s);
    return s;
}

int run(const RunArgs& a)
{
    Scenario s;
    try {
        s = resolve(a);
    } catch (const ValidationError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kInvalidInput;
    }
    try {
        std::ofstream null_sink;
        std::ostream& log = a.quiet ? static_cast<std::ostream&>(null_sink) : std::clog;
        RunReport const r = run_scenario(s, log);
        if (!a.quiet) {
            std::clog << r.files.size() << " files written to " << s.out << " in " << r.wall_seconds << " s\n";
        }
    } catch (const ValidationError& e) {
        std::cerr << "invalid scenario: " << e.what() << '\n';
        return kInvalidInput;
    } catch (const std::exception& e) {
        std::cerr << "run failed: " << e.what() << '\n';
        return kRuntimeFailure;
    }
    return 0;
}

int cavity_field(std::size_t nodes, const std::string& path)
{
    if (nodes < 2) {
        std::cerr << "invalid input: --nodes must be at least 2\n";
        return kInvalidInput;
    }
    std::ofstream out(path);
    if (!out) {
        std::cerr << "cannot open " << path << '\n';
        return kRuntimeFailure;
    }
    write_grid_field(out, cavity_standin(nodes));
    out.flush();
    return out ? 0 : kRuntimeFailure;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Interacting ellipsoids: particles, moment closures and the diffusive limit"};
    app.require_subcommand(1);

    RunArgs ra;
    auto* run_cmd = app.add_subcommand("run", "Run a scenario (preset, file, or both; flags override the file)");
    std::string presets;
    for (const auto& p : preset_names()) {
        presets += (presets.empty() ? "" : ", ") + p;
    }
    run_cmd->add_option("--preset", ra.preset, "Built-in scenario: " + presets);
    run_cmd->add_option("--scenario", ra.scenario, "INI scenario file applied on top of the preset");
    run_cmd->add_option("--out", ra.out, "Output directory");
    run_cmd->add_option("--seed", ra.seed, "Random seed");
    run_cmd->add_option("--realizations", ra.realizations, "Number of particle realizations");
    run_cmd->add_option("--model", ra.model, "Run only this model: micro, q-maxwellian, q-monokinetic, rho, diffusive");
    run_cmd->add_flag("--quiet", ra.quiet, "No progress output");

    std::size_t nodes = 101;
    std::string field_out = "cavity_field.txt";
    auto* cav_cmd = app.add_subcommand("cavity-field", "Write the built-in cavity stand-in as a gridded field file");
    cav_cmd->add_option("--nodes", nodes, "Nodes per axis");
    cav_cmd->add_option("--out", field_out, "Output path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : kInvalidInput;
    }
    if (*run_cmd) {
        return run(ra);
    }
    return cavity_field(nodes, field_out);
}
