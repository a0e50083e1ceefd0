// hnc: hybrid Nitsche contact solver front end.

#include "hnc/run.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>

namespace {

using namespace hnc;

struct Flags {
    std::string scenario;
    std::string out = "out";
    std::optional<double> gamma_mult;
    std::optional<Index> constants;
    Index refine = 1;
    std::string mode;
    std::string hybrid;
    std::string model;
    bool quiet = false;
    std::string dump;
};

// --mode applies to body 1, the body not tied to the hybrid layer in the
// built-in templates.
Scenario configure(const Flags& f, Scenario s) {
    if (!f.scenario.empty()) s = parse_scenario_file(f.scenario);
    if (f.constants) s.hybrid.count = *f.constants;
    if (!f.mode.empty()) s.bodies[0].mode = parse_constraint_mode(f.mode);
    if (!f.hybrid.empty()) s.hybrid.kind = parse_hybrid_kind(f.hybrid);
    if (!f.model.empty()) s.hybrid.model = parse_hybrid_model(f.model);
    if (f.gamma_mult) s = with_gamma_mult(std::move(s), *f.gamma_mult);
    if (f.refine != 1) s = refined(std::move(s), f.refine);
    if (const auto errors = validate_scenario(s); !errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    if (!f.dump.empty()) {
        std::ofstream out(f.dump);
        if (!out) throw Error("cannot write " + f.dump);
        write_scenario(out, s);
    }
    return s;
}

int report(const RunResult& r, bool quiet) {
    if (!quiet) std::cout << r.summary;
    return r.pass ? 0 : 4;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Frictionless contact through a hybrid interface layer with Nitsche coupling"};
    app.require_subcommand(1);
    Flags f;
    app.add_option("--scenario", f.scenario, "Scenario file (section.key = value)")->check(CLI::ExistingFile);
    app.add_option("--out", f.out, "Output directory");
    app.add_option("--gamma-mult", f.gamma_mult, "Nitsche multiplier c for both bodies")->check(CLI::PositiveNumber);
    app.add_option("--constants", f.constants, "Number of hybrid elements")->check(CLI::PositiveNumber);
    app.add_option("--refine", f.refine, "Multiply body mesh densities")->check(CLI::PositiveNumber);
    app.add_option("--mode", f.mode, "Coupling mode of body 1")->check(CLI::IsMember({"equality", "inequality"}));
    app.add_option("--hybrid", f.hybrid, "Hybrid space")->check(CLI::IsMember({"p0", "p1", "beam"}));
    app.add_option("--model", f.model, "Hybrid layer model")->check(CLI::IsMember({"none", "string", "beam"}));
    app.add_option("--dump-scenario", f.dump, "Write the effective scenario to this file");
    app.add_flag("--quiet", f.quiet, "Print nothing but errors");

    auto* solve = app.add_subcommand("solve", "Solve a scenario (default: Hertz benchmark)");
    auto* hertz = app.add_subcommand("hertz-bench", "Hertz benchmark against the analytical pressure");
    auto* patch = app.add_subcommand("patch-test", "Stacked blocks under uniform pressure, both modes");
    double pressure = 1.0;
    patch->add_option("--pressure", pressure, "Applied pressure");
    auto* converge = app.add_subcommand("converge", "Body-mesh refinement study against a fine reference");
    ConvergeOptions copt;
    converge->add_option("--levels", copt.factors, "Refinement factors")->expected(3, -1);
    converge->add_option("--reference", copt.reference_factor, "Reference refinement factor");
    converge->add_option("--sweep-constants", copt.constants, "Hybrid constants sweep on the Hertz benchmark");
    auto* lemmas = app.add_subcommand("lemmas", "Randomized complementarity lemma sweeps");
    Index samples = 100000;
    lemmas->add_option("--samples", samples, "Random cases per sweep");
    auto* sweep = app.add_subcommand("stiffness-sweep", "Hybrid string stiffness sweep");
    std::vector<double> stiffness{0.0, 20.0, 200.0};
    sweep->add_option("--stiffness", stiffness, "Stiffness values");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    RunOptions ro;
    ro.out = f.out;
    ro.log = f.quiet ? nullptr : &std::cout;
    try {
        if (*solve) return report(command_solve(configure(f, hertz_scenario()), ro), f.quiet);
        if (*hertz) return report(command_hertz_bench(configure(f, hertz_scenario()), ro), f.quiet);
        if (*patch) return report(command_patch_test(ro, pressure), f.quiet);
        if (*converge) return report(command_converge(configure(f, hertz_convergence_scenario()), copt, ro), f.quiet);
        if (*lemmas) return report(command_lemmas(ro, samples), f.quiet);
        if (*sweep) return report(command_stiffness_sweep(configure(f, string_scenario(0.0)), stiffness, ro), f.quiet);
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const NonConvergenceError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const SolverError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
