#include "hnc/run.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>

namespace hnc {

namespace fs = std::filesystem;

void write_vtk(std::ostream& out, const BodyMesh& mesh, const Vector& displacement, const std::string& title) {
    const auto old = out.precision(12);
    const int nv = mesh.nodes_per_element();
    out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.node_count() << " double\n";
    for (const auto& p : mesh.nodes()) out << p.x() << " " << p.y() << " 0\n";
    out << "CELLS " << mesh.element_count() << " " << mesh.element_count() * (nv + 1) << "\n";
    for (Index e = 0; e < mesh.element_count(); ++e) {
        out << nv;
        for (Index n : mesh.element(e)) out << " " << n;
        out << "\n";
    }
    out << "CELL_TYPES " << mesh.element_count() << "\n";
    const int cell_type = mesh.element_type() == ElementType::Triangle ? 5 : 9;
    for (Index e = 0; e < mesh.element_count(); ++e) out << cell_type << "\n";
    out << "POINT_DATA " << mesh.node_count() << "\nVECTORS displacement double\n";
    for (Index n = 0; n < mesh.node_count(); ++n) out << displacement(2 * n) << " " << displacement(2 * n + 1) << " 0\n";
    out.precision(old);
}

void write_pressure_csv(std::ostream& out, const std::vector<PressureSample>& profile) {
    const auto old = out.precision(12);
    out << "x,y,Sigma,sigma_n,S,active\n";
    for (const auto& p : profile)
        out << p.z.x() << "," << p.z.y() << "," << p.Sigma << "," << p.sigma_n << "," << p.S << "," << (p.active ? 1 : 0)
            << "\n";
    out.precision(old);
}

void write_hertz_csv(std::ostream& out, const std::vector<PressureSample>& profile, const HertzSolution& hertz) {
    const auto old = out.precision(12);
    out << "x,Sigma,sigma_n,hertz_p\n";
    for (const auto& p : profile)
        out << p.z.x() << "," << p.Sigma << "," << p.sigma_n << "," << hertz.pressure(p.z.x()) << "\n";
    out.precision(old);
}

namespace {

class Outputs {
public:
    explicit Outputs(const RunOptions& opt) : dir_(opt.out) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory " + dir_.string() + ": " + ec.message());
    }

    template <class F>
    void write(RunResult& r, const std::string& name, F&& fill) {
        const fs::path path = dir_ / name;
        std::ofstream f(path);
        if (!f) throw Error("cannot write " + path.string());
        fill(f);
        if (!f) throw Error("write failed: " + path.string());
        r.files.push_back(path);
    }

    void summary(RunResult& r, const std::ostringstream& s) {
        r.summary = s.str();
        write(r, "summary.txt", [&](std::ostream& f) { f << r.summary; });
    }

private:
    fs::path dir_;
};

std::ostringstream summary_stream() {
    std::ostringstream s;
    s.precision(10);
    return s;
}

// Solves and writes the iteration log even when Newton fails.
Solved solve_logged(const Scenario& s, Outputs& out, RunResult& r, const RunOptions& opt) {
    try {
        Solved sol = solve_scenario(s, opt.log);
        out.write(r, "iterations.log", [&](std::ostream& f) { write_iteration_log(f, sol.state.log); });
        return sol;
    } catch (const NonConvergenceError& e) {
        out.write(r, "iterations.log", [&](std::ostream& f) { write_iteration_log(f, e.log()); });
        throw;
    }
}

void write_bodies(const Solved& sol, Outputs& out, RunResult& r, const std::string& suffix = "") {
    for (int b = 1; b <= 2; ++b) {
        const std::string name = "body" + std::to_string(b) + suffix;
        out.write(r, name + ".vtk", [&](std::ostream& f) {
            write_vtk(f, sol.system.body(b).mesh, sol.system.layout().body_displacement(b, sol.state.x), name);
        });
    }
}

void solve_summary(std::ostream& s, const Scenario& sc, const Solved& sol, const ContactMetrics& m) {
    s << "scenario = " << sc.name << "\n";
    s << "dofs = " << sol.system.layout().total() << "\n";
    s << "pairings = " << sol.system.pairings().size() << "\n";
    s << "iterations = " << sol.state.iterations << "\n";
    s << "residual = " << sol.state.log.back().residual << "\n";
    s << "energy_norm = " << std::sqrt(sol.system.energy_norm_sq(sol.state.x)) << "\n";
    s << "max_abs_Sigma = " << m.max_abs_Sigma << "\n";
    s << "active_fraction = " << m.active_fraction << "\n";
    s << "contact_force = " << m.force << "\n";
    s << "p_max = " << m.p_max << "\n";
    s << "max_S_inequality = " << m.max_S << "\n";
    if (sol.state.negative_pivots >= 0) s << "negative_directions = " << sol.state.negative_pivots << "\n";
}

void say(const RunOptions& opt, const std::string& line) {
    if (opt.log) *opt.log << line << "\n";
}

}  // namespace

RunResult command_solve(const Scenario& s, const RunOptions& opt) {
    Outputs out(opt);
    RunResult r;
    const Solved sol = solve_logged(s, out, r, opt);
    write_bodies(sol, out, r);
    const auto prof = pressure_profile(sol.system, sol.state.x, 1);
    out.write(r, "pressure.csv", [&](std::ostream& f) { write_pressure_csv(f, prof); });
    const ContactMetrics m = contact_metrics(prof);
    auto sum = summary_stream();
    solve_summary(sum, s, sol, m);
    r.pass = m.max_S <= 0.0;
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

RunResult command_hertz_bench(const Scenario& s, const RunOptions& opt) {
    Outputs out(opt);
    RunResult r;
    const HertzSolution hz = hertz_for(s);
    const Solved sol = solve_logged(s, out, r, opt);
    write_bodies(sol, out, r);
    const auto prof = pressure_profile(sol.system, sol.state.x, 1);
    out.write(r, "pressure.csv", [&](std::ostream& f) { write_hertz_csv(f, prof, hz); });
    const ContactMetrics m = contact_metrics(prof);

    const Real p_err = std::abs(m.p_max - hz.p_max) / hz.p_max;
    const Real a_err = std::abs(m.half_width - hz.a) / hz.a;
    const Real f_err = std::abs(m.force + hz.P) / hz.P;
    r.pass = p_err <= 0.15 && a_err <= 0.20 && f_err <= 0.05 && m.max_S <= 0.0;

    auto sum = summary_stream();
    solve_summary(sum, s, sol, m);
    sum << "hybrid_constants = " << s.hybrid.count << "\n";
    sum << "hertz_p_max = " << hz.p_max << "\n";
    sum << "p_max_rel_error = " << p_err << "\n";
    sum << "half_width = " << m.half_width << "\n";
    sum << "hertz_a = " << hz.a << "\n";
    sum << "half_width_rel_error = " << a_err << "\n";
    sum << "hertz_load = " << -hz.P << "\n";
    sum << "force_rel_error = " << f_err << "\n";
    sum << "pressure_l2_error = " << pressure_l2_error(prof, hz) << "\n";
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

RunResult command_patch_test(const RunOptions& opt, Real pressure) {
    Outputs out(opt);
    RunResult r;
    auto sum = summary_stream();
    sum << "pressure = " << pressure << "\n";
    for (ConstraintMode mode : {ConstraintMode::Equality, ConstraintMode::Inequality}) {
        const PatchResult p = run_patch_test(mode, pressure);
        const int limit = mode == ConstraintMode::Equality ? 1 : 3;
        const bool ok = p.max_sigma_error <= 1e-8 && p.iterations <= limit;
        r.pass = r.pass && ok;
        const std::string k(to_string(mode));
        sum << k << ".max_sigma_error = " << p.max_sigma_error << "\n";
        sum << k << ".max_jump = " << p.max_jump << "\n";
        sum << k << ".iterations = " << p.iterations << "\n";
        sum << k << ".pairings = " << p.pairings << "\n";
        sum << k << ".pass = " << (ok ? "true" : "false") << "\n";
        say(opt, k + ": max |Sigma + p| = " + std::to_string(p.max_sigma_error));
    }
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

RunResult command_converge(const Scenario& base, const ConvergeOptions& copt, const RunOptions& opt) {
    Outputs out(opt);
    RunResult r;
    say(opt, "convergence study: reference x" + std::to_string(copt.reference_factor));
    const ConvergenceReport rep = convergence_study(base, copt.factors, copt.reference_factor);
    out.write(r, "convergence.csv", [&](std::ostream& f) { write_convergence_csv(f, rep); });
    auto sum = summary_stream();
    sum << "scenario = " << base.name << "\n";
    sum << "reference_factor = " << rep.reference_factor << "\n";
    sum << "levels = " << rep.levels.size() << "\n";
    sum << "complete = " << (rep.complete ? "true" : "false") << "\n";
    if (!rep.complete) sum << "error = " << rep.error << "\n";
    sum << "energy_rate = " << rep.energy_rate << "\n";
    sum << "pressure_rate = " << rep.pressure_rate << "\n";
    r.pass = rep.complete && rep.levels.size() >= 3 && rep.energy_rate >= copt.min_rate &&
             rep.energy_rate <= copt.max_rate;

    if (!copt.constants.empty()) {
        say(opt, "hybrid constants sweep");
        const auto pts = constants_sweep(copt.sweep_base, copt.constants);
        out.write(r, "constants.csv", [&](std::ostream& f) {
            f << std::setprecision(12) << "constants,pressure_l2,p_max,iterations\n";
            for (const auto& p : pts) f << p.constants << "," << p.pressure_l2 << "," << p.p_max << "," << p.iterations << "\n";
        });
        bool decreasing = true;
        for (std::size_t k = 1; k < pts.size(); ++k) decreasing = decreasing && pts[k].pressure_l2 < pts[k - 1].pressure_l2;
        sum << "constants_monotone = " << (decreasing ? "true" : "false") << "\n";
        r.pass = r.pass && decreasing;
    }
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

RunResult command_lemmas(const RunOptions& opt, Index samples) {
    Outputs out(opt);
    RunResult r;
    const SweepResult kkt = kkt_lemma_sweep(samples);
    const SweepResult aff = affine_monotonicity_sweep(samples);
    r.pass = kkt.failures == 0 && aff.failures == 0;
    auto sum = summary_stream();
    sum << "kkt.cases = " << kkt.cases << "\nkkt.failures = " << kkt.failures << "\n";
    sum << "affine.cases = " << aff.cases << "\naffine.failures = " << aff.failures << "\n";
    sum << "affine.worst_slack = " << aff.worst_slack << "\n";
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

RunResult command_stiffness_sweep(const Scenario& base, const std::vector<Real>& stiffness, const RunOptions& opt) {
    Outputs out(opt);
    RunResult r;
    const auto pts = stiffness_sweep(base, stiffness);
    out.write(r, "stiffness.csv", [&](std::ostream& f) {
        f << std::setprecision(12) << "stiffness,max_down,iterations\n";
        for (const auto& p : pts) f << p.stiffness << "," << p.max_down << "," << p.iterations << "\n";
    });

    // Geometry is shared by every point, so one system serves the VTK output.
    const System sys = build_system(build_setup(base));
    for (const auto& p : pts) {
        std::ostringstream name;
        name << "body1_k" << p.stiffness;
        out.write(r, name.str() + ".vtk", [&](std::ostream& f) {
            write_vtk(f, sys.body(1).mesh, sys.layout().body_displacement(1, p.x), name.str());
        });
    }

    bool decreasing = true;
    for (std::size_t k = 1; k < pts.size(); ++k) decreasing = decreasing && pts[k].max_down < pts[k - 1].max_down;
    auto sum = summary_stream();
    sum << "scenario = " << base.name << "\n";
    for (const auto& p : pts) sum << "max_down[" << p.stiffness << "] = " << p.max_down << "\n";
    sum << "strictly_decreasing = " << (decreasing ? "true" : "false") << "\n";
    r.pass = decreasing;

    for (const auto& p : pts) {
        if (p.stiffness != 0.0) continue;
        Scenario none = base;
        none.hybrid.model = HybridModelKind::None;
        none.hybrid.stiffness = 0.0;
        const Solved ref = solve_scenario(none);
        const auto& L0 = ref.system.layout();
        const auto& L1 = sys.layout();
        Real diff = (L0.hybrid_dofs(ref.state.x) - L1.hybrid_dofs(p.x)).cwiseAbs().maxCoeff();
        for (int b = 1; b <= 2; ++b)
            diff = std::max(diff, (L0.body_displacement(b, ref.state.x) - L1.body_displacement(b, p.x)).cwiseAbs().maxCoeff());
        sum << "zero_stiffness_max_diff = " << diff << "\n";
        r.pass = r.pass && diff <= 1e-10;
    }
    sum << "pass = " << (r.pass ? "true" : "false") << "\n";
    out.summary(r, sum);
    return r;
}

}  // namespace hnc
