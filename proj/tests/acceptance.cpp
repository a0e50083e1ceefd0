// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include "helpers.hpp"

#include "hnc/oracles.hpp"

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>

using namespace hnc;

namespace {

using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = false;
    std::string detail;
};

Real seconds_since(Clock::time_point t0) { return std::chrono::duration<Real>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// Largest S over inequality pairings of every converged run seen so far.
Real g_max_S = -1e300;
Index g_runs = 0;

void record_signs(const System& sys, const Vector& x) {
    const auto& op = sys.contact();
    const auto ev = op.evaluate_all(x);
    for (std::size_t q = 0; q < ev.size(); ++q)
        if (op.pairings()[q].mode == ConstraintMode::Inequality) g_max_S = std::max(g_max_S, ev[q].S);
    ++g_runs;
}

Solved solve_recorded(const Scenario& s) {
    Solved r = solve_scenario(s);
    record_signs(r.system, r.state.x);
    return r;
}

Outcome lemma_sweeps() {
    const auto t0 = Clock::now();
    const SweepResult k = kkt_lemma_sweep(100000);
    const SweepResult a = affine_monotonicity_sweep(100000);
    const Real t = seconds_since(t0);
    return {k.failures == 0 && a.failures == 0 && t < 10.0,
            fmt("kkt %lld cases %lld failures; affine %lld cases %lld failures; %.2f s", (long long)k.cases,
                (long long)k.failures, (long long)a.cases, (long long)a.failures, t)};
}

Outcome b_monotonicity(const System& hertz) {
    const auto& op = hertz.contact();
    std::mt19937_64 rng(2024);
    Index failures = 0;
    Real worst = 1e300;
    for (int k = 0; k < 1000; ++k) {
        // Mix of small and large states so both branches of min(., 0) occur.
        const Real scale = std::pow(10.0, -4.0 + 2.0 * (k % 3));
        const Vector v = test::random_vector(op.dof_count(), rng, scale);
        const Vector w = test::random_vector(op.dof_count(), rng, scale);
        const Vector d = v - w;
        const Real bv = op.b_form(v, d), bw = op.b_form(w, d);
        const Real s = op.s_distance_sq(v, w);
        const Real tol = 1e-10 * std::max({std::abs(bv), std::abs(bw), s, 1e-300});
        const Real slack = bv - bw - s;
        worst = std::min(worst, slack / std::max({std::abs(bv), std::abs(bw), s, 1e-300}));
        if (slack < -tol) ++failures;
    }
    return {failures == 0, fmt("1000 pairs over %zu pairings, %lld failures, worst relative slack %.3e", op.size(),
                               (long long)failures, worst)};
}

Outcome jacobian_consistency() {
    const System sys = build_system(build_setup(test::tiny_hertz()));
    const Index n = sys.layout().total();
    const auto& op = sys.contact();
    const SystemState sol = semismooth_newton(sys, newton_options(test::tiny_hertz()));
    // dSigma_q / dx_j
    DenseMatrix D = DenseMatrix::Zero(static_cast<Index>(op.size()), n);
    for (std::size_t q = 0; q < op.size(); ++q) {
        const auto& p = op.pairings()[q];
        for (int k = 0; k < p.sigma.size; ++k) D(static_cast<Index>(q), p.sigma.idx[static_cast<std::size_t>(k)]) += p.sigma.val[static_cast<std::size_t>(k)];
        for (int k = 0; k < p.jump.size; ++k)
            D(static_cast<Index>(q), p.jump.idx[static_cast<std::size_t>(k)]) -= p.gamma * p.jump.val[static_cast<std::size_t>(k)];
    }
    const Vector colmax = D.cwiseAbs().colwise().maxCoeff();
    std::mt19937_64 rng(7);
    const Real xs = sol.x.cwiseAbs().maxCoeff();
    int states = 0, rejected = 0;
    Real worst = 0.0;
    Index active_min = 1 << 30, active_max = 0;
    while (states < 100) {
        const Vector x = sol.x + test::random_vector(n, rng, 0.5 * xs);
        Real min_abs = 1e300;
        for (const auto& ev : op.evaluate_all(x)) min_abs = std::min(min_abs, std::abs(ev.Sigma));
        if (min_abs < 1e-8) {
            ++rejected;
            continue;
        }
        ++states;
        const auto flags = op.active_set(x);
        Index na = 0;
        for (std::size_t q = 0; q < flags.size(); ++q) na += op.pairings()[q].mode == ConstraintMode::Inequality && flags[q];
        active_min = std::min(active_min, na);
        active_max = std::max(active_max, na);
        const DenseMatrix J(sys.jacobian(flags));
        DenseMatrix F(n, n);
        for (Index j = 0; j < n; ++j) {
            const Real h = colmax(j) > 0.0 ? std::min(1e-6, 0.5 * min_abs / colmax(j)) : 1e-6;
            Vector xp = x, xm = x;
            xp(j) += h;
            xm(j) -= h;
            F.col(j) = (sys.residual(xp) - sys.residual(xm)) / (2 * h);
        }
        worst = std::max(worst, test::rel_max_diff(J, F));
    }
    return {n <= 300 && worst <= 1e-6,
            fmt("%lld unknowns, 100 states (%d rejected), active inequality pairings %lld..%lld, worst rel. error %.2e",
                (long long)n, rejected, (long long)active_min, (long long)active_max, worst)};
}

Outcome patch_tests() {
    const PatchResult eq = run_patch_test(ConstraintMode::Equality, 1.0);
    const PatchResult in = run_patch_test(ConstraintMode::Inequality, 1.0);
    solve_recorded(patch_scenario(ConstraintMode::Inequality, 1.0));
    return {eq.max_sigma_error <= 1e-8 && in.max_sigma_error <= 1e-8 && eq.iterations <= 1 && in.iterations <= 3,
            fmt("equality |Sigma+1| %.2e in %d it; inequality %.2e in %d it", eq.max_sigma_error, eq.iterations,
                in.max_sigma_error, in.iterations)};
}

struct HertzRun {
    Solved solved;
    Real seconds = 0.0;
};

Outcome hertz_benchmark(const HertzRun& run, const Scenario& s) {
    const System& sys = run.solved.system;
    const auto prof = pressure_profile(sys, run.solved.state.x, 1);
    const ContactMetrics m = contact_metrics(prof);
    const HertzSolution h = hertz_for(s);
    Index across = 1 << 30;
    for (int b = 1; b <= 2; ++b) {
        Index c = 0;
        for (Index f : sys.body(b).mesh.facets_with_tag(FacetTag::Contact))
            if (std::abs(sys.body(b).mesh.facet_point(f, 0.5).x()) < h.a) ++c;
        across = std::min(across, c);
    }
    const Real ep = std::abs(m.p_max - h.p_max) / h.p_max;
    const Real ea = std::abs(m.half_width - h.a) / h.a;
    const Real ef = std::abs(m.force + h.P) / h.P;
    const int it = run.solved.state.iterations;
    return {it <= 25 && ep <= 0.15 && ea <= 0.20 && ef <= 0.05 && run.seconds < 60.0 && across >= 40,
            fmt("%lld dofs, %d it, %.1f s; p_max %.2f vs %.2f (%.1f%%); a %.4f vs %.4f (%.1f%%); force %.4f (%.1e); "
                "min facets across zone %lld",
                (long long)sys.layout().total(), it, run.seconds, m.p_max, h.p_max, 100 * ep, m.half_width, h.a,
                100 * ea, m.force, ef, (long long)across)};
}

Outcome constants_trend(const HertzRun& full, const Scenario& base) {
    const HertzSolution h = hertz_for(base);
    std::vector<Real> err;
    std::string d;
    for (Index c : {50, 100}) {
        const Solved r = solve_recorded(hertz_scenario(c));
        err.push_back(pressure_l2_error(pressure_profile(r.system, r.state.x, 1), h));
        d += fmt("%lld: %.3f; ", (long long)c, err.back());
    }
    err.push_back(pressure_l2_error(pressure_profile(full.solved.system, full.solved.state.x, 1), h));
    d += fmt("1000: %.3f", err.back());
    return {err[0] > err[1] && err[1] > err[2], "L2 pressure error " + d};
}

Outcome energy_rate() {
    const ConvergenceReport r = convergence_study(hertz_convergence_scenario(), {1, 2, 4}, 8);
    if (!r.complete) return {false, r.error};
    std::string d = fmt("rate %.3f; levels", r.energy_rate);
    for (const auto& l : r.levels) d += fmt(" (h %.4f, e %.4f)", l.h, l.energy_error);
    return {r.energy_rate >= 0.8 && r.energy_rate <= 1.2, d};
}

Outcome string_stiffening() {
    const std::vector<Real> ks{0.0, 20.0, 200.0};
    std::vector<Real> down;
    Vector x0;
    for (Real k : ks) {
        const Solved r = solve_recorded(string_scenario(k));
        down.push_back(max_downward_displacement(r.system, r.state.x, 1));
        if (k == 0.0) x0 = r.state.x;
    }
    Scenario none = string_scenario(0.0);
    none.hybrid.model = HybridModelKind::None;
    const Solved c1 = solve_recorded(none);
    const Real diff = (c1.state.x - x0).cwiseAbs().maxCoeff();
    return {down[0] > down[1] && down[1] > down[2] && diff <= 1e-10,
            fmt("max downward %.6f > %.6f > %.6f; |k=0 minus no model| %.1e", down[0], down[1], down[2], diff)};
}

Outcome gamma_robustness(const HertzRun& c10) {
    Scenario s100 = with_gamma_mult(hertz_scenario(), 100.0);
    Scenario s1000 = with_gamma_mult(hertz_scenario(), 1000.0);
    s100.solver.max_iter = 60;
    s1000.solver.max_iter = 60;
    const Solved a = solve_recorded(s100);
    const Solved b = solve_recorded(s1000);
    const Real ea = std::sqrt(a.system.energy_norm_sq(a.state.x));
    const Real eb = std::sqrt(b.system.energy_norm_sq(b.state.x));
    const Real e10 = std::sqrt(c10.solved.system.energy_norm_sq(c10.solved.state.x));
    const Real rel = std::abs(ea - eb) / eb;
    return {rel < 0.05, fmt("energy norm c=10 %.5f (%d it), c=100 %.5f (%d it), c=1000 %.5f (%d it); 100 vs 1000 %.2f%%",
                            e10, c10.solved.state.iterations, ea, a.state.iterations, eb, b.state.iterations, 100 * rel)};
}

}  // namespace

int main() {
    int failed = 0;
    std::map<int, std::string> lines;
    auto report = [&](int id, const char* name, const std::function<Outcome()>& f) {
        const auto t0 = Clock::now();
        Outcome o;
        try {
            o = f();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failed;
        lines[id] = std::string(o.pass ? "PASS" : "FAIL") + " " + std::to_string(id) + " " + name + ": " + o.detail +
                    fmt(" [%.1f s]", seconds_since(t0));
        std::cerr << lines[id] << std::endl;
    };

    const Scenario hertz = hertz_scenario();
    HertzRun c10;
    {
        const auto t0 = Clock::now();
        c10.solved = solve_recorded(hertz);
        c10.seconds = seconds_since(t0);
    }

    report(1, "complementarity lemma sweeps", lemma_sweeps);
    report(2, "monotonicity of b", [&] { return b_monotonicity(c10.solved.system); });
    report(3, "Jacobian against finite differences", jacobian_consistency);
    report(4, "patch test", patch_tests);
    report(5, "Hertz benchmark", [&] { return hertz_benchmark(c10, hertz); });
    report(6, "pressure error over hybrid constants", [&] { return constants_trend(c10, hertz); });
    report(7, "energy-norm convergence rate", energy_rate);
    report(9, "string stiffening", string_stiffening);
    report(10, "gamma robustness", [&] { return gamma_robustness(c10); });
    report(8, "S <= 0 in inequality runs", [&] {
        return Outcome{g_max_S <= 0.0, fmt("max S %.3e over %lld converged runs", g_max_S, (long long)g_runs)};
    });
    std::cout << "\n";
    for (const auto& [id, line] : lines) std::cout << line << "\n";
    std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
    return failed == 0 ? 0 : 1;
}
