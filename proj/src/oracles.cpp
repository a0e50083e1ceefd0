#include "hnc/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

namespace hnc {

Real HertzSolution::pressure(Real x) const {
    if (std::abs(x) >= a) return 0.0;
    return p_max * std::sqrt(1.0 - (x * x) / (a * a));
}

HertzSolution hertz_oracle(Real P, Real R, Real E1, Real nu1, Real E2, Real nu2) {
    lame_plane_strain(E1, nu1);
    lame_plane_strain(E2, nu2);
    if (!(P > 0.0) || !(R > 0.0)) throw ValidationError("hertz: need P > 0 and R > 0");
    HertzSolution h;
    h.P = P;
    h.R = R;
    h.E_star = 1.0 / ((1.0 - nu1 * nu1) / E1 + (1.0 - nu2 * nu2) / E2);
    h.a = std::sqrt(4.0 * P * R / (std::numbers::pi * h.E_star));
    h.p_max = 2.0 * P / (std::numbers::pi * h.a);
    return h;
}

bool kkt_lemma_check(Real a, Real b) {
    const bool complementarity = a <= 0.0 && b <= 0.0 && a * b == 0.0;
    const bool fixed_point = a == std::min(a - b, 0.0);
    return complementarity == fixed_point;
}

bool affine_monotonicity_check(const DenseMatrix& M, const Vector& c, const Vector& v, const Vector& w, Real* slack) {
    const Vector dv = M * (v - w);
    const Vector Bv = (M * v + c).cwiseMin(0.0);
    const Vector Bw = (M * w + c).cwiseMin(0.0);
    const Vector d = Bv - Bw;
    const Real lhs = d.squaredNorm();
    const Real rhs = d.dot(dv);
    const Real scale = d.norm() * dv.norm() + lhs;
    if (slack) *slack = rhs - lhs;
    return rhs - lhs >= -1e-12 * scale;
}

SweepResult kkt_lemma_sweep(Index random_pairs, std::uint64_t seed) {
    SweepResult r;
    for (int i = -8; i <= 8; ++i) {
        for (int j = -8; j <= 8; ++j) {
            ++r.cases;
            if (!kkt_lemma_check(0.25 * i, 0.25 * j)) ++r.failures;
        }
    }
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<Real> val(-2.0, 2.0);
    std::uniform_int_distribution<int> branch(0, 3);
    for (Index k = 0; k < random_pairs; ++k) {
        // A quarter of the coordinates are exact zeros so every branch is hit.
        const Real a = branch(rng) == 0 ? 0.0 : val(rng);
        const Real b = branch(rng) == 0 ? 0.0 : val(rng);
        ++r.cases;
        if (!kkt_lemma_check(a, b)) ++r.failures;
    }
    return r;
}

SweepResult affine_monotonicity_sweep(Index instances, std::uint64_t seed) {
    SweepResult r;
    r.worst_slack = std::numeric_limits<Real>::infinity();
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> dim(1, 64);
    std::uniform_real_distribution<Real> val(-1.0, 1.0);
    auto fill = [&](auto& m) {
        for (Index k = 0; k < m.size(); ++k) m.data()[k] = val(rng);
    };
    for (Index k = 0; k < instances; ++k) {
        const int n = dim(rng);
        DenseMatrix M(n, n);
        Vector c(n), v(n), w(n);
        fill(M);
        fill(c);
        fill(v);
        fill(w);
        Real slack = 0.0;
        ++r.cases;
        if (!affine_monotonicity_check(M, c, v, w, &slack)) ++r.failures;
        r.worst_slack = std::min(r.worst_slack, slack);
    }
    return r;
}

std::vector<PressureSample> pressure_profile(const System& sys, const Vector& x, int body) {
    std::vector<PressureSample> out;
    const auto& pairings = sys.pairings();
    for (std::size_t q = 0; q < pairings.size(); ++q) {
        if (pairings[q].body != body) continue;
        const auto ev = sys.contact().evaluate(q, x);
        out.push_back({pairings[q].z, pairings[q].weight, ev.Sigma, ev.sigma_n, ev.S, ev.active, pairings[q].mode});
    }
    return out;
}

ContactMetrics contact_metrics(const std::vector<PressureSample>& profile) {
    ContactMetrics m;
    if (profile.empty()) return m;
    m.max_S = -std::numeric_limits<Real>::infinity();
    Index active = 0;
    for (const auto& p : profile) {
        m.p_max = std::max(m.p_max, -p.Sigma);
        m.force += p.weight * p.S;
        m.max_abs_Sigma = std::max(m.max_abs_Sigma, std::abs(p.Sigma));
        if (p.mode == ConstraintMode::Inequality) m.max_S = std::max(m.max_S, p.S);
        if (p.active) ++active;
    }
    if (m.max_S == -std::numeric_limits<Real>::infinity()) m.max_S = 0.0;
    for (const auto& p : profile)
        if (p.Sigma < -0.01 * m.p_max) m.half_width = std::max(m.half_width, std::abs(p.z.x()));
    m.active_fraction = static_cast<Real>(active) / static_cast<Real>(profile.size());
    return m;
}

Real pressure_l2_error(const std::vector<PressureSample>& profile, const HertzSolution& hertz) {
    Real e = 0.0;
    for (const auto& p : profile) {
        const Real d = -p.S - hertz.pressure(p.z.x());
        e += p.weight * d * d;
    }
    return std::sqrt(e);
}

HertzSolution hertz_for(const Scenario& s) {
    const auto& disc = s.bodies[0];
    const auto& block = s.bodies[1];
    const Real P = -disc.traction.y() * 2.0 * disc.disc.radius;
    return hertz_oracle(P, disc.disc.radius, disc.E, disc.nu, block.E, block.nu);
}

PatchResult run_patch_test(ConstraintMode mode, Real pressure) {
    const Scenario s = patch_scenario(mode, pressure);
    const Solved sol = solve_scenario(s);
    PatchResult r;
    r.iterations = sol.state.iterations;
    const auto ev = sol.system.contact().evaluate_all(sol.state.x);
    for (const auto& e : ev) {
        r.max_sigma_error = std::max(r.max_sigma_error, std::abs(e.Sigma + pressure));
        r.max_jump = std::max(r.max_jump, std::abs(e.jump));
    }
    r.pairings = static_cast<Index>(ev.size());
    return r;
}

namespace {

// Reference coordinates of p in element e and how far outside it they lie.
std::pair<Vec2, Real> inverse_map(const BodyMesh& mesh, Index e, const Vec2& p) {
    const auto c = mesh.element_coords(e);
    if (mesh.element_type() == ElementType::Triangle) {
        Mat2 J;
        J.col(0) = c[1] - c[0];
        J.col(1) = c[2] - c[0];
        const Vec2 r = J.inverse() * (p - c[0]);
        const Real out = std::max({-r.x(), -r.y(), r.x() + r.y() - 1.0, 0.0});
        return {r, out};
    }
    Vec2 r = Vec2::Zero();
    for (int it = 0; it < 30; ++it) {
        Vec2 x = Vec2::Zero();
        Mat2 J = Mat2::Zero();
        for (int a = 0; a < 4; ++a) {
            const Vec2 ra = reference_vertex(ElementType::Quad, a);
            const Real sx = 1.0 + ra.x() * r.x(), sy = 1.0 + ra.y() * r.y();
            x += 0.25 * sx * sy * c[static_cast<std::size_t>(a)];
            J.col(0) += 0.25 * ra.x() * sy * c[static_cast<std::size_t>(a)];
            J.col(1) += 0.25 * ra.y() * sx * c[static_cast<std::size_t>(a)];
        }
        const Vec2 d = J.inverse() * (p - x);
        r += d;
        if (d.norm() < 1e-14) break;
    }
    const Real out = std::max({std::abs(r.x()) - 1.0, std::abs(r.y()) - 1.0, 0.0});
    return {r, out};
}

}  // namespace

PointLocator::PointLocator(const BodyMesh& mesh) : mesh_(&mesh) {
    Vec2 lo = mesh.node(0), hi = mesh.node(0);
    for (const auto& p : mesh.nodes()) {
        lo = lo.cwiseMin(p);
        hi = hi.cwiseMax(p);
    }
    const Index n = std::max<Index>(1, static_cast<Index>(std::sqrt(static_cast<Real>(mesh.element_count()))));
    nx_ = ny_ = n;
    lo_ = lo;
    cell_ = ((hi - lo) / static_cast<Real>(n)).cwiseMax(1e-300);
    buckets_.assign(static_cast<std::size_t>(nx_ * ny_), {});
    auto cell_of = [&](Real v, Real l, Real h, Index m) {
        return std::clamp<Index>(static_cast<Index>(std::floor((v - l) / h)), 0, m - 1);
    };
    for (Index e = 0; e < mesh.element_count(); ++e) {
        Vec2 elo = mesh.node(mesh.element(e)[0]), ehi = elo;
        for (Index v : mesh.element(e)) {
            elo = elo.cwiseMin(mesh.node(v));
            ehi = ehi.cwiseMax(mesh.node(v));
        }
        for (Index i = cell_of(elo.x(), lo_.x(), cell_.x(), nx_); i <= cell_of(ehi.x(), lo_.x(), cell_.x(), nx_); ++i)
            for (Index j = cell_of(elo.y(), lo_.y(), cell_.y(), ny_); j <= cell_of(ehi.y(), lo_.y(), cell_.y(), ny_); ++j)
                buckets_[static_cast<std::size_t>(j * nx_ + i)].push_back(e);
    }
}

std::pair<Index, Vec2> PointLocator::locate(const Vec2& p) const {
    const Index ci = std::clamp<Index>(static_cast<Index>(std::floor((p.x() - lo_.x()) / cell_.x())), 0, nx_ - 1);
    const Index cj = std::clamp<Index>(static_cast<Index>(std::floor((p.y() - lo_.y()) / cell_.y())), 0, ny_ - 1);
    Index best = -1;
    Vec2 best_r = Vec2::Zero();
    Real best_out = std::numeric_limits<Real>::infinity();
    auto scan = [&](const std::vector<Index>& elems) {
        for (Index e : elems) {
            const auto [r, out] = inverse_map(*mesh_, e, p);
            if (out < best_out) {
                best_out = out;
                best = e;
                best_r = r;
            }
        }
    };
    for (int ring = 0; ring <= 2 && best_out > 1e-12; ++ring) {
        for (Index i = ci - ring; i <= ci + ring; ++i) {
            for (Index j = cj - ring; j <= cj + ring; ++j) {
                if (i < 0 || j < 0 || i >= nx_ || j >= ny_) continue;
                if (std::max(std::abs(i - ci), std::abs(j - cj)) != ring) continue;
                scan(buckets_[static_cast<std::size_t>(j * nx_ + i)]);
            }
        }
    }
    if (best < 0) {
        std::vector<Index> all(static_cast<std::size_t>(mesh_->element_count()));
        for (Index e = 0; e < mesh_->element_count(); ++e) all[static_cast<std::size_t>(e)] = e;
        scan(all);
    }
    return {best, best_r};
}

Vec2 PointLocator::evaluate(const Vector& u, const Vec2& p) const {
    const auto [e, r] = locate(p);
    const int nv = mesh_->nodes_per_element();
    std::array<Real, 4> N{};
    if (mesh_->element_type() == ElementType::Triangle) {
        N = {1.0 - r.x() - r.y(), r.x(), r.y(), 0.0};
    } else {
        for (int a = 0; a < 4; ++a) {
            const Vec2 ra = reference_vertex(ElementType::Quad, a);
            N[static_cast<std::size_t>(a)] = 0.25 * (1.0 + ra.x() * r.x()) * (1.0 + ra.y() * r.y());
        }
    }
    Vec2 out = Vec2::Zero();
    const auto nodes = mesh_->element(e);
    for (int a = 0; a < nv; ++a) {
        const Index n = nodes[static_cast<std::size_t>(a)];
        out += N[static_cast<std::size_t>(a)] * Vec2(u(2 * n), u(2 * n + 1));
    }
    return out;
}

Real fitted_rate(const std::vector<Real>& h, const std::vector<Real>& e) {
    const std::size_t n = std::min(h.size(), e.size());
    if (n < 2) return std::numeric_limits<Real>::quiet_NaN();
    Real mx = 0, my = 0;
    for (std::size_t k = 0; k < n; ++k) {
        mx += std::log(h[k]);
        my += std::log(e[k]);
    }
    mx /= static_cast<Real>(n);
    my /= static_cast<Real>(n);
    Real sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Real dx = std::log(h[k]) - mx;
        sxy += dx * (std::log(e[k]) - my);
        sxx += dx * dx;
    }
    return sxy / sxx;
}

namespace {

// Largest element diameter over both bodies.
Real mesh_h(const System& sys) {
    Real h = 0.0;
    for (int b = 1; b <= 2; ++b) {
        const auto& mesh = sys.body(b).mesh;
        const int nv = mesh.nodes_per_element();
        for (Index e = 0; e < mesh.element_count(); ++e) {
            const auto c = mesh.element_coords(e);
            for (int i = 0; i < nv; ++i)
                for (int j = i + 1; j < nv; ++j) h = std::max(h, (c[i] - c[j]).norm());
        }
    }
    return h;
}

// Piecewise-linear interpolant of S over x, from samples sorted by x.
Real interpolate_S(const std::vector<std::pair<Real, Real>>& xs, Real x) {
    if (x <= xs.front().first) return xs.front().second;
    if (x >= xs.back().first) return xs.back().second;
    auto it = std::lower_bound(xs.begin(), xs.end(), std::pair<Real, Real>{x, -std::numeric_limits<Real>::infinity()});
    const auto& b = *it;
    const auto& a = *(it - 1);
    if (b.first == a.first) return b.second;
    const Real t = (x - a.first) / (b.first - a.first);
    return (1.0 - t) * a.second + t * b.second;
}

}  // namespace

ConvergenceReport convergence_study(const Scenario& base, const std::vector<Index>& factors, Index reference_factor) {
    if (factors.size() < 3) throw ValidationError("convergence study needs at least 3 levels");
    ConvergenceReport rep;
    rep.reference_factor = reference_factor;
    Solved ref;
    try {
        ref = solve_scenario(refined(base, reference_factor));
    } catch (const Error& e) {
        rep.complete = false;
        rep.error = "reference level x" + std::to_string(reference_factor) + ": " + e.what();
        return rep;
    }
    const System& R = ref.system;
    std::array<Vector, 2> u_ref{R.layout().body_displacement(1, ref.state.x), R.layout().body_displacement(2, ref.state.x)};
    const Vector h_ref = R.layout().hybrid_dofs(ref.state.x);
    std::vector<std::pair<Real, Real>> s_ref;
    for (const auto& p : pressure_profile(R, ref.state.x, 1)) s_ref.emplace_back(p.z.x(), p.S);
    std::sort(s_ref.begin(), s_ref.end());

    for (Index f : factors) {
        ConvergenceLevel lv;
        lv.factor = f;
        Solved sol;
        try {
            sol = solve_scenario(refined(base, f));
        } catch (const Error& e) {
            rep.complete = false;
            rep.error = "level x" + std::to_string(f) + ": " + e.what();
            break;
        }
        const System& S = sol.system;
        lv.h = mesh_h(S);
        lv.dofs = S.layout().total();
        lv.iterations = sol.state.iterations;
        Real energy = 0.0;
        for (int b = 1; b <= 2; ++b) {
            const Vector u = S.layout().body_displacement(b, sol.state.x);
            const PointLocator loc(S.body(b).mesh);
            const auto& fine = R.body(b).mesh;
            Vector e = u_ref[static_cast<std::size_t>(b - 1)];
            for (Index n = 0; n < fine.node_count(); ++n) {
                const Vec2 v = loc.evaluate(u, fine.node(n));
                e(2 * n) -= v.x();
                e(2 * n + 1) -= v.y();
            }
            energy += e.dot(R.body_stiffness(b) * e);
        }
        if (R.has_a0()) {
            const Vector e = h_ref - S.layout().hybrid_dofs(sol.state.x);
            energy += e.dot(R.a0() * e);
        }
        lv.energy_error = std::sqrt(std::max(energy, 0.0));
        Real pl2 = 0.0;
        for (const auto& p : pressure_profile(S, sol.state.x, 1)) {
            const Real d = p.S - interpolate_S(s_ref, p.z.x());
            pl2 += p.weight * d * d;
        }
        lv.pressure_l2 = std::sqrt(pl2);
        rep.levels.push_back(lv);
    }
    std::vector<Real> h, ee, pe;
    for (const auto& lv : rep.levels) {
        h.push_back(lv.h);
        ee.push_back(lv.energy_error);
        pe.push_back(lv.pressure_l2);
    }
    rep.energy_rate = fitted_rate(h, ee);
    rep.pressure_rate = fitted_rate(h, pe);
    return rep;
}

void write_convergence_csv(std::ostream& out, const ConvergenceReport& report) {
    out << "level,h,energy_error,pressure_l2,rate\n";
    const auto old = out.precision(12);
    for (std::size_t k = 0; k < report.levels.size(); ++k) {
        const auto& lv = report.levels[k];
        out << lv.factor << "," << lv.h << "," << lv.energy_error << "," << lv.pressure_l2 << ",";
        if (k > 0) {
            const auto& pv = report.levels[k - 1];
            out << std::log(lv.energy_error / pv.energy_error) / std::log(lv.h / pv.h);
        }
        out << "\n";
    }
    out.precision(old);
}

std::vector<ConstantsPoint> constants_sweep(const Scenario& base, const std::vector<Index>& constants) {
    const HertzSolution hertz = hertz_for(base);
    std::vector<ConstantsPoint> out;
    for (Index n : constants) {
        Scenario s = base;
        s.hybrid.count = n;
        const Solved sol = solve_scenario(s);
        const auto prof = pressure_profile(sol.system, sol.state.x, 1);
        out.push_back({n, pressure_l2_error(prof, hertz), contact_metrics(prof).p_max, sol.state.iterations});
    }
    return out;
}

Real max_downward_displacement(const System& sys, const Vector& x, int body) {
    const Vector u = sys.layout().body_displacement(body, x);
    Real m = -std::numeric_limits<Real>::infinity();
    for (Index n = 0; 2 * n + 1 < u.size(); ++n) m = std::max(m, -u(2 * n + 1));
    return m;
}

std::vector<StiffnessPoint> stiffness_sweep(const Scenario& base, const std::vector<Real>& stiffness) {
    std::vector<StiffnessPoint> out;
    for (Real k : stiffness) {
        Scenario s = base;
        s.hybrid.stiffness = k;
        const Solved sol = solve_scenario(s);
        out.push_back({k, max_downward_displacement(sol.system, sol.state.x, 1), sol.state.iterations, sol.state.x});
    }
    return out;
}

}  // namespace hnc
