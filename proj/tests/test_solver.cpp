#include "helpers.hpp"

#include <Eigen/Dense>
#include <doctest.h>

#include <sstream>

using namespace hnc;
using doctest::Approx;

TEST_CASE("dof layout numbering") {
    const std::vector<char> f1{0, 1, 0, 0}, f2{1, 0, 0};
    const DofLayout L(f1, f2, 5, 2);
    CHECK(L.body_free_count(1) == 3);
    CHECK(L.body_free_count(2) == 2);
    CHECK(L.total() == 3 + 2 + 5 + 2);
    CHECK(L.body_global(1, 0) == 0);
    CHECK(L.body_global(1, 1) == -1);
    CHECK(L.body_global(1, 3) == 2);
    CHECK(L.body_global(2, 0) == -1);
    CHECK(L.body_global(2, 2) == 4);
    CHECK(L.hybrid_global(0) == 5);
    CHECK(L.multiplier_global(1) == 11);

    Vector x = Vector::LinSpaced(L.total(), 1.0, static_cast<Real>(L.total()));
    const Vector u1 = L.body_displacement(1, x);
    CHECK(u1.size() == 4);
    CHECK(u1(1) == 0.0);
    CHECK(u1(3) == 3.0);
    CHECK(L.hybrid_dofs(x)(0) == 6.0);
    Vector g = Vector::Zero(L.total());
    L.add_body_vector(2, Vector::Constant(3, 2.0), g);
    CHECK(g.sum() == 4.0);
}

TEST_CASE("linear solve examples") {
    SparseMatrix I(3, 3);
    I.setIdentity();
    const Vector b(Vector::LinSpaced(3, 1, 3));
    CHECK((linear_solve(I, b) - b).norm() < 1e-15);

    SparseMatrix P(2, 2);
    P.insert(0, 1) = 1.0;
    P.insert(1, 0) = 1.0;
    const Vector y = linear_solve(P, Vector(Vec2(2.0, 5.0)));
    CHECK(y(0) == Approx(5.0));
    CHECK(y(1) == Approx(2.0));

    std::mt19937_64 rng(1);
    const DenseMatrix R = DenseMatrix::NullaryExpr(50, 50, [&] { return std::uniform_real_distribution<Real>(-1, 1)(rng); });
    const DenseMatrix A = R * R.transpose() + 50.0 * DenseMatrix::Identity(50, 50);
    const Vector rhs = test::random_vector(50, rng);
    const Vector x = linear_solve(A.sparseView(), rhs);
    CHECK((x - A.ldlt().solve(rhs)).cwiseAbs().maxCoeff() < 1e-12);

    SparseMatrix Z(2, 2);
    Z.insert(0, 0) = 1.0;
    CHECK_THROWS_AS(linear_solve(Z, Vector::Ones(2)), SolverError);
    CHECK_THROWS_AS(linear_solve(I, Vector::Ones(2)), SolverError);
}

TEST_CASE("tied patch converges in one step") {
    const Solved r = solve_scenario(patch_scenario(ConstraintMode::Equality));
    CHECK(r.state.iterations == 1);
}

TEST_CASE("separated bodies reduce to independent elastic problems") {
    // The disc hangs from its flat side under an upward body force, so no
    // pairing activates and the block stays at rest.
    Scenario s = test::tiny_hertz();
    s.bodies[0].disc_top = FacetTag::Dirichlet;
    s.bodies[0].mean_x = false;
    s.bodies[0].traction = Vec2::Zero();
    s.bodies[0].force = Vec2(0.0, 3.0);
    const Solved r = solve_scenario(s);
    const System& sys = r.system;
    for (std::size_t q = 0; q < sys.pairings().size(); ++q)
        if (sys.pairings()[q].body == 1) CHECK(r.state.active[q] == 0);

    const BodySetup& b = sys.body(1);
    const auto fixed = fixed_dofs(b);
    DenseMatrix K(assemble_elasticity(b.mesh, b.material));
    // Inactive pairings keep the -c(u, w) coupling of the stress with itself.
    for (const auto& p : sys.pairings()) {
        if (p.body != 1) continue;
        const StressRow sr = sigma_n_row(b.mesh, b.material, p.facet, p.t, b.mesh.facet_outward_normal(p.facet));
        const Real scale = p.weight * p.h / b.nitsche.gamma0;
        for (int i = 0; i < sr.size; ++i)
            for (int j = 0; j < sr.size; ++j)
                K(sr.dofs[static_cast<std::size_t>(i)], sr.dofs[static_cast<std::size_t>(j)]) -=
                    scale * sr.coef[static_cast<std::size_t>(i)] * sr.coef[static_cast<std::size_t>(j)];
    }
    const Vector f = assemble_load(b.mesh, b.body_force);
    std::vector<Index> free;
    for (Index i = 0; i < b.mesh.dof_count(); ++i)
        if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
    const auto n = static_cast<Index>(free.size());
    DenseMatrix Kf(n, n);
    Vector ff(n);
    for (Index i = 0; i < n; ++i) {
        ff(i) = f(free[static_cast<std::size_t>(i)]);
        for (Index j = 0; j < n; ++j) Kf(i, j) = K(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
    }
    const Vector uf = Kf.partialPivLu().solve(ff);
    const Vector u = sys.layout().body_displacement(1, r.state.x);
    Real diff = 0.0;
    for (Index i = 0; i < n; ++i) diff = std::max(diff, std::abs(u(free[static_cast<std::size_t>(i)]) - uf(i)));
    CHECK(diff <= 1e-10 * uf.cwiseAbs().maxCoeff());
    CHECK(sys.layout().body_displacement(2, r.state.x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("converged Newton state") {
    const Scenario s = test::tiny_hertz();
    NewtonOptions o = newton_options(s);
    o.check_definiteness = true;
    const System sys = build_system(build_setup(s));
    const SystemState st = semismooth_newton(sys, o);
    const Vector r = sys.residual(st.x);
    CHECK(r.norm() <= o.tol_rel * sys.load().norm());
    CHECK(r.cwiseAbs().maxCoeff() <= 10 * o.tol_rel * sys.load().cwiseAbs().maxCoeff());
    CHECK(st.active == sys.contact().active_set(st.x));
    CHECK(st.negative_pivots == 0);
    CHECK(st.iterations == static_cast<int>(st.log.size()) - 1);

    const DenseMatrix J(sys.jacobian(st.active));
    CHECK((J - J.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * J.cwiseAbs().maxCoeff());

    // Fixed point: another Newton step from the solution barely moves it.
    const Vector step = linear_solve(sys.jacobian(st.active), -r);
    CHECK(step.cwiseAbs().maxCoeff() <= 1e-8 * st.x.cwiseAbs().maxCoeff());

    std::ostringstream log;
    write_iteration_log(log, st.log);
    CHECK(log.str().rfind("iter 0 residual ", 0) == 0);
}

TEST_CASE("Lagrangian gradient is the residual") {
    const System sys = build_system(build_setup(test::tiny_hertz()));
    std::mt19937_64 rng(2);
    const Vector x = test::random_vector(sys.layout().total(), rng, 1e-3);
    const Vector r = sys.residual(x);
    const Real h = 1e-7;
    Real err = 0.0;
    for (Index j = 0; j < x.size(); j += 7) {
        Vector xp = x, xm = x;
        xp(j) += h;
        xm(j) -= h;
        err = std::max(err, std::abs((sys.lagrangian(xp) - sys.lagrangian(xm)) / (2 * h) - r(j)));
    }
    CHECK(err <= 1e-5 * r.cwiseAbs().maxCoeff());
}

TEST_CASE("energy norm is the elastic energy of both bodies") {
    const Solved r = solve_scenario(test::tiny_hertz());
    Real e = 0.0;
    for (int b = 1; b <= 2; ++b) {
        const Vector u = r.system.layout().body_displacement(b, r.state.x);
        e += u.dot(r.system.body_stiffness(b) * u);
    }
    CHECK(r.system.energy_norm_sq(r.state.x) == Approx(e).epsilon(1e-12));
    CHECK(e > 0.0);
}

TEST_CASE("floating body support and the plain all-active start") {
    const Scenario s = test::tiny_hertz();
    const System sys = build_system(build_setup(s));
    // Only contact holds the disc vertically.
    CHECK(sys.floating(1));
    CHECK_FALSE(sys.floating(2));
    NewtonOptions o = newton_options(s);
    o.support_floating = false;
    const SystemState a = semismooth_newton(sys, o);
    o.support_floating = true;
    const SystemState b = semismooth_newton(sys, o);
    CHECK((a.x - b.x).cwiseAbs().maxCoeff() <= 1e-9 * a.x.cwiseAbs().maxCoeff());

    // A single x pin leaves rotation and vertical motion to the contact rows.
    Scenario f = test::tiny_hertz();
    f.bodies[0].mean_x = false;
    f.bodies[0].pins = {Pin{Vec2(0.0, 1.0), 0}};
    const System fs = build_system(build_setup(f));
    CHECK(fs.floating(1));
    const SystemState fst = semismooth_newton(fs, newton_options(f));
    CHECK(fs.residual(fst.x).norm() <= 1e-10 * fs.load().norm());
}

TEST_CASE("problem validation") {
    Scenario s = test::tiny_hertz();
    s.bodies[0].mean_x = false;
    ProblemSetup setup;
    CHECK_THROWS_AS(setup = build_setup(s), ValidationError);

    ProblemSetup ok = build_setup(test::tiny_hertz());
    ok.bodies[0].mean_x = false;
    try {
        build_system(ok);
        FAIL("expected a ValidationError");
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("singular") != std::string::npos);
    }
    ok = build_setup(test::tiny_hertz());
    ok.n_gauss = 7;
    CHECK_THROWS_AS(build_system(ok), ValidationError);

    const System sys = build_system(build_setup(test::tiny_hertz()));
    NewtonOptions bad;
    bad.max_iter = 0;
    CHECK_THROWS_AS(semismooth_newton(sys, bad), ValidationError);
}

TEST_CASE("Newton gives up with its iteration history") {
    Scenario s = with_gamma_mult(test::tiny_hertz(), 1000.0);
    s.solver.max_iter = 1;
    try {
        solve_scenario(s);
        FAIL("expected a NonConvergenceError");
    } catch (const NonConvergenceError& e) {
        CHECK_FALSE(e.log().empty());
    }
}
