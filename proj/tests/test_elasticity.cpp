#include "helpers.hpp"

#include "hnc/elasticity.hpp"

#include <Eigen/Dense>
#include <doctest.h>

using namespace hnc;
using doctest::Approx;

namespace {

Eigen::Matrix3d hooke(Real lambda, Real mu) {
    Eigen::Matrix3d D;
    D << lambda + 2 * mu, lambda, 0, lambda, lambda + 2 * mu, 0, 0, 0, mu;
    return D;
}

// Constant-strain triangle from the textbook b/c coefficients.
DenseMatrix cst_oracle(const std::array<Vec2, 3>& p, Real lambda, Real mu) {
    const Real area = 0.5 * ((p[1] - p[0]).x() * (p[2] - p[0]).y() - (p[2] - p[0]).x() * (p[1] - p[0]).y());
    Eigen::Matrix<Real, 3, 6> B = Eigen::Matrix<Real, 3, 6>::Zero();
    for (int i = 0; i < 3; ++i) {
        const Vec2& pj = p[static_cast<std::size_t>((i + 1) % 3)];
        const Vec2& pk = p[static_cast<std::size_t>((i + 2) % 3)];
        const Real b = pj.y() - pk.y(), c = pk.x() - pj.x();
        B(0, 2 * i) = b;
        B(1, 2 * i + 1) = c;
        B(2, 2 * i) = c;
        B(2, 2 * i + 1) = b;
    }
    B /= 2 * area;
    return area * B.transpose() * hooke(lambda, mu) * B;
}

// Axis-aligned rectangle with 3x3 Gauss on bilinear shape functions.
DenseMatrix rect_oracle(Real x0, Real y0, Real w, Real h, Real lambda, Real mu) {
    const Real g[3] = {-std::sqrt(0.6), 0.0, std::sqrt(0.6)};
    const Real gw[3] = {5.0 / 9, 8.0 / 9, 5.0 / 9};
    const Real sx[4] = {-1, 1, 1, -1}, sy[4] = {-1, -1, 1, 1};
    DenseMatrix K = DenseMatrix::Zero(8, 8);
    (void)x0;
    (void)y0;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            Eigen::Matrix<Real, 3, 8> B = Eigen::Matrix<Real, 3, 8>::Zero();
            for (int a = 0; a < 4; ++a) {
                const Real dx = 0.25 * sx[a] * (1 + sy[a] * g[j]) * 2.0 / w;
                const Real dy = 0.25 * sy[a] * (1 + sx[a] * g[i]) * 2.0 / h;
                B(0, 2 * a) = dx;
                B(1, 2 * a + 1) = dy;
                B(2, 2 * a) = dy;
                B(2, 2 * a + 1) = dx;
            }
            K += gw[i] * gw[j] * (w * h / 4) * B.transpose() * hooke(lambda, mu) * B;
        }
    return K;
}

Vector rigid_mode(const BodyMesh& mesh, int k) {
    Vector v(mesh.dof_count());
    for (Index n = 0; n < mesh.node_count(); ++n) {
        const Vec2& p = mesh.node(n);
        const Vec2 u = k == 0 ? Vec2(1, 0) : k == 1 ? Vec2(0, 1) : Vec2(-p.y(), p.x());
        v(2 * n) = u.x();
        v(2 * n + 1) = u.y();
    }
    return v;
}

}  // namespace

TEST_CASE("plane strain Lame parameters") {
    auto [l1, m1] = lame_plane_strain(2000, 0.3);
    CHECK(l1 == Approx(1153.846154));
    CHECK(m1 == Approx(769.230769));
    auto [l2, m2] = lame_plane_strain(7000, 0.3);
    CHECK(l2 == Approx(4038.461538));
    CHECK(m2 == Approx(2692.307692));
    auto [l3, m3] = lame_plane_strain(5.0, 0.0);
    CHECK(l3 == 0.0);
    CHECK(m3 == 2.5);
    CHECK_THROWS_AS(lame_plane_strain(1.0, 0.5), ValidationError);
    CHECK_THROWS_AS(lame_plane_strain(0.0, 0.2), ValidationError);
    CHECK_THROWS_AS(lame_plane_strain(1.0, -0.1), ValidationError);
}

TEST_CASE("triangle stiffness matches the constant-strain oracle") {
    const Material m{1.0, 0.25, 1.0, 1.0};
    const std::array<Vec2, 3> p{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
    const DenseMatrix K = element_stiffness(ElementType::Triangle, p, m);
    CHECK((K - cst_oracle(p, 1.0, 1.0)).cwiseAbs().maxCoeff() < 1e-12);

    const std::array<Vec2, 3> q{Vec2(0.2, -0.1), Vec2(1.7, 0.4), Vec2(0.5, 1.3)};
    const Material steel = Material::plane_strain(210.0, 0.3);
    CHECK(test::rel_max_diff(cst_oracle(q, steel.lambda, steel.mu), element_stiffness(ElementType::Triangle, q, steel)) <
          1e-12);
}

TEST_CASE("quad stiffness matches higher-order quadrature on a rectangle") {
    const Material m = Material::plane_strain(100.0, 0.2);
    const std::array<Vec2, 4> p{Vec2(1, 2), Vec2(3, 2), Vec2(3, 2.5), Vec2(1, 2.5)};
    const DenseMatrix K = element_stiffness(ElementType::Quad, p, m);
    CHECK(test::rel_max_diff(rect_oracle(1, 2, 2, 0.5, m.lambda, m.mu), K) < 1e-12);
}

TEST_CASE("element stiffness: symmetry and rigid kernel") {
    const Material m = Material::plane_strain(7.0, 0.35);
    const std::array<Vec2, 4> quad{Vec2(0, 0), Vec2(1.2, 0.1), Vec2(1.0, 0.9), Vec2(-0.1, 1.1)};
    const std::array<Vec2, 3> tri{Vec2(0, 0), Vec2(1.2, 0.1), Vec2(0.3, 0.8)};
    for (int k = 0; k < 2; ++k) {
        const DenseMatrix K = k == 0 ? element_stiffness(ElementType::Quad, quad, m)
                                     : element_stiffness(ElementType::Triangle, tri, m);
        CHECK((K - K.transpose()).cwiseAbs().maxCoeff() == 0.0);
        const int n = static_cast<int>(K.rows()) / 2;
        for (int mode = 0; mode < 3; ++mode) {
            Vector v(2 * n);
            for (int a = 0; a < n; ++a) {
                const Vec2 x = k == 0 ? quad[static_cast<std::size_t>(a)] : tri[static_cast<std::size_t>(a)];
                const Vec2 u = mode == 0 ? Vec2(1, 0) : mode == 1 ? Vec2(0, 1) : Vec2(-x.y(), x.x());
                v(2 * a) = u.x();
                v(2 * a + 1) = u.y();
            }
            CHECK((K * v).cwiseAbs().maxCoeff() < 1e-12 * K.cwiseAbs().maxCoeff());
        }
    }
}

TEST_CASE("degenerate element reports its id") {
    const std::array<Vec2, 3> flat{Vec2(0, 0), Vec2(1, 0), Vec2(2, 0)};
    try {
        element_stiffness(ElementType::Triangle, flat, Material::plane_strain(1, 0.2), 17);
        FAIL("no error");
    } catch (const AssemblyError& e) {
        CHECK(e.element() == 17);
    }
}

TEST_CASE("body force load sums to area times force") {
    const auto mesh = test::two_triangle_square();
    const Vector f = assemble_load(mesh, Vec2(0, -1));
    Real fy = 0, fx = 0;
    for (Index n = 0; n < mesh.node_count(); ++n) {
        fx += f(2 * n);
        fy += f(2 * n + 1);
    }
    CHECK(fy == Approx(-1.0));
    CHECK(fx == 0.0);
    const auto quads = test::uniform_block(0, 0, 2, 3, 3, 4, {FacetTag::Neumann, FacetTag::Neumann,
                                                            FacetTag::Traction, FacetTag::Neumann});
    CHECK(assemble_load(quads, Vec2(2, 0)).sum() == Approx(12.0));
    CHECK(assemble_traction(quads, FacetTag::Traction, Vec2(0, -3)).sum() == Approx(-6.0));
    CHECK(node_integrals(quads).sum() == Approx(6.0));
}

TEST_CASE("assembled stiffness: symmetric, PSD, rigid kernel, serial equality") {
    const auto mesh = test::uniform_block(0, 0, 3, 3, 3, 3, {FacetTag::Neumann, FacetTag::Neumann,
                                                            FacetTag::Neumann, FacetTag::Neumann});
    const Material m = Material::plane_strain(50.0, 0.3);
    const SparseMatrix K = assemble_elasticity(mesh, m);
    const DenseMatrix Kd(K);
    const Real scale = Kd.cwiseAbs().maxCoeff();
    CHECK((Kd - Kd.transpose()).cwiseAbs().maxCoeff() <= 1e-12 * scale);
    const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(Kd).eigenvalues();
    CHECK(ev(0) >= -1e-10 * scale);
    CHECK(ev(3) > 1e-6 * scale);  // exactly three zero modes
    for (int k = 0; k < 3; ++k) CHECK((K * rigid_mode(mesh, k)).cwiseAbs().maxCoeff() < 1e-10 * scale);

    const DenseMatrix R(assemble_elasticity_reference(mesh, m));
    CHECK((Kd - R).cwiseAbs().maxCoeff() <= 1e-13 * scale);

    const auto tri = test::uniform_block(0, 0, 2, 1, 6, 3, {FacetTag::Neumann, FacetTag::Neumann, FacetTag::Neumann,
                                                           FacetTag::Neumann},
                                         ElementType::Triangle);
    const DenseMatrix Kt(assemble_elasticity(tri, m)), Rt(assemble_elasticity_reference(tri, m));
    CHECK((Kt - Rt).cwiseAbs().maxCoeff() <= 1e-13 * Kt.cwiseAbs().maxCoeff());
}

TEST_CASE("energy is positive off the rigid modes") {
    const auto mesh = test::uniform_block(0, 0, 2, 1, 4, 2, {FacetTag::Neumann, FacetTag::Neumann,
                                                            FacetTag::Neumann, FacetTag::Neumann});
    const SparseMatrix K = assemble_elasticity(mesh, Material::plane_strain(1.0, 0.3));
    DenseMatrix Q(mesh.dof_count(), 3);
    for (int k = 0; k < 3; ++k) Q.col(k) = rigid_mode(mesh, k);
    const Eigen::HouseholderQR<DenseMatrix> qr(Q);
    const DenseMatrix basis = qr.householderQ() * DenseMatrix::Identity(mesh.dof_count(), 3);
    std::mt19937_64 rng(3);
    for (int k = 0; k < 50; ++k) {
        Vector v = test::random_vector(mesh.dof_count(), rng);
        v -= basis * (basis.transpose() * v);
        CHECK(v.dot(K * v) > 0.0);
    }
}

TEST_CASE("homogeneous uniaxial strain gives a uniform stress") {
    // Prescribe the exact field u = (0, -eps y) on the boundary and solve.
    const auto mesh = test::uniform_block(0, 0, 1, 1, 4, 4, {FacetTag::Dirichlet, FacetTag::Neumann,
                                                            FacetTag::Dirichlet, FacetTag::Neumann});
    const Material m = Material::plane_strain(10.0, 0.25);
    const Real eps = 1e-3;
    const SparseMatrix K = assemble_elasticity(mesh, m);
    std::vector<char> fixed(static_cast<std::size_t>(mesh.dof_count()), 0);
    Vector ub = Vector::Zero(mesh.dof_count());
    for (Index n = 0; n < mesh.node_count(); ++n) {
        const Vec2& p = mesh.node(n);
        if (p.y() == 0.0 || p.y() == 1.0) fixed[static_cast<std::size_t>(2 * n + 1)] = 1;
        ub(2 * n + 1) = -eps * p.y();
    }
    fixed[0] = 1;  // pin x at the origin
    const DenseMatrix Kd(K);
    std::vector<Index> free;
    for (Index i = 0; i < mesh.dof_count(); ++i)
        if (!fixed[static_cast<std::size_t>(i)]) free.push_back(i);
    DenseMatrix Kff(free.size(), free.size());
    Vector rhs(free.size());
    const Vector Kub = Kd * ub;
    for (std::size_t i = 0; i < free.size(); ++i) {
        rhs(static_cast<Index>(i)) = -Kub(free[i]);
        for (std::size_t j = 0; j < free.size(); ++j) Kff(static_cast<Index>(i), static_cast<Index>(j)) = Kd(free[i], free[j]);
    }
    const Vector uf = Kff.ldlt().solve(rhs);
    Vector u = ub;
    for (std::size_t i = 0; i < free.size(); ++i) u(free[i]) += uf(static_cast<Index>(i));

    // Plane strain with free lateral faces: sigma_xx = 0, sigma_yy = -E' eps.
    const Real Ep = m.E / (1 - m.nu * m.nu);
    for (Index e = 0; e < mesh.element_count(); ++e) {
        const Mat2 s = element_stress(mesh, m, u, e, Vec2(0.3, -0.2));
        CHECK(std::abs(s(0, 0)) < 1e-10);
        CHECK(std::abs(s(0, 1)) < 1e-10);
        CHECK(s(1, 1) == Approx(-Ep * eps).epsilon(1e-10));
    }
}

TEST_CASE("normal stress on facets") {
    const auto mesh = test::uniform_block(0, 0, 1, 1, 2, 2, {FacetTag::Contact, FacetTag::Neumann,
                                                            FacetTag::Contact, FacetTag::Neumann});
    const Material m = Material::plane_strain(10.0, 0.3);
    const Real eps = 0.01;
    Vector comp(mesh.dof_count()), trans(mesh.dof_count()), shear(mesh.dof_count());
    for (Index n = 0; n < mesh.node_count(); ++n) {
        const Vec2& p = mesh.node(n);
        comp(2 * n) = 0.0;
        comp(2 * n + 1) = -eps * p.y();
        trans(2 * n) = 0.3;
        trans(2 * n + 1) = -0.7;
        shear(2 * n) = 0.05 * p.y();
        shear(2 * n + 1) = 0.0;
    }
    for (Index f : mesh.facets_with_tag(FacetTag::Contact)) {
        for (Real t : {0.0, 0.3, 1.0}) {
            CHECK(sigma_n(mesh, m, comp, f, t) == Approx(-(m.lambda + 2 * m.mu) * eps));
            CHECK(std::abs(sigma_n(mesh, m, trans, f, t)) < 1e-12);
            CHECK(std::abs(sigma_n(mesh, m, shear, f, t)) < 1e-12);
        }
    }
    std::mt19937_64 rng(11);
    const Vector a = test::random_vector(mesh.dof_count(), rng), b = test::random_vector(mesh.dof_count(), rng);
    const Index f = mesh.facets_with_tag(FacetTag::Contact).front();
    const Real lhs = sigma_n(mesh, m, 2.0 * a - 3.0 * b, f, 0.4);
    const Real rhs = 2.0 * sigma_n(mesh, m, a, f, 0.4) - 3.0 * sigma_n(mesh, m, b, f, 0.4);
    CHECK(std::abs(lhs - rhs) <= 1e-12 * (std::abs(lhs) + 1.0));
}

TEST_CASE("Galerkin consistency for linear fields") {
    // a(u, v) for affine u equals the exact integral of sigma(u):eps(v).
    const auto mesh = test::uniform_block(0, 0, 2, 1, 3, 2, {FacetTag::Neumann, FacetTag::Neumann,
                                                            FacetTag::Neumann, FacetTag::Neumann});
    const Material m = Material::plane_strain(3.0, 0.2);
    const SparseMatrix K = assemble_elasticity(mesh, m);
    Vector u(mesh.dof_count()), v(mesh.dof_count());
    for (Index n = 0; n < mesh.node_count(); ++n) {
        const Vec2& p = mesh.node(n);
        u(2 * n) = 0.1 * p.x() + 0.2 * p.y();
        u(2 * n + 1) = -0.3 * p.x() + 0.05 * p.y();
        v(2 * n) = 0.7 * p.y();
        v(2 * n + 1) = 0.4 * p.x() - 0.6 * p.y();
    }
    // eps(u) = [[0.1, -0.05], [-0.05, 0.05]], eps(v) = [[0, 0.55], [0.55, -0.6]]
    Mat2 eu, ev;
    eu << 0.1, -0.05, -0.05, 0.05;
    ev << 0.0, 0.55, 0.55, -0.6;
    const Mat2 su = m.lambda * eu.trace() * Mat2::Identity() + 2 * m.mu * eu;
    const Real exact = 2.0 * (su.cwiseProduct(ev)).sum();
    CHECK(v.dot(K * u) == Approx(exact).epsilon(1e-12));
}
