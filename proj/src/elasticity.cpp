#include "hnc/elasticity.hpp"

#include <omp.h>

#include <cmath>
#include <limits>
#include <string>

namespace hnc {

std::pair<Real, Real> lame_plane_strain(Real E, Real nu) {
    if (!(E > 0.0) || !(nu >= 0.0) || !(nu < 0.5))
        throw ValidationError("invalid material: need E > 0 and 0 <= nu < 0.5 (E = " + std::to_string(E) +
                              ", nu = " + std::to_string(nu) + ")");
    const Real lambda = nu * E / ((1.0 + nu) * (1.0 - 2.0 * nu));
    const Real mu = E / (2.0 * (1.0 + nu));
    return {lambda, mu};
}

Material Material::plane_strain(Real E, Real nu) {
    const auto [lambda, mu] = lame_plane_strain(E, nu);
    return {E, nu, lambda, mu};
}

ShapeEval shape_at(ElementType type, std::span<const Vec2> coords, const Vec2& ref) {
    ShapeEval s;
    std::array<Vec2, 4> dref{};
    int n = 0;
    if (type == ElementType::Triangle) {
        n = 3;
        s.N = {1.0 - ref.x() - ref.y(), ref.x(), ref.y(), 0.0};
        dref = {Vec2(-1, -1), Vec2(1, 0), Vec2(0, 1), Vec2::Zero()};
    } else {
        n = 4;
        const Real xi = ref.x(), eta = ref.y();
        s.N = {0.25 * (1 - xi) * (1 - eta), 0.25 * (1 + xi) * (1 - eta), 0.25 * (1 + xi) * (1 + eta),
               0.25 * (1 - xi) * (1 + eta)};
        dref = {Vec2(-0.25 * (1 - eta), -0.25 * (1 - xi)), Vec2(0.25 * (1 - eta), -0.25 * (1 + xi)),
                Vec2(0.25 * (1 + eta), 0.25 * (1 + xi)), Vec2(-0.25 * (1 + eta), 0.25 * (1 - xi))};
    }
    Mat2 J = Mat2::Zero();  // J(i, j) = d x_i / d ref_j
    for (int a = 0; a < n; ++a) J += coords[static_cast<std::size_t>(a)] * dref[static_cast<std::size_t>(a)].transpose();
    s.detJ = J.determinant();
    const Mat2 Jinv_t = J.inverse().transpose();
    for (int a = 0; a < n; ++a) s.grad[static_cast<std::size_t>(a)] = Jinv_t * dref[static_cast<std::size_t>(a)];
    return s;
}

namespace {

Eigen::Matrix3d voigt_elasticity(const Material& mat) {
    Eigen::Matrix3d D;
    D << mat.lambda + 2 * mat.mu, mat.lambda, 0, mat.lambda, mat.lambda + 2 * mat.mu, 0, 0, 0, mat.mu;
    return D;
}

// Points and weights of the element rule: 1-point for P1, 2x2 Gauss for Q1.
std::pair<std::vector<Vec2>, std::vector<Real>> element_rule(ElementType type) {
    if (type == ElementType::Triangle) return {{Vec2(1.0 / 3.0, 1.0 / 3.0)}, {0.5}};
    const Real g = 1.0 / std::sqrt(3.0);
    return {{Vec2(-g, -g), Vec2(g, -g), Vec2(g, g), Vec2(-g, g)}, {1.0, 1.0, 1.0, 1.0}};
}

}  // namespace

DenseMatrix element_stiffness(ElementType type, std::span<const Vec2> coords, const Material& mat,
                              Index element_id) {
    const int n = type == ElementType::Triangle ? 3 : 4;
    const Eigen::Matrix3d D = voigt_elasticity(mat);
    DenseMatrix K = DenseMatrix::Zero(2 * n, 2 * n);
    const auto [pts, wts] = element_rule(type);
    for (std::size_t q = 0; q < pts.size(); ++q) {
        const ShapeEval s = shape_at(type, coords, pts[q]);
        if (!(s.detJ > 0.0)) throw AssemblyError("non-positive element Jacobian", element_id);
        Eigen::MatrixXd B = Eigen::MatrixXd::Zero(3, 2 * n);
        for (int a = 0; a < n; ++a) {
            const Vec2& g = s.grad[static_cast<std::size_t>(a)];
            B(0, 2 * a) = g.x();
            B(1, 2 * a + 1) = g.y();
            B(2, 2 * a) = g.y();
            B(2, 2 * a + 1) = g.x();
        }
        K.noalias() += (wts[q] * s.detJ) * B.transpose() * D * B;
    }
    // Exact symmetry as stored.
    return 0.5 * (K + K.transpose());
}

namespace {

void element_triplets(const BodyMesh& mesh, const Material& mat, Index e, std::vector<Triplet>& out) {
    const auto coords = mesh.element_coords(e);
    const int n = mesh.nodes_per_element();
    const DenseMatrix Ke = element_stiffness(mesh.element_type(),
                                             std::span<const Vec2>(coords.data(), static_cast<std::size_t>(n)), mat, e);
    const auto el = mesh.element(e);
    for (int a = 0; a < 2 * n; ++a) {
        const Index ga = 2 * el[static_cast<std::size_t>(a / 2)] + a % 2;
        for (int b = 0; b < 2 * n; ++b) {
            const Index gb = 2 * el[static_cast<std::size_t>(b / 2)] + b % 2;
            out.emplace_back(ga, gb, Ke(a, b));
        }
    }
}

}  // namespace

SparseMatrix assemble_elasticity_reference(const BodyMesh& mesh, const Material& mat) {
    std::vector<Triplet> trips;
    const int n = 2 * mesh.nodes_per_element();
    trips.reserve(static_cast<std::size_t>(mesh.element_count() * n * n));
    for (Index e = 0; e < mesh.element_count(); ++e) element_triplets(mesh, mat, e, trips);
    SparseMatrix K(mesh.dof_count(), mesh.dof_count());
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

SparseMatrix assemble_elasticity(const BodyMesh& mesh, const Material& mat) {
    const Index ne = mesh.element_count();
    const int nthreads = omp_get_max_threads();
    std::vector<std::vector<Triplet>> local(static_cast<std::size_t>(nthreads));
    Index failed = std::numeric_limits<Index>::max();

#pragma omp parallel num_threads(nthreads)
    {
        auto& trips = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (Index e = 0; e < ne; ++e) {
            try {
                element_triplets(mesh, mat, e, trips);
            } catch (const AssemblyError&) {
#pragma omp critical(hnc_assembly_error)
                failed = std::min(failed, e);
            }
        }
    }
    if (failed != std::numeric_limits<Index>::max())
        throw AssemblyError("non-positive element Jacobian", failed);

    std::size_t total = 0;
    for (const auto& t : local) total += t.size();
    std::vector<Triplet> trips;
    trips.reserve(total);
    for (const auto& t : local) trips.insert(trips.end(), t.begin(), t.end());
    SparseMatrix K(mesh.dof_count(), mesh.dof_count());
    K.setFromTriplets(trips.begin(), trips.end());
    return K;
}

Vector assemble_load(const BodyMesh& mesh, const Vec2& force) {
    Vector f = Vector::Zero(mesh.dof_count());
    const auto [pts, wts] = element_rule(mesh.element_type());
    const int n = mesh.nodes_per_element();
    // The P1 centroid rule is exact for linear shape functions.
    for (Index e = 0; e < mesh.element_count(); ++e) {
        const auto coords = mesh.element_coords(e);
        const auto el = mesh.element(e);
        for (std::size_t q = 0; q < pts.size(); ++q) {
            const ShapeEval s = shape_at(mesh.element_type(),
                                         std::span<const Vec2>(coords.data(), static_cast<std::size_t>(n)), pts[q]);
            for (int a = 0; a < n; ++a) {
                const Real w = wts[q] * s.detJ * s.N[static_cast<std::size_t>(a)];
                f(2 * el[static_cast<std::size_t>(a)]) += w * force.x();
                f(2 * el[static_cast<std::size_t>(a)] + 1) += w * force.y();
            }
        }
    }
    return f;
}

Vector assemble_traction(const BodyMesh& mesh, FacetTag tag, const Vec2& traction) {
    Vector f = Vector::Zero(mesh.dof_count());
    for (Index fid : mesh.facets_with_tag(tag)) {
        const Real half = 0.5 * mesh.facet_length(fid);
        for (Index node : mesh.facets()[static_cast<std::size_t>(fid)].nodes) {
            f(2 * node) += half * traction.x();
            f(2 * node + 1) += half * traction.y();
        }
    }
    return f;
}

Vector node_integrals(const BodyMesh& mesh) {
    Vector m = Vector::Zero(mesh.node_count());
    const Vector f = assemble_load(mesh, Vec2(1.0, 0.0));
    for (Index i = 0; i < mesh.node_count(); ++i) m(i) = f(2 * i);
    return m;
}

Mat2 element_stress(const BodyMesh& mesh, const Material& mat, const Vector& u, Index e, const Vec2& ref) {
    const auto coords = mesh.element_coords(e);
    const int n = mesh.nodes_per_element();
    const ShapeEval s = shape_at(mesh.element_type(), std::span<const Vec2>(coords.data(), static_cast<std::size_t>(n)), ref);
    Mat2 grad_u = Mat2::Zero();  // grad_u(i, j) = d u_i / d x_j
    const auto el = mesh.element(e);
    for (int a = 0; a < n; ++a) {
        const Vec2 ua(u(2 * el[static_cast<std::size_t>(a)]), u(2 * el[static_cast<std::size_t>(a)] + 1));
        grad_u += ua * s.grad[static_cast<std::size_t>(a)].transpose();
    }
    const Mat2 eps = 0.5 * (grad_u + grad_u.transpose());
    return mat.lambda * eps.trace() * Mat2::Identity() + 2.0 * mat.mu * eps;
}

Real StressRow::apply(const Vector& u) const {
    Real v = 0.0;
    for (int k = 0; k < size; ++k) v += coef[static_cast<std::size_t>(k)] * u(dofs[static_cast<std::size_t>(k)]);
    return v;
}

StressRow sigma_n_row(const BodyMesh& mesh, const Material& mat, Index facet, Real t, const Vec2& normal) {
    const auto& fc = mesh.facets()[static_cast<std::size_t>(facet)];
    const auto coords = mesh.element_coords(fc.element);
    const int n = mesh.nodes_per_element();
    const ShapeEval s = shape_at(mesh.element_type(), std::span<const Vec2>(coords.data(), static_cast<std::size_t>(n)),
                                 mesh.facet_reference_point(facet, t));
    const auto el = mesh.element(fc.element);
    const Real nx = normal.x(), ny = normal.y();
    StressRow row;
    row.size = 2 * n;
    for (int a = 0; a < n; ++a) {
        const Vec2& g = s.grad[static_cast<std::size_t>(a)];
        // n.sigma.n = lambda div u + 2 mu (nx^2 e_xx + 2 nx ny e_xy + ny^2 e_yy)
        row.dofs[static_cast<std::size_t>(2 * a)] = 2 * el[static_cast<std::size_t>(a)];
        row.coef[static_cast<std::size_t>(2 * a)] =
            mat.lambda * g.x() + 2.0 * mat.mu * (nx * nx * g.x() + nx * ny * g.y());
        row.dofs[static_cast<std::size_t>(2 * a + 1)] = 2 * el[static_cast<std::size_t>(a)] + 1;
        row.coef[static_cast<std::size_t>(2 * a + 1)] =
            mat.lambda * g.y() + 2.0 * mat.mu * (ny * ny * g.y() + nx * ny * g.x());
    }
    return row;
}

Real sigma_n(const BodyMesh& mesh, const Material& mat, const Vector& u, Index facet, Real t) {
    const auto& fc = mesh.facets()[static_cast<std::size_t>(facet)];
    if (fc.element < 0) throw TopologyError("facet " + std::to_string(facet) + " has no adjacent element");
    return sigma_n_row(mesh, mat, facet, t, mesh.facet_outward_normal(facet)).apply(u);
}

Vec2 facet_displacement(const BodyMesh& mesh, const Vector& u, Index facet, Real t) {
    const auto& fc = mesh.facets()[static_cast<std::size_t>(facet)];
    const Vec2 a(u(2 * fc.nodes[0]), u(2 * fc.nodes[0] + 1));
    const Vec2 b(u(2 * fc.nodes[1]), u(2 * fc.nodes[1] + 1));
    return (1.0 - t) * a + t * b;
}

}  // namespace hnc
