#pragma once

/**
 * @file elasticity.hpp
 * @brief Plane-strain linear elasticity on P1 triangles and Q1 quads.
 *
 * Body DOFs are node-major: node n owns (2n, 2n+1) = (u_x, u_y).
 * assemble_elasticity() is the OpenMP kernel; assemble_elasticity_reference()
 * is the serial loop it must reproduce (up to summation order).
 */

#include "hnc/mesh.hpp"

#include <array>
#include <span>
#include <utility>

namespace hnc {

struct Material {
    Real E = 1.0;
    Real nu = 0.0;
    Real lambda = 0.0;
    Real mu = 0.5;

    /// Throws ValidationError unless E > 0 and 0 <= nu < 0.5.
    static Material plane_strain(Real E, Real nu);
};

/// (lambda, mu) = (nu E / ((1 + nu)(1 - 2 nu)), E / (2 (1 + nu))).
std::pair<Real, Real> lame_plane_strain(Real E, Real nu);

/// Shape functions and physical gradients at one reference point.
struct ShapeEval {
    std::array<Real, 4> N{};
    std::array<Vec2, 4> grad{};
    Real detJ = 0.0;
};

ShapeEval shape_at(ElementType type, std::span<const Vec2> coords, const Vec2& ref);

/// 6x6 (triangle) or 8x8 (quad, 2x2 Gauss) stiffness. Throws AssemblyError
/// with `element_id` on a non-positive Jacobian.
DenseMatrix element_stiffness(ElementType type, std::span<const Vec2> coords, const Material& mat,
                              Index element_id = -1);

SparseMatrix assemble_elasticity(const BodyMesh& mesh, const Material& mat);
SparseMatrix assemble_elasticity_reference(const BodyMesh& mesh, const Material& mat);

/// Consistent load of a constant body force.
Vector assemble_load(const BodyMesh& mesh, const Vec2& force);

/// Consistent load of a constant traction on facets carrying `tag`.
Vector assemble_traction(const BodyMesh& mesh, FacetTag tag, const Vec2& traction);

/// Integral of each nodal shape function over the body.
Vector node_integrals(const BodyMesh& mesh);

/// Cauchy stress of element e at a reference point.
Mat2 element_stress(const BodyMesh& mesh, const Material& mat, const Vector& u, Index e, const Vec2& ref);

/// Linear functional u -> n . sigma(u) . n at a facet point, as coefficients
/// on the owning element's DOFs.
struct StressRow {
    std::array<Index, 8> dofs{};
    std::array<Real, 8> coef{};
    int size = 0;

    Real apply(const Vector& u) const;
};

StressRow sigma_n_row(const BodyMesh& mesh, const Material& mat, Index facet, Real t, const Vec2& normal);

/// n . sigma(u) . n with the facet's outward normal at parameter t.
Real sigma_n(const BodyMesh& mesh, const Material& mat, const Vector& u, Index facet, Real t);

/// u(x) on facet f at parameter t, interpolated from the facet's two nodes.
Vec2 facet_displacement(const BodyMesh& mesh, const Vector& u, Index facet, Real t);

}  // namespace hnc
