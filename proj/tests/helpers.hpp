#pragma once

#include "hnc/mesh_gen.hpp"
#include "hnc/scenario.hpp"

#include <random>

namespace hnc::test {

/// Unit square split along its diagonal, all facets tagged `tag`.
inline BodyMesh two_triangle_square(FacetTag tag = FacetTag::Neumann) {
    std::vector<Vec2> nodes{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    std::vector<std::array<Index, 4>> elems{{0, 1, 2, -1}, {0, 2, 3, -1}};
    std::vector<TaggedFacet> f{{{0, 1}, tag}, {{1, 2}, tag}, {{2, 3}, tag}, {{3, 0}, tag}};
    return BodyMesh(nodes, ElementType::Triangle, elems, f);
}

/// Structured block with uniform spacing and the given side tags
/// (bottom, right, top, left).
inline BodyMesh uniform_block(Real x0, Real y0, Real x1, Real y1, Index nx, Index ny, std::array<FacetTag, 4> tags,
                              ElementType type = ElementType::Quad) {
    BlockOptions o;
    o.x0 = x0;
    o.y0 = y0;
    o.x1 = x1;
    o.y1 = y1;
    o.nx = nx;
    o.ny = ny;
    o.type = type;
    return block_mesh(o, [tags](RectSide s, const Vec2&) { return tags[static_cast<std::size_t>(s)]; });
}

inline Vector random_vector(Index n, std::mt19937_64& rng, Real scale = 1.0) {
    std::uniform_real_distribution<Real> d(-scale, scale);
    Vector v(n);
    for (Index i = 0; i < n; ++i) v(i) = d(rng);
    return v;
}

/// Max-norm of A - B over max-norm of A.
inline Real rel_max_diff(const DenseMatrix& A, const DenseMatrix& B) {
    const Real s = A.cwiseAbs().maxCoeff();
    return (A - B).cwiseAbs().maxCoeff() / (s > 0.0 ? s : 1.0);
}

/// Small disc-on-block scenario (a few hundred unknowns).
inline Scenario tiny_hertz(Index constants = 8) {
    Scenario s = hertz_scenario(constants);
    s.bodies[0].disc.n_arc = 8;
    s.bodies[0].disc.n_radial = 3;
    s.bodies[0].disc.arc_grading = s.bodies[0].disc.radial_grading = 1.0;
    s.bodies[1].block.nx = 8;
    s.bodies[1].block.ny = 3;
    s.bodies[1].block.x_grading = s.bodies[1].block.y_grading = 1.0;
    return s;
}

}  // namespace hnc::test
