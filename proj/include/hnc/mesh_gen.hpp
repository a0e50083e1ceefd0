#pragma once

// Built-in mesh generators for the benchmark geometries.
//
// Both generators are images of a uniform parameter grid under a smooth
// graded map. Multiplying the parameter counts by k gives a mesh whose nodes
// contain the coarser mesh's nodes, which the convergence study relies on.

#include "hnc/mesh.hpp"

#include <functional>

namespace hnc {

enum class DiscSide { Arc, Top };
enum class RectSide { Bottom, Right, Top, Left };

using DiscTagger = std::function<FacetTag(DiscSide, const Vec2& midpoint)>;
using RectTagger = std::function<FacetTag(RectSide, const Vec2& midpoint)>;

/// Lower half of a disc: the flat side is the chord through the center, the
/// arc bulges in -y. Triangles, refined toward the lowest arc point.
struct HalfDiscOptions {
    Vec2 center{0.0, 1.0};
    Real radius = 1.0;
    Index n_arc = 100;
    Index n_radial = 30;
    /// sinh-grading strength; 0 gives uniform spacing.
    Real arc_grading = 3.0;
    Real radial_grading = 3.0;

    bool operator==(const HalfDiscOptions&) const = default;
};

BodyMesh half_disc_mesh(const HalfDiscOptions& opt, const DiscTagger& tagger);

/// Axis-aligned rectangle, refined toward x = (x0 + x1) / 2 and toward y1.
struct BlockOptions {
    Real x0 = -2.5;
    Real y0 = -1.0;
    Real x1 = 2.5;
    Real y1 = 0.0;
    Index nx = 80;
    Index ny = 30;
    Real x_grading = 0.0;
    Real y_grading = 0.0;
    ElementType type = ElementType::Quad;

    bool operator==(const BlockOptions&) const = default;
};

BodyMesh block_mesh(const BlockOptions& opt, const RectTagger& tagger);

/// sinh map of s in [0,1] onto [-1,1], densest at s = 1/2.
Real symmetric_grading(Real s, Real beta);

/// sinh map of t in [0,1] onto [0,1], densest at t = 1.
Real end_grading(Real t, Real beta);

}  // namespace hnc
