#pragma once

/**
 * @file mesh.hpp
 * @brief Body meshes, the interface polyline and closest-point queries.
 *
 * Bodies are 2D meshes of P1 triangles or Q1 quadrilaterals with tagged
 * boundary facets. The hybrid interface is an ordered polyline carrying one
 * unit normal per segment; every contact quantity on a body is computed
 * against that polyline through the closest-point map.
 */

#include "hnc/types.hpp"

#include <array>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace hnc {

enum class ElementType { Triangle, Quad };

enum class FacetTag { Dirichlet, Neumann, Contact, Traction };

std::string_view to_string(ElementType type);
std::string_view to_string(FacetTag tag);
FacetTag parse_facet_tag(std::string_view text);

/// Boundary facet of a body mesh. Node order follows the counter-clockwise
/// orientation of the owning element, so the outward normal is the tangent
/// rotated clockwise.
struct Facet {
    std::array<Index, 2> nodes{};
    FacetTag tag = FacetTag::Neumann;
    Index element = -1;
    int local_edge = -1;
};

struct TaggedFacet {
    std::array<Index, 2> nodes{};
    FacetTag tag = FacetTag::Neumann;
};

class BodyMesh {
public:
    BodyMesh() = default;

    /// Validates orientation and connectivity. Boundary edges that carry no
    /// tag become traction-free (Neumann) facets.
    BodyMesh(std::vector<Vec2> nodes, ElementType type,
             std::vector<std::array<Index, 4>> elements,
             std::vector<TaggedFacet> tagged_facets);

    ElementType element_type() const { return type_; }
    int nodes_per_element() const { return type_ == ElementType::Triangle ? 3 : 4; }

    Index node_count() const { return static_cast<Index>(nodes_.size()); }
    Index element_count() const { return static_cast<Index>(elements_.size()); }
    Index dof_count() const { return 2 * node_count(); }

    const Vec2& node(Index i) const { return nodes_[static_cast<std::size_t>(i)]; }
    const std::vector<Vec2>& nodes() const { return nodes_; }

    std::span<const Index> element(Index e) const {
        return {elements_[static_cast<std::size_t>(e)].data(),
                static_cast<std::size_t>(nodes_per_element())};
    }
    const std::vector<std::array<Index, 4>>& elements() const { return elements_; }

    /// Corner coordinates of element e (only the first nodes_per_element are set).
    std::array<Vec2, 4> element_coords(Index e) const;

    const std::vector<Facet>& facets() const { return facets_; }
    std::vector<Index> facets_with_tag(FacetTag tag) const;
    bool has_tag(FacetTag tag) const;

    Real facet_length(Index f) const;
    Vec2 facet_outward_normal(Index f) const;
    Vec2 facet_point(Index f, Real t) const;

    /// Reference coordinates in the owning element of the point at parameter
    /// t along facet f.
    Vec2 facet_reference_point(Index f, Real t) const;

    /// Total area and element areas.
    Real area() const;
    Real element_area(Index e) const;

private:
    std::vector<Vec2> nodes_;
    ElementType type_ = ElementType::Triangle;
    std::vector<std::array<Index, 4>> elements_;
    std::vector<Facet> facets_;
};

/// Local edge (pair of local vertex indices) of a triangle or quad.
std::array<int, 2> local_edge_vertices(ElementType type, int edge);

/// Reference-element vertex coordinates: triangle (0,0),(1,0),(0,1);
/// quad the corners of [-1,1]^2 counter-clockwise from (-1,-1).
Vec2 reference_vertex(ElementType type, int vertex);

enum class NormalSide { Left, Right };

std::string_view to_string(NormalSide side);
NormalSide parse_normal_side(std::string_view text);

/// Ordered polyline discretizing the hybrid object.
class InterfaceMesh {
public:
    InterfaceMesh() = default;
    InterfaceMesh(std::vector<Vec2> vertices, NormalSide side, bool closed = false);

    /// n equal segments on the straight line from a to b.
    static InterfaceMesh subdivide(const Vec2& a, const Vec2& b, Index n, NormalSide side);

    Index vertex_count() const { return static_cast<Index>(vertices_.size()); }
    Index segment_count() const { return static_cast<Index>(normals_.size()); }
    bool closed() const { return closed_; }
    NormalSide side() const { return side_; }

    const Vec2& vertex(Index i) const { return vertices_[static_cast<std::size_t>(i)]; }
    const std::vector<Vec2>& vertices() const { return vertices_; }
    std::array<Index, 2> segment(Index s) const;
    const Vec2& normal(Index s) const { return normals_[static_cast<std::size_t>(s)]; }
    Vec2 tangent(Index s) const;
    Real length(Index s) const { return lengths_[static_cast<std::size_t>(s)]; }
    Real min_length() const;

private:
    std::vector<Vec2> vertices_;
    std::vector<Vec2> normals_;
    std::vector<Real> lengths_;
    NormalSide side_ = NormalSide::Left;
    bool closed_ = false;
};

struct ClosestPointResult {
    Vec2 p0 = Vec2::Zero();
    Index segment = 0;
    /// Parameter along the segment, 0 at its first vertex.
    Real t = 0.0;
    /// Segment normal of the interface.
    Vec2 normal = Vec2::UnitY();
    /// (normal, z - p0).
    Real distance = 0.0;
};

/// Closest point on the polyline. Ties at shared vertices go to the lowest
/// segment index.
ClosestPointResult closest_point(const Vec2& z, const InterfaceMesh& interface);

/// Signed gap (normal, z - p0(z)); positive on the normal side.
Real gap(const Vec2& z, const InterfaceMesh& interface);

struct QuadraturePoint {
    Vec2 z = Vec2::Zero();
    Real weight = 0.0;
    Index facet = -1;
    /// Facet length h.
    Real h = 0.0;
    /// Parameter along the facet in [0, 1].
    Real t = 0.0;
};

/// Gauss-Legendre points on every facet with the given tag. Each facet may be
/// split into `subdivisions` equal pieces with n_gauss points on each.
std::vector<QuadraturePoint> contact_quadrature(const BodyMesh& mesh, FacetTag tag, int n_gauss,
                                                int subdivisions = 1);

/// Gauss-Legendre nodes and weights on [0, 1], n in {1, 2, 3}.
std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre_unit(int n);

/// Chains the facets carrying `tag` into a polyline (open or closed).
InterfaceMesh interface_from_boundary(const BodyMesh& mesh, FacetTag tag, NormalSide side);

}  // namespace hnc
