#include "hnc/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace hnc {

std::string_view to_string(ElementType type) {
    return type == ElementType::Triangle ? "tri" : "quad";
}

std::string_view to_string(FacetTag tag) {
    switch (tag) {
        case FacetTag::Dirichlet: return "dirichlet";
        case FacetTag::Neumann: return "neumann";
        case FacetTag::Contact: return "contact";
        case FacetTag::Traction: return "traction";
    }
    return "neumann";
}

FacetTag parse_facet_tag(std::string_view text) {
    if (text == "dirichlet") return FacetTag::Dirichlet;
    if (text == "neumann") return FacetTag::Neumann;
    if (text == "contact") return FacetTag::Contact;
    if (text == "traction") return FacetTag::Traction;
    throw ValidationError("unknown facet tag '" + std::string(text) + "'");
}

std::string_view to_string(NormalSide side) { return side == NormalSide::Left ? "left" : "right"; }

NormalSide parse_normal_side(std::string_view text) {
    if (text == "left") return NormalSide::Left;
    if (text == "right") return NormalSide::Right;
    throw ValidationError("unknown interface orientation '" + std::string(text) + "'");
}

std::array<int, 2> local_edge_vertices(ElementType type, int edge) {
    const int n = type == ElementType::Triangle ? 3 : 4;
    return {edge, (edge + 1) % n};
}

Vec2 reference_vertex(ElementType type, int vertex) {
    if (type == ElementType::Triangle) {
        static const std::array<Vec2, 3> tri{Vec2(0, 0), Vec2(1, 0), Vec2(0, 1)};
        return tri[static_cast<std::size_t>(vertex)];
    }
    static const std::array<Vec2, 4> quad{Vec2(-1, -1), Vec2(1, -1), Vec2(1, 1), Vec2(-1, 1)};
    return quad[static_cast<std::size_t>(vertex)];
}

namespace {

Real cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

using EdgeKey = std::pair<Index, Index>;

EdgeKey edge_key(Index a, Index b) { return a < b ? EdgeKey{a, b} : EdgeKey{b, a}; }

}  // namespace

BodyMesh::BodyMesh(std::vector<Vec2> nodes, ElementType type,
                   std::vector<std::array<Index, 4>> elements,
                   std::vector<TaggedFacet> tagged_facets)
    : nodes_(std::move(nodes)), type_(type), elements_(std::move(elements)) {
    const int npe = nodes_per_element();
    const Index nn = node_count();
    if (elements_.empty()) throw TopologyError("mesh has no elements");

    // edge -> (element, local edge, use count)
    struct EdgeUse {
        Index element = -1;
        int local_edge = -1;
        int count = 0;
    };
    std::map<EdgeKey, EdgeUse> edges;

    for (Index e = 0; e < element_count(); ++e) {
        const auto& el = elements_[static_cast<std::size_t>(e)];
        for (int k = 0; k < npe; ++k) {
            if (el[static_cast<std::size_t>(k)] < 0 || el[static_cast<std::size_t>(k)] >= nn)
                throw TopologyError("element " + std::to_string(e) + " references node " +
                                    std::to_string(el[static_cast<std::size_t>(k)]) +
                                    " outside [0, " + std::to_string(nn) + ")");
        }
        // Positive orientation at every corner (covers non-convex quads too).
        for (int k = 0; k < npe; ++k) {
            const Vec2& prev = node(el[static_cast<std::size_t>((k + npe - 1) % npe)]);
            const Vec2& cur = node(el[static_cast<std::size_t>(k)]);
            const Vec2& next = node(el[static_cast<std::size_t>((k + 1) % npe)]);
            if (cross(next - cur, prev - cur) <= 0.0)
                throw TopologyError("element " + std::to_string(e) +
                                    " is degenerate or not counter-clockwise");
        }
        for (int k = 0; k < npe; ++k) {
            const auto lv = local_edge_vertices(type_, k);
            auto& use = edges[edge_key(el[static_cast<std::size_t>(lv[0])],
                                       el[static_cast<std::size_t>(lv[1])])];
            if (use.count == 0) {
                use.element = e;
                use.local_edge = k;
            }
            ++use.count;
        }
    }

    std::map<EdgeKey, FacetTag> tags;
    for (const auto& tf : tagged_facets) {
        const auto key = edge_key(tf.nodes[0], tf.nodes[1]);
        auto it = edges.find(key);
        if (it == edges.end() || it->second.count != 1)
            throw TopologyError("facet (" + std::to_string(tf.nodes[0]) + ", " +
                                std::to_string(tf.nodes[1]) + ") is not a boundary edge");
        if (!tags.emplace(key, tf.tag).second)
            throw TopologyError("facet (" + std::to_string(tf.nodes[0]) + ", " +
                                std::to_string(tf.nodes[1]) + ") is tagged twice");
    }

    for (const auto& [key, use] : edges) {
        if (use.count > 2) throw TopologyError("edge shared by more than two elements");
        if (use.count != 1) continue;
        Facet f;
        const auto& el = elements_[static_cast<std::size_t>(use.element)];
        const auto lv = local_edge_vertices(type_, use.local_edge);
        f.nodes = {el[static_cast<std::size_t>(lv[0])], el[static_cast<std::size_t>(lv[1])]};
        f.element = use.element;
        f.local_edge = use.local_edge;
        auto t = tags.find(key);
        f.tag = t == tags.end() ? FacetTag::Neumann : t->second;
        facets_.push_back(f);
    }
    // Deterministic facet order: by owning element, then local edge.
    std::sort(facets_.begin(), facets_.end(), [](const Facet& a, const Facet& b) {
        return a.element != b.element ? a.element < b.element : a.local_edge < b.local_edge;
    });
}

std::array<Vec2, 4> BodyMesh::element_coords(Index e) const {
    std::array<Vec2, 4> c{Vec2::Zero(), Vec2::Zero(), Vec2::Zero(), Vec2::Zero()};
    const auto el = element(e);
    for (std::size_t k = 0; k < el.size(); ++k) c[k] = node(el[k]);
    return c;
}

std::vector<Index> BodyMesh::facets_with_tag(FacetTag tag) const {
    std::vector<Index> out;
    for (std::size_t f = 0; f < facets_.size(); ++f)
        if (facets_[f].tag == tag) out.push_back(static_cast<Index>(f));
    return out;
}

bool BodyMesh::has_tag(FacetTag tag) const {
    return std::any_of(facets_.begin(), facets_.end(), [tag](const Facet& f) { return f.tag == tag; });
}

Real BodyMesh::facet_length(Index f) const {
    const auto& fc = facets_[static_cast<std::size_t>(f)];
    return (node(fc.nodes[1]) - node(fc.nodes[0])).norm();
}

Vec2 BodyMesh::facet_outward_normal(Index f) const {
    const auto& fc = facets_[static_cast<std::size_t>(f)];
    const Vec2 t = (node(fc.nodes[1]) - node(fc.nodes[0])).normalized();
    return {t.y(), -t.x()};
}

Vec2 BodyMesh::facet_point(Index f, Real t) const {
    const auto& fc = facets_[static_cast<std::size_t>(f)];
    return (1.0 - t) * node(fc.nodes[0]) + t * node(fc.nodes[1]);
}

Vec2 BodyMesh::facet_reference_point(Index f, Real t) const {
    const auto& fc = facets_[static_cast<std::size_t>(f)];
    const auto lv = local_edge_vertices(type_, fc.local_edge);
    return (1.0 - t) * reference_vertex(type_, lv[0]) + t * reference_vertex(type_, lv[1]);
}

Real BodyMesh::element_area(Index e) const {
    const auto c = element_coords(e);
    if (type_ == ElementType::Triangle) return 0.5 * cross(c[1] - c[0], c[2] - c[0]);
    return 0.5 * (cross(c[1] - c[0], c[2] - c[0]) + cross(c[2] - c[0], c[3] - c[0]));
}

Real BodyMesh::area() const {
    Real a = 0.0;
    for (Index e = 0; e < element_count(); ++e) a += element_area(e);
    return a;
}

namespace {

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const Real d1 = cross(p2 - p1, q1 - p1);
    const Real d2 = cross(p2 - p1, q2 - p1);
    const Real d3 = cross(q2 - q1, p1 - q1);
    const Real d4 = cross(q2 - q1, p2 - q1);
    return ((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) && ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0));
}

}  // namespace

InterfaceMesh::InterfaceMesh(std::vector<Vec2> vertices, NormalSide side, bool closed)
    : vertices_(std::move(vertices)), side_(side), closed_(closed) {
    if (vertices_.size() < 2) throw ValidationError("interface needs at least two vertices");
    if (closed_ && vertices_.size() < 3) throw ValidationError("closed interface needs three vertices");
    const Index nseg = closed_ ? vertex_count() : vertex_count() - 1;
    normals_.reserve(static_cast<std::size_t>(nseg));
    lengths_.reserve(static_cast<std::size_t>(nseg));
    for (Index s = 0; s < nseg; ++s) {
        const auto [a, b] = segment(s);
        const Vec2 d = vertex(b) - vertex(a);
        const Real len = d.norm();
        if (!(len > 0.0)) throw ValidationError("interface segment " + std::to_string(s) + " has zero length");
        const Vec2 t = d / len;
        normals_.push_back(side_ == NormalSide::Left ? Vec2(-t.y(), t.x()) : Vec2(t.y(), -t.x()));
        lengths_.push_back(len);
    }
    for (Index s = 0; s < nseg; ++s) {
        for (Index r = s + 2; r < nseg; ++r) {
            if (closed_ && s == 0 && r == nseg - 1) continue;
            const auto [a, b] = segment(s);
            const auto [c, d] = segment(r);
            if (segments_intersect(vertex(a), vertex(b), vertex(c), vertex(d)))
                throw ValidationError("interface segments " + std::to_string(s) + " and " +
                                      std::to_string(r) + " intersect");
        }
    }
}

InterfaceMesh InterfaceMesh::subdivide(const Vec2& a, const Vec2& b, Index n, NormalSide side) {
    if (n < 1) throw ValidationError("interface needs at least one segment");
    std::vector<Vec2> v;
    v.reserve(static_cast<std::size_t>(n + 1));
    for (Index k = 0; k <= n; ++k) {
        const Real t = static_cast<Real>(k) / static_cast<Real>(n);
        v.push_back(k == n ? b : Vec2((1.0 - t) * a + t * b));
    }
    return InterfaceMesh(std::move(v), side, false);
}

std::array<Index, 2> InterfaceMesh::segment(Index s) const {
    return {s, (s + 1) % vertex_count()};
}

Vec2 InterfaceMesh::tangent(Index s) const {
    const auto [a, b] = segment(s);
    return (vertex(b) - vertex(a)) / length(s);
}

Real InterfaceMesh::min_length() const { return *std::min_element(lengths_.begin(), lengths_.end()); }

ClosestPointResult closest_point(const Vec2& z, const InterfaceMesh& interface) {
    ClosestPointResult best;
    Real best_d2 = std::numeric_limits<Real>::infinity();
    for (Index s = 0; s < interface.segment_count(); ++s) {
        const auto [ia, ib] = interface.segment(s);
        const Vec2& a = interface.vertex(ia);
        const Vec2& b = interface.vertex(ib);
        const Vec2 d = b - a;
        Real t = (z - a).dot(d) / d.squaredNorm();
        Vec2 p;
        // Endpoints are returned exactly so that ties at shared vertices compare equal.
        if (t <= 0.0) {
            t = 0.0;
            p = a;
        } else if (t >= 1.0) {
            t = 1.0;
            p = b;
        } else {
            p = a + t * d;
        }
        const Real d2 = (z - p).squaredNorm();
        if (d2 < best_d2) {
            best_d2 = d2;
            best.p0 = p;
            best.segment = s;
            best.t = t;
        }
    }
    best.normal = interface.normal(best.segment);
    best.distance = best.normal.dot(z - best.p0);
    return best;
}

Real gap(const Vec2& z, const InterfaceMesh& interface) { return closest_point(z, interface).distance; }

std::pair<std::vector<Real>, std::vector<Real>> gauss_legendre_unit(int n) {
    switch (n) {
        case 1: return {{0.5}, {1.0}};
        case 2: {
            const Real d = 0.5 / std::sqrt(3.0);
            return {{0.5 - d, 0.5 + d}, {0.5, 0.5}};
        }
        case 3: {
            const Real d = 0.5 * std::sqrt(0.6);
            return {{0.5 - d, 0.5, 0.5 + d}, {5.0 / 18.0, 8.0 / 18.0, 5.0 / 18.0}};
        }
        default: throw ValidationError("n_gauss must be 1, 2 or 3");
    }
}

std::vector<QuadraturePoint> contact_quadrature(const BodyMesh& mesh, FacetTag tag, int n_gauss,
                                                int subdivisions) {
    const auto [xi, wi] = gauss_legendre_unit(n_gauss);
    if (subdivisions < 1) throw ValidationError("quadrature subdivisions must be >= 1");
    std::vector<QuadraturePoint> out;
    for (Index f : mesh.facets_with_tag(tag)) {
        const Real h = mesh.facet_length(f);
        for (int s = 0; s < subdivisions; ++s) {
            for (std::size_t q = 0; q < xi.size(); ++q) {
                QuadraturePoint p;
                p.t = (static_cast<Real>(s) + xi[q]) / static_cast<Real>(subdivisions);
                p.z = mesh.facet_point(f, p.t);
                p.weight = wi[q] * h / static_cast<Real>(subdivisions);
                p.facet = f;
                p.h = h;
                out.push_back(p);
            }
        }
    }
    return out;
}

InterfaceMesh interface_from_boundary(const BodyMesh& mesh, FacetTag tag, NormalSide side) {
    const auto ids = mesh.facets_with_tag(tag);
    if (ids.empty()) throw ValidationError("no facets carry tag '" + std::string(to_string(tag)) + "'");
    std::map<Index, Index> next;  // start node -> end node, counter-clockwise
    std::map<Index, int> indegree;
    for (Index f : ids) {
        const auto& fc = mesh.facets()[static_cast<std::size_t>(f)];
        if (!next.emplace(fc.nodes[0], fc.nodes[1]).second)
            throw ValidationError("tagged boundary branches at node " + std::to_string(fc.nodes[0]));
        ++indegree[fc.nodes[1]];
    }
    Index start = next.begin()->first;
    bool closed = true;
    for (const auto& [a, b] : next) {
        if (indegree.find(a) == indegree.end()) {
            start = a;
            closed = false;
            break;
        }
    }
    std::vector<Vec2> verts{mesh.node(start)};
    Index cur = start;
    for (std::size_t k = 0; k < ids.size(); ++k) {
        auto it = next.find(cur);
        if (it == next.end()) throw ValidationError("tagged boundary is not a single chain");
        cur = it->second;
        if (closed && cur == start) break;
        verts.push_back(mesh.node(cur));
    }
    const std::size_t expected = closed ? ids.size() : ids.size() + 1;
    if (verts.size() != expected) throw ValidationError("tagged boundary is not a single chain");
    return InterfaceMesh(std::move(verts), side, closed);
}

}  // namespace hnc
