#include "hnc/mesh_io.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace hnc {

namespace {

std::string expect_word(std::istream& in, std::string_view word) {
    std::string w;
    if (!(in >> w) || w != word)
        throw ValidationError("mesh file: expected '" + std::string(word) + "', got '" + w + "'");
    return w;
}

template <typename T>
T read_value(std::istream& in, const char* what) {
    T v{};
    if (!(in >> v)) throw ValidationError(std::string("mesh file: cannot read ") + what);
    return v;
}

}  // namespace

BodyMesh read_body_mesh(std::istream& in) {
    expect_word(in, "nodes");
    const auto n = read_value<Index>(in, "node count");
    expect_word(in, "elements");
    const auto m = read_value<Index>(in, "element count");
    expect_word(in, "type");
    const auto type_word = read_value<std::string>(in, "element type");
    ElementType type;
    if (type_word == "tri")
        type = ElementType::Triangle;
    else if (type_word == "quad")
        type = ElementType::Quad;
    else
        throw ValidationError("mesh file: unknown element type '" + type_word + "'");
    if (n <= 0 || m <= 0) throw ValidationError("mesh file: empty mesh");

    std::vector<Vec2> nodes(static_cast<std::size_t>(n));
    for (auto& p : nodes) {
        p.x() = read_value<Real>(in, "node x");
        p.y() = read_value<Real>(in, "node y");
    }
    const int npe = type == ElementType::Triangle ? 3 : 4;
    std::vector<std::array<Index, 4>> elements(static_cast<std::size_t>(m), {0, 0, 0, 0});
    for (auto& el : elements)
        for (int k = 0; k < npe; ++k) el[static_cast<std::size_t>(k)] = read_value<Index>(in, "element node");

    std::vector<TaggedFacet> facets;
    std::string word;
    if (in >> word) {
        if (word != "facets") throw ValidationError("mesh file: expected 'facets', got '" + word + "'");
        const auto k = read_value<Index>(in, "facet count");
        facets.resize(static_cast<std::size_t>(k));
        for (auto& f : facets) {
            f.nodes[0] = read_value<Index>(in, "facet node");
            f.nodes[1] = read_value<Index>(in, "facet node");
            f.tag = parse_facet_tag(read_value<std::string>(in, "facet tag"));
        }
    }
    return BodyMesh(std::move(nodes), type, std::move(elements), std::move(facets));
}

BodyMesh read_body_mesh_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open mesh file '" + path + "'");
    try {
        return read_body_mesh(in);
    } catch (const Error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_body_mesh(std::ostream& out, const BodyMesh& mesh) {
    out << std::setprecision(std::numeric_limits<Real>::max_digits10);
    out << "nodes " << mesh.node_count() << " elements " << mesh.element_count() << " type "
        << to_string(mesh.element_type()) << "\n";
    for (const auto& p : mesh.nodes()) out << p.x() << " " << p.y() << "\n";
    for (Index e = 0; e < mesh.element_count(); ++e) {
        const auto el = mesh.element(e);
        for (std::size_t k = 0; k < el.size(); ++k) out << (k ? " " : "") << el[k];
        out << "\n";
    }
    out << "facets " << mesh.facets().size() << "\n";
    for (const auto& f : mesh.facets())
        out << f.nodes[0] << " " << f.nodes[1] << " " << to_string(f.tag) << "\n";
}

InterfaceMesh read_interface(std::istream& in) {
    expect_word(in, "interface");
    const auto v = read_value<Index>(in, "vertex count");
    std::vector<Vec2> verts(static_cast<std::size_t>(std::max<Index>(v, 0)));
    for (auto& p : verts) {
        p.x() = read_value<Real>(in, "vertex x");
        p.y() = read_value<Real>(in, "vertex y");
    }
    expect_word(in, "orient");
    const auto side = parse_normal_side(read_value<std::string>(in, "orientation"));
    bool closed = false;
    std::string word;
    if (in >> word) {
        if (word != "closed") throw ValidationError("interface file: unexpected '" + word + "'");
        closed = true;
    }
    return InterfaceMesh(std::move(verts), side, closed);
}

InterfaceMesh read_interface_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open interface file '" + path + "'");
    try {
        return read_interface(in);
    } catch (const Error& e) {
        throw ValidationError(path + ": " + e.what());
    }
}

void write_interface(std::ostream& out, const InterfaceMesh& interface) {
    out << std::setprecision(std::numeric_limits<Real>::max_digits10);
    out << "interface " << interface.vertex_count() << "\n";
    for (const auto& p : interface.vertices()) out << p.x() << " " << p.y() << "\n";
    out << "orient " << to_string(interface.side()) << "\n";
    if (interface.closed()) out << "closed\n";
}

}  // namespace hnc
