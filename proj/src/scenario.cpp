#include "hnc/scenario.hpp"

#include "hnc/mesh_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

namespace hnc {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string fmt(Real v) {
    std::ostringstream o;
    o << std::setprecision(17) << v;
    return o.str();
}

Real to_real(const std::string& v) {
    std::size_t pos = 0;
    const Real r = std::stod(v, &pos);
    if (trim(v.substr(pos)).size()) throw ValidationError("not a number: '" + v + "'");
    return r;
}

Index to_index(const std::string& v) {
    std::size_t pos = 0;
    const long long r = std::stoll(v, &pos);
    if (trim(v.substr(pos)).size()) throw ValidationError("not an integer: '" + v + "'");
    return static_cast<Index>(r);
}

Vec2 to_vec(const std::string& v) {
    std::istringstream in(v);
    Vec2 p;
    std::string rest;
    if (!(in >> p.x() >> p.y()) || (in >> rest)) throw ValidationError("expected two numbers: '" + v + "'");
    return p;
}

std::string vec_str(const Vec2& p) { return fmt(p.x()) + " " + fmt(p.y()); }

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ValidationError("expected true or false: '" + v + "'");
}

std::string bool_str(bool b) { return b ? "true" : "false"; }

std::string axes_str(bool x, bool y) {
    if (x && y) return "xy";
    if (x) return "x";
    if (y) return "y";
    return "none";
}

std::pair<bool, bool> to_axes(const std::string& v) {
    if (v == "xy") return {true, true};
    if (v == "x") return {true, false};
    if (v == "y") return {false, true};
    if (v == "none") return {false, false};
    throw ValidationError("expected none, x, y or xy: '" + v + "'");
}

std::string pins_str(const std::vector<Pin>& pins) {
    std::string s;
    for (std::size_t k = 0; k < pins.size(); ++k) {
        if (k) s += "; ";
        s += vec_str(pins[k].point) + " " + (pins[k].component == 0 ? "x" : "y");
    }
    return s.empty() ? "none" : s;
}

std::vector<Pin> to_pins(const std::string& v) {
    std::vector<Pin> pins;
    if (v == "none" || v.empty()) return pins;
    std::istringstream in(v);
    std::string item;
    while (std::getline(in, item, ';')) {
        std::istringstream p(item);
        Pin pin;
        std::string comp, rest;
        if (!(p >> pin.point.x() >> pin.point.y() >> comp) || (p >> rest) || (comp != "x" && comp != "y"))
            throw ValidationError("pin must read 'x y x|y': '" + trim(item) + "'");
        pin.component = comp == "x" ? 0 : 1;
        pins.push_back(pin);
    }
    return pins;
}

std::string_view to_string(MeshSource m) {
    switch (m) {
        case MeshSource::HalfDisc: return "half_disc";
        case MeshSource::Block: return "block";
        case MeshSource::File: return "file";
    }
    return "block";
}

MeshSource to_mesh_source(const std::string& v) {
    if (v == "half_disc") return MeshSource::HalfDisc;
    if (v == "block") return MeshSource::Block;
    if (v == "file") return MeshSource::File;
    throw ValidationError("mesh must be half_disc, block or file: '" + v + "'");
}

std::string_view to_string(InterfaceSource s) {
    switch (s) {
        case InterfaceSource::Segment: return "segment";
        case InterfaceSource::Body1Boundary: return "body1";
        case InterfaceSource::Body2Boundary: return "body2";
        case InterfaceSource::File: return "file";
    }
    return "segment";
}

InterfaceSource to_interface_source(const std::string& v) {
    if (v == "segment") return InterfaceSource::Segment;
    if (v == "body1") return InterfaceSource::Body1Boundary;
    if (v == "body2") return InterfaceSource::Body2Boundary;
    if (v == "file") return InterfaceSource::File;
    throw ValidationError("hybrid.source must be segment, body1, body2 or file: '" + v + "'");
}

ElementType to_element_type(const std::string& v) {
    if (v == "quad") return ElementType::Quad;
    if (v == "tri") return ElementType::Triangle;
    throw ValidationError("element type must be tri or quad: '" + v + "'");
}

struct Key {
    std::function<std::string(const Scenario&)> get;
    std::function<void(Scenario&, const std::string&)> set;
};

using KeyTable = std::vector<std::pair<std::string, Key>>;

#define HNC_REAL(field) \
    Key { [=](const Scenario& s) { return fmt(s.field); }, [=](Scenario& s, const std::string& v) { s.field = to_real(v); } }
#define HNC_INDEX(field) \
    Key { [=](const Scenario& s) { return std::to_string(s.field); }, \
          [=](Scenario& s, const std::string& v) { s.field = static_cast<decltype(s.field)>(to_index(v)); } }
#define HNC_VEC(field) \
    Key { [=](const Scenario& s) { return vec_str(s.field); }, [=](Scenario& s, const std::string& v) { s.field = to_vec(v); } }
#define HNC_BOOL(field) \
    Key { [=](const Scenario& s) { return bool_str(s.field); }, [=](Scenario& s, const std::string& v) { s.field = to_bool(v); } }
#define HNC_STR(field) \
    Key { [=](const Scenario& s) { return s.field; }, [=](Scenario& s, const std::string& v) { s.field = v; } }
#define HNC_ENUM(field, parse) \
    Key { [=](const Scenario& s) { return std::string(to_string(s.field)); }, \
          [=](Scenario& s, const std::string& v) { s.field = parse(v); } }

const KeyTable& key_table() {
    static const KeyTable table = [] {
        KeyTable t;
        t.emplace_back("scenario.name", HNC_STR(name));
        for (std::size_t i = 0; i < 2; ++i) {
            const std::string p = "body" + std::to_string(i + 1) + ".";
            t.emplace_back(p + "mesh", HNC_ENUM(bodies[i].mesh, to_mesh_source));
            t.emplace_back(p + "file", HNC_STR(bodies[i].file));
            t.emplace_back(p + "disc.center", HNC_VEC(bodies[i].disc.center));
            t.emplace_back(p + "disc.radius", HNC_REAL(bodies[i].disc.radius));
            t.emplace_back(p + "disc.n_arc", HNC_INDEX(bodies[i].disc.n_arc));
            t.emplace_back(p + "disc.n_radial", HNC_INDEX(bodies[i].disc.n_radial));
            t.emplace_back(p + "disc.arc_grading", HNC_REAL(bodies[i].disc.arc_grading));
            t.emplace_back(p + "disc.radial_grading", HNC_REAL(bodies[i].disc.radial_grading));
            t.emplace_back(p + "disc.arc", HNC_ENUM(bodies[i].disc_arc, parse_facet_tag));
            t.emplace_back(p + "disc.top", HNC_ENUM(bodies[i].disc_top, parse_facet_tag));
            t.emplace_back(p + "block.x0", HNC_REAL(bodies[i].block.x0));
            t.emplace_back(p + "block.y0", HNC_REAL(bodies[i].block.y0));
            t.emplace_back(p + "block.x1", HNC_REAL(bodies[i].block.x1));
            t.emplace_back(p + "block.y1", HNC_REAL(bodies[i].block.y1));
            t.emplace_back(p + "block.nx", HNC_INDEX(bodies[i].block.nx));
            t.emplace_back(p + "block.ny", HNC_INDEX(bodies[i].block.ny));
            t.emplace_back(p + "block.x_grading", HNC_REAL(bodies[i].block.x_grading));
            t.emplace_back(p + "block.y_grading", HNC_REAL(bodies[i].block.y_grading));
            t.emplace_back(p + "block.type", HNC_ENUM(bodies[i].block.type, to_element_type));
            const char* sides[] = {"bottom", "right", "top", "left"};
            for (std::size_t k = 0; k < 4; ++k)
                t.emplace_back(p + "block." + sides[k], HNC_ENUM(bodies[i].block_sides[k], parse_facet_tag));
            t.emplace_back(p + "contact.xmin", HNC_REAL(bodies[i].contact_xmin));
            t.emplace_back(p + "contact.xmax", HNC_REAL(bodies[i].contact_xmax));
            t.emplace_back(p + "E", HNC_REAL(bodies[i].E));
            t.emplace_back(p + "nu", HNC_REAL(bodies[i].nu));
            t.emplace_back(p + "force", HNC_VEC(bodies[i].force));
            t.emplace_back(p + "traction", HNC_VEC(bodies[i].traction));
            t.emplace_back(p + "mode", HNC_ENUM(bodies[i].mode, parse_constraint_mode));
            t.emplace_back(p + "fix", Key{[=](const Scenario& s) { return axes_str(s.bodies[i].fix_x, s.bodies[i].fix_y); },
                                          [=](Scenario& s, const std::string& v) {
                                              std::tie(s.bodies[i].fix_x, s.bodies[i].fix_y) = to_axes(v);
                                          }});
            t.emplace_back(p + "pins", Key{[=](const Scenario& s) { return pins_str(s.bodies[i].pins); },
                                           [=](Scenario& s, const std::string& v) { s.bodies[i].pins = to_pins(v); }});
            t.emplace_back(p + "mean", Key{[=](const Scenario& s) { return axes_str(s.bodies[i].mean_x, s.bodies[i].mean_y); },
                                           [=](Scenario& s, const std::string& v) {
                                               std::tie(s.bodies[i].mean_x, s.bodies[i].mean_y) = to_axes(v);
                                           }});
            t.emplace_back(p + "gamma_mult", HNC_REAL(bodies[i].gamma_mult));
            t.emplace_back(p + "gamma_scaling",
                           Key{[=](const Scenario& s) { return std::string(s.bodies[i].gamma_facet_scaled ? "facet" : "constant"); },
                               [=](Scenario& s, const std::string& v) {
                                   if (v != "facet" && v != "constant")
                                       throw ValidationError("gamma_scaling must be facet or constant: '" + v + "'");
                                   s.bodies[i].gamma_facet_scaled = v == "facet";
                               }});
        }
        t.emplace_back("hybrid.kind", HNC_ENUM(hybrid.kind, parse_hybrid_kind));
        t.emplace_back("hybrid.source", HNC_ENUM(hybrid.source, to_interface_source));
        t.emplace_back("hybrid.a", HNC_VEC(hybrid.a));
        t.emplace_back("hybrid.b", HNC_VEC(hybrid.b));
        t.emplace_back("hybrid.count", HNC_INDEX(hybrid.count));
        t.emplace_back("hybrid.orient", HNC_ENUM(hybrid.orient, parse_normal_side));
        t.emplace_back("hybrid.file", HNC_STR(hybrid.file));
        t.emplace_back("hybrid.model", HNC_ENUM(hybrid.model, parse_hybrid_model));
        t.emplace_back("hybrid.stiffness", HNC_REAL(hybrid.stiffness));
        t.emplace_back("solver.tol_rel", HNC_REAL(solver.tol_rel));
        t.emplace_back("solver.max_iter", HNC_INDEX(solver.max_iter));
        t.emplace_back("solver.n_gauss", HNC_INDEX(solver.n_gauss));
        t.emplace_back("solver.subdivisions", HNC_INDEX(solver.subdivisions));
        t.emplace_back("solver.all_active_start", HNC_BOOL(solver.all_active_start));
        t.emplace_back("solver.check_definiteness", HNC_BOOL(solver.check_definiteness));
        return t;
    }();
    return table;
}

#undef HNC_REAL
#undef HNC_INDEX
#undef HNC_VEC
#undef HNC_BOOL
#undef HNC_STR
#undef HNC_ENUM

const Key* find_key(const std::string& name) {
    for (const auto& [k, key] : key_table())
        if (k == name) return &key;
    return nullptr;
}

}  // namespace

Scenario parse_scenario(std::istream& in) {
    Scenario s;
    std::vector<std::string> errors;
    std::map<std::string, int> seen;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        const auto eq = t.find('=');
        const std::string where = "line " + std::to_string(lineno) + ": ";
        if (eq == std::string::npos) {
            errors.push_back(where + "expected 'key = value'");
            continue;
        }
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        const Key* k = find_key(key);
        if (!k) {
            errors.push_back(where + "unknown key '" + key + "'");
            continue;
        }
        if (seen.count(key)) errors.push_back(where + "duplicate key '" + key + "'");
        seen[key] = lineno;
        try {
            k->set(s, value);
        } catch (const std::exception& e) {
            errors.push_back(where + key + ": " + e.what());
        }
    }
    for (const char* key : {"body1.mesh", "body2.mesh", "hybrid.kind"})
        if (!seen.count(key)) errors.push_back(std::string("missing required key '") + key + "'");
    for (const auto& e : validate_scenario(s)) errors.push_back(e);
    if (!errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    return s;
}

Scenario parse_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open scenario file '" + path + "'");
    return parse_scenario(in);
}

void write_scenario(std::ostream& out, const Scenario& s) {
    for (const auto& [k, key] : key_table()) out << k << " = " << key.get(s) << "\n";
}

std::vector<std::string> validate_scenario(const Scenario& s) {
    std::vector<std::string> errors;
    bool any_dirichlet = false;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto& b = s.bodies[i];
        const std::string name = "body" + std::to_string(i + 1);
        if (!(b.E > 0.0) || !(b.nu >= 0.0) || !(b.nu < 0.5))
            errors.push_back(name + ": need E > 0 and 0 <= nu < 0.5");
        if (!(b.gamma_mult > 0.0)) errors.push_back(name + ": gamma_mult must be positive");
        if (b.mesh == MeshSource::File && !std::filesystem::exists(b.file))
            errors.push_back(name + ": mesh file '" + b.file + "' does not exist");
        bool has_dirichlet = !b.pins.empty();
        if (b.fix_x || b.fix_y) {
            if (b.mesh == MeshSource::Block)
                for (auto tag : b.block_sides) has_dirichlet = has_dirichlet || tag == FacetTag::Dirichlet;
            if (b.mesh == MeshSource::HalfDisc)
                has_dirichlet = has_dirichlet || b.disc_arc == FacetTag::Dirichlet || b.disc_top == FacetTag::Dirichlet;
            if (b.mesh == MeshSource::File) has_dirichlet = true;  // checked after loading
        }
        any_dirichlet = any_dirichlet || has_dirichlet;
        if (!has_dirichlet && !b.mean_x && !b.mean_y)
            errors.push_back(name + ": no Dirichlet data and no mean-displacement constraint; "
                                    "rigid motions would make the system singular");
    }
    if (!any_dirichlet) {
        std::string msg = "neither body carries Dirichlet data: the system is singular";
        if (s.bodies[0].mode == ConstraintMode::Equality && s.bodies[1].mode == ConstraintMode::Equality &&
            s.hybrid.model == HybridModelKind::None)
            msg += " (both bodies tied by equality to a hybrid layer without a model)";
        errors.push_back(msg);
    }
    const auto& h = s.hybrid;
    if (h.source == InterfaceSource::Segment && h.count < 1) errors.push_back("hybrid.count must be at least 1");
    if (h.source == InterfaceSource::Segment && (h.a - h.b).norm() == 0.0)
        errors.push_back("hybrid.a and hybrid.b coincide");
    if (h.source == InterfaceSource::File && !std::filesystem::exists(h.file))
        errors.push_back("hybrid.file '" + h.file + "' does not exist");
    if (h.model == HybridModelKind::String && h.kind != HybridKind::P1Vector)
        errors.push_back("hybrid.model = string needs hybrid.kind = p1");
    if (h.model == HybridModelKind::Beam && h.kind != HybridKind::HermiteBeamNormal)
        errors.push_back("hybrid.model = beam needs hybrid.kind = beam");
    if (!(h.stiffness >= 0.0)) errors.push_back("hybrid.stiffness must be non-negative");
    if (!(s.solver.tol_rel > 0.0)) errors.push_back("solver.tol_rel must be positive");
    if (s.solver.max_iter < 1) errors.push_back("solver.max_iter must be at least 1");
    if (s.solver.n_gauss < 1 || s.solver.n_gauss > 3) errors.push_back("solver.n_gauss must be 1, 2 or 3");
    if (s.solver.subdivisions < 0) errors.push_back("solver.subdivisions must be non-negative");
    return errors;
}

Scenario hertz_scenario(Index constants) {
    Scenario s;
    s.name = "hertz";
    auto& disc = s.bodies[0];
    disc.mesh = MeshSource::HalfDisc;
    disc.disc = HalfDiscOptions{};
    disc.disc.n_arc = 100;
    disc.disc.n_radial = 30;
    disc.disc.arc_grading = 3.5;
    disc.disc.radial_grading = 3.0;
    disc.disc_arc = FacetTag::Contact;
    disc.disc_top = FacetTag::Traction;
    disc.contact_xmin = -0.4;
    disc.contact_xmax = 0.4;
    disc.E = 2000.0;
    disc.nu = 0.3;
    // Line load 50 spread over the flat side of length 2.
    disc.traction = Vec2(0.0, -25.0);
    disc.mode = ConstraintMode::Inequality;
    disc.mean_x = true;
    disc.gamma_mult = 10.0;

    auto& block = s.bodies[1];
    block.mesh = MeshSource::Block;
    block.block = BlockOptions{};
    block.block.nx = 90;
    block.block.ny = 30;
    block.block.x_grading = 5.0;
    block.block.y_grading = 3.0;
    block.block_sides = {FacetTag::Dirichlet, FacetTag::Neumann, FacetTag::Contact, FacetTag::Neumann};
    block.contact_xmin = -0.4;
    block.contact_xmax = 0.4;
    block.E = 7000.0;
    block.nu = 0.3;
    block.mode = ConstraintMode::Equality;
    block.fix_x = false;
    block.fix_y = true;
    block.pins = {Pin{Vec2(0.0, -1.0), 0}};
    block.gamma_mult = 10.0;

    s.hybrid.kind = HybridKind::P0NormalScalar;
    s.hybrid.source = InterfaceSource::Segment;
    s.hybrid.a = Vec2(-0.4, 0.0);
    s.hybrid.b = Vec2(0.4, 0.0);
    s.hybrid.count = constants;
    s.hybrid.orient = NormalSide::Left;
    s.hybrid.model = HybridModelKind::None;
    return s;
}

Scenario hertz_convergence_scenario() {
    Scenario s = hertz_scenario(200);
    s.name = "hertz-convergence";
    auto& disc = s.bodies[0].disc;
    auto& block = s.bodies[1].block;
    disc.n_arc = 24;
    disc.n_radial = 8;
    block.nx = 20;
    block.ny = 8;
    disc.arc_grading = disc.radial_grading = 1.5;
    block.x_grading = block.y_grading = 1.5;
    return s;
}

Scenario patch_scenario(ConstraintMode mode, Real pressure) {
    Scenario s;
    s.name = "patch";
    auto& top = s.bodies[0];
    top.mesh = MeshSource::Block;
    top.block = BlockOptions{0.0, 0.0, 1.0, 1.0, 4, 4, 0.0, 0.0, ElementType::Quad};
    // bottom, right, top, left
    top.block_sides = {FacetTag::Contact, FacetTag::Neumann, FacetTag::Traction, FacetTag::Neumann};
    top.E = 100.0;
    top.nu = 0.3;
    top.traction = Vec2(0.0, -pressure);
    top.mode = mode;
    top.fix_x = true;
    top.fix_y = false;
    top.pins = {Pin{Vec2(0.0, 1.0), 0}};
    top.mean_y = false;
    top.gamma_mult = 10.0;

    auto& bottom = s.bodies[1];
    bottom.mesh = MeshSource::Block;
    bottom.block = BlockOptions{0.0, -1.0, 1.0, 0.0, 4, 4, 0.0, 0.0, ElementType::Quad};
    bottom.block_sides = {FacetTag::Dirichlet, FacetTag::Neumann, FacetTag::Contact, FacetTag::Neumann};
    bottom.E = 200.0;
    bottom.nu = 0.3;
    bottom.mode = ConstraintMode::Equality;
    bottom.fix_x = false;
    bottom.fix_y = true;
    bottom.pins = {Pin{Vec2(0.0, -1.0), 0}};
    bottom.gamma_mult = 10.0;

    s.hybrid.kind = HybridKind::P0NormalScalar;
    s.hybrid.source = InterfaceSource::Segment;
    s.hybrid.a = Vec2(0.0, 0.0);
    s.hybrid.b = Vec2(1.0, 0.0);
    s.hybrid.count = 4;
    s.hybrid.orient = NormalSide::Left;
    return s;
}

Scenario string_scenario(Real stiffness) {
    Scenario s;
    s.name = "string";
    auto& disc = s.bodies[0];
    disc.mesh = MeshSource::HalfDisc;
    disc.disc = HalfDiscOptions{};
    disc.disc.n_arc = 48;
    disc.disc.n_radial = 14;
    disc.disc.arc_grading = 2.0;
    disc.disc.radial_grading = 2.0;
    disc.disc_arc = FacetTag::Contact;
    disc.disc_top = FacetTag::Neumann;
    disc.contact_xmin = -0.5;
    disc.contact_xmax = 0.5;
    disc.E = 1000.0;
    disc.nu = 0.33;
    disc.force = Vec2(0.0, -10.0);
    disc.mode = ConstraintMode::Equality;
    disc.mean_x = true;
    disc.gamma_mult = 100.0;

    auto& block = s.bodies[1];
    block.mesh = MeshSource::Block;
    block.block = BlockOptions{};
    block.block.nx = 48;
    block.block.ny = 16;
    block.block.x_grading = 3.0;
    block.block.y_grading = 2.0;
    block.block_sides = {FacetTag::Dirichlet, FacetTag::Dirichlet, FacetTag::Contact, FacetTag::Dirichlet};
    block.contact_xmin = -0.5;
    block.contact_xmax = 0.5;
    block.E = 100.0;
    block.nu = 0.3;
    block.mode = ConstraintMode::Inequality;
    block.gamma_mult = 100.0;

    s.hybrid.kind = HybridKind::P1Vector;
    s.hybrid.source = InterfaceSource::Body1Boundary;
    s.hybrid.orient = NormalSide::Left;
    s.hybrid.model = HybridModelKind::String;
    s.hybrid.stiffness = stiffness;
    return s;
}

Scenario refined(Scenario s, Index k) {
    if (k < 1) throw ValidationError("refinement factor must be at least 1");
    for (auto& b : s.bodies) {
        b.disc.n_arc *= k;
        b.disc.n_radial *= k;
        b.block.nx *= k;
        b.block.ny *= k;
    }
    return s;
}

Scenario with_gamma_mult(Scenario s, Real c) {
    for (auto& b : s.bodies) b.gamma_mult = c;
    return s;
}

namespace {

BodyMesh generate_body_mesh(const BodyScenario& b) {
    switch (b.mesh) {
        case MeshSource::HalfDisc:
            return half_disc_mesh(b.disc, [&](DiscSide side, const Vec2&) {
                return side == DiscSide::Arc ? b.disc_arc : b.disc_top;
            });
        case MeshSource::Block:
            return block_mesh(b.block, [&](RectSide side, const Vec2&) {
                return b.block_sides[static_cast<std::size_t>(side)];
            });
        case MeshSource::File:
            return read_body_mesh_file(b.file);
    }
    throw ValidationError("unknown mesh source");
}

}  // namespace

BodyMesh build_body_mesh(const BodyScenario& b) {
    BodyMesh mesh = generate_body_mesh(b);
    if (!(b.contact_xmax > b.contact_xmin) || b.mesh == MeshSource::File) return mesh;
    // Contact facets keep their tag when they overlap [xmin, xmax].
    std::vector<TaggedFacet> tagged;
    for (const auto& f : mesh.facets()) {
        FacetTag tag = f.tag;
        const Real xa = mesh.node(f.nodes[0]).x(), xb = mesh.node(f.nodes[1]).x();
        if (tag == FacetTag::Contact && (std::max(xa, xb) <= b.contact_xmin || std::min(xa, xb) >= b.contact_xmax))
            tag = FacetTag::Neumann;
        tagged.push_back({f.nodes, tag});
    }
    std::vector<Vec2> nodes = mesh.nodes();
    std::vector<std::array<Index, 4>> elements = mesh.elements();
    return BodyMesh(std::move(nodes), mesh.element_type(), std::move(elements), std::move(tagged));
}

namespace {

BodySetup body_setup(const BodyScenario& b) {
    BodySetup out;
    out.mesh = build_body_mesh(b);
    out.material = Material::plane_strain(b.E, b.nu);
    out.body_force = b.force;
    out.traction = b.traction;
    out.mode = b.mode;
    out.fix_x = b.fix_x;
    out.fix_y = b.fix_y;
    out.pins = b.pins;
    out.mean_x = b.mean_x;
    out.mean_y = b.mean_y;
    out.nitsche = NitscheParams{b.gamma_mult * b.E, b.gamma_facet_scaled};
    return out;
}

}  // namespace

ProblemSetup build_setup(const Scenario& s) {
    const auto errors = validate_scenario(s);
    if (!errors.empty()) {
        std::string msg = "invalid scenario:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
    ProblemSetup setup;
    setup.bodies = {body_setup(s.bodies[0]), body_setup(s.bodies[1])};
    InterfaceMesh iface;
    switch (s.hybrid.source) {
        case InterfaceSource::Segment:
            iface = InterfaceMesh::subdivide(s.hybrid.a, s.hybrid.b, s.hybrid.count, s.hybrid.orient);
            break;
        case InterfaceSource::Body1Boundary:
            iface = interface_from_boundary(setup.bodies[0].mesh, FacetTag::Contact, s.hybrid.orient);
            break;
        case InterfaceSource::Body2Boundary:
            iface = interface_from_boundary(setup.bodies[1].mesh, FacetTag::Contact, s.hybrid.orient);
            break;
        case InterfaceSource::File:
            iface = read_interface_file(s.hybrid.file);
            break;
    }
    setup.space = HybridSpace(s.hybrid.kind, std::move(iface));
    setup.model = HybridModel{s.hybrid.model, s.hybrid.stiffness};
    setup.n_gauss = s.solver.n_gauss;
    setup.subdivisions = s.solver.subdivisions;
    return setup;
}

NewtonOptions newton_options(const Scenario& s) {
    NewtonOptions o;
    o.tol_rel = s.solver.tol_rel;
    o.max_iter = s.solver.max_iter;
    o.all_active_start = s.solver.all_active_start;
    o.check_definiteness = s.solver.check_definiteness;
    return o;
}

Solved solve_scenario(const Scenario& s, std::ostream* log) {
    Solved out{build_system(build_setup(s)), {}};
    NewtonOptions o = newton_options(s);
    o.log = log;
    out.state = semismooth_newton(out.system, o);
    return out;
}

}  // namespace hnc
