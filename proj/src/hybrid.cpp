#include "hnc/hybrid.hpp"

#include <string>

namespace hnc {

std::string_view to_string(HybridKind kind) {
    switch (kind) {
        case HybridKind::P0NormalScalar: return "p0";
        case HybridKind::P1Vector: return "p1";
        case HybridKind::HermiteBeamNormal: return "beam";
    }
    return "p0";
}

std::string_view to_string(HybridModelKind kind) {
    switch (kind) {
        case HybridModelKind::None: return "none";
        case HybridModelKind::String: return "string";
        case HybridModelKind::Beam: return "beam";
    }
    return "none";
}

HybridKind parse_hybrid_kind(std::string_view text) {
    if (text == "p0") return HybridKind::P0NormalScalar;
    if (text == "p1") return HybridKind::P1Vector;
    if (text == "beam") return HybridKind::HermiteBeamNormal;
    throw ValidationError("unknown hybrid space '" + std::string(text) + "' (expected p0, p1 or beam)");
}

HybridModelKind parse_hybrid_model(std::string_view text) {
    if (text == "none") return HybridModelKind::None;
    if (text == "string") return HybridModelKind::String;
    if (text == "beam") return HybridModelKind::Beam;
    throw ValidationError("unknown hybrid model '" + std::string(text) + "' (expected none, string or beam)");
}

HybridSpace::HybridSpace(HybridKind kind, InterfaceMesh interface) : kind_(kind), interface_(std::move(interface)) {}

Index HybridSpace::dof_count() const {
    switch (kind_) {
        case HybridKind::P0NormalScalar: return interface_.segment_count();
        case HybridKind::P1Vector:
        case HybridKind::HermiteBeamNormal: return 2 * interface_.vertex_count();
    }
    return 0;
}

Real HybridRow::apply(const Vector& dofs_vec) const {
    Real v = 0.0;
    for (int k = 0; k < size; ++k) v += coef[static_cast<std::size_t>(k)] * dofs_vec(dofs[static_cast<std::size_t>(k)]);
    return v;
}

std::array<Real, 4> hermite_basis(Real t, Real length) {
    const Real t2 = t * t, t3 = t2 * t;
    return {1.0 - 3.0 * t2 + 2.0 * t3, length * (t - 2.0 * t2 + t3), 3.0 * t2 - 2.0 * t3, length * (t3 - t2)};
}

SparseMatrix assemble_a0(const HybridModel& model, const HybridSpace& space) {
    const Index n = space.dof_count();
    SparseMatrix A(n, n);
    if (model.kind == HybridModelKind::None) return A;
    if (model.stiffness < 0.0) throw ValidationError("hybrid model stiffness must be >= 0");

    const auto& iface = space.interface();
    std::vector<Triplet> trips;
    if (model.kind == HybridModelKind::String) {
        if (space.kind() != HybridKind::P1Vector)
            throw ValidationError("string model requires the p1 hybrid space");
        for (Index s = 0; s < iface.segment_count(); ++s) {
            const auto [a, b] = iface.segment(s);
            const Vec2 tau = iface.tangent(s);
            // stretch = tau . (u_b - u_a) / L; energy density k_s stretch^2 over length L
            const std::array<Index, 4> dofs{2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
            const std::array<Real, 4> g{-tau.x(), -tau.y(), tau.x(), tau.y()};
            const Real k = model.stiffness / iface.length(s);
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    trips.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)],
                                       k * g[static_cast<std::size_t>(i)] * g[static_cast<std::size_t>(j)]);
        }
    } else {
        if (space.kind() != HybridKind::HermiteBeamNormal)
            throw ValidationError("beam model requires the beam hybrid space");
        for (Index s = 0; s < iface.segment_count(); ++s) {
            const auto [a, b] = iface.segment(s);
            const Real L = iface.length(s);
            const Real c = model.stiffness / (L * L * L);
            Eigen::Matrix4d Ke;
            Ke << 12, 6 * L, -12, 6 * L,            //
                6 * L, 4 * L * L, -6 * L, 2 * L * L,  //
                -12, -6 * L, 12, -6 * L,              //
                6 * L, 2 * L * L, -6 * L, 4 * L * L;
            Ke *= c;
            const std::array<Index, 4> dofs{2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
            for (int i = 0; i < 4; ++i)
                for (int j = 0; j < 4; ++j)
                    trips.emplace_back(dofs[static_cast<std::size_t>(i)], dofs[static_cast<std::size_t>(j)], Ke(i, j));
        }
    }
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

HybridRow eval_normal_disp_row(const HybridSpace& space, const ClosestPointResult& cp) {
    const auto& iface = space.interface();
    const Index s = cp.segment;
    const auto [a, b] = iface.segment(s);
    // +1 when read from the normal side of the segment, -1 from the other.
    const Real side = cp.normal.dot(iface.normal(s)) >= 0.0 ? 1.0 : -1.0;
    HybridRow row;
    switch (space.kind()) {
        case HybridKind::P0NormalScalar:
            row.size = 1;
            row.dofs[0] = s;
            row.coef[0] = side;
            break;
        case HybridKind::P1Vector:
            row.size = 4;
            row.dofs = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
            row.coef = {(1.0 - cp.t) * cp.normal.x(), (1.0 - cp.t) * cp.normal.y(), cp.t * cp.normal.x(),
                        cp.t * cp.normal.y()};
            break;
        case HybridKind::HermiteBeamNormal: {
            const auto H = hermite_basis(cp.t, iface.length(s));
            row.size = 4;
            row.dofs = {2 * a, 2 * a + 1, 2 * b, 2 * b + 1};
            for (int k = 0; k < 4; ++k) row.coef[static_cast<std::size_t>(k)] = side * H[static_cast<std::size_t>(k)];
            break;
        }
    }
    return row;
}

Real eval_normal_disp(const HybridSpace& space, const Vector& dofs, const ClosestPointResult& cp) {
    return eval_normal_disp_row(space, cp).apply(dofs);
}

}  // namespace hnc
