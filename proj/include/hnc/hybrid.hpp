#pragma once

/**
 * @file hybrid.hpp
 * @brief Discrete spaces and stiffness forms on the interface polyline.
 *
 * P0_normal_scalar: one normal displacement per segment, measured along the
 * interface's own segment normal. P1_vector: (u_x, u_y) per vertex.
 * Hermite_beam_normal: (w, dw/ds) per vertex with w the deflection along the
 * segment normal.
 *
 * Evaluation takes a normal n_{i,0} which is +/- the segment normal, so the
 * same hybrid field can be read from either side of the interface.
 */

#include "hnc/mesh.hpp"

#include <string_view>
#include <vector>

namespace hnc {

enum class HybridKind { P0NormalScalar, P1Vector, HermiteBeamNormal };
enum class HybridModelKind { None, String, Beam };

std::string_view to_string(HybridKind kind);
std::string_view to_string(HybridModelKind kind);
HybridKind parse_hybrid_kind(std::string_view text);
HybridModelKind parse_hybrid_model(std::string_view text);

class HybridSpace {
public:
    HybridSpace() = default;
    HybridSpace(HybridKind kind, InterfaceMesh interface);

    HybridKind kind() const { return kind_; }
    const InterfaceMesh& interface() const { return interface_; }
    Index dof_count() const;

private:
    HybridKind kind_ = HybridKind::P0NormalScalar;
    InterfaceMesh interface_;
};

struct HybridModel {
    HybridModelKind kind = HybridModelKind::None;
    /// String: axial stiffness k_s = E t. Beam: bending stiffness D_b.
    Real stiffness = 0.0;
};

/// Sparse linear functional over hybrid DOFs.
struct HybridRow {
    std::array<Index, 4> dofs{};
    std::array<Real, 4> coef{};
    int size = 0;

    Real apply(const Vector& dofs_vec) const;
};

/// a0 on the hybrid space. Zero matrix for model None; throws
/// ValidationError for string on a non-P1 space or beam on a non-Hermite
/// space.
SparseMatrix assemble_a0(const HybridModel& model, const HybridSpace& space);

/// (normal, u0(p0)) at the closest point described by cp, with cp.normal
/// taken as the reading direction.
Real eval_normal_disp(const HybridSpace& space, const Vector& dofs, const ClosestPointResult& cp);

/// Row r with r . dofs == eval_normal_disp(space, dofs, cp).
HybridRow eval_normal_disp_row(const HybridSpace& space, const ClosestPointResult& cp);

/// Cubic Hermite basis on [0,1] for a segment of length L:
/// values multiply (w_a, theta_a, w_b, theta_b).
std::array<Real, 4> hermite_basis(Real t, Real length);

}  // namespace hnc
