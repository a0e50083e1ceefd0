#pragma once

/**
 * @file contact.hpp
 * @brief Interface terms of the hybrid Nitsche method.
 *
 * For a pairing with Nitsche penalty gamma = gamma0 / h and weight w_q:
 *
 *   Sigma = sigma_n(v_i) - gamma ([v_n]_i - rho)
 *   S     = Sigma (equality) or min(Sigma, 0) (inequality)
 *   DS(w) = sigma_n(w_i) - gamma [w_n]_i
 *
 * and the contact residual tested with w is
 *
 *   sum_q w_q / gamma * (S(v) DS(w) - sigma_n(v) sigma_n(w)),
 *
 * the gradient of sum_q w_q / (2 gamma) (S^2 - sigma_n^2).
 *
 * The jump is [v_n]_i = (n_{i,0}, v_0(p_0) - v_i(z)), so that
 * rho - [v_n]_i is the deformed gap.
 */

#include "hnc/elasticity.hpp"
#include "hnc/hybrid.hpp"
#include "hnc/layout.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace hnc {

enum class ConstraintMode { Equality, Inequality };

std::string_view to_string(ConstraintMode mode);
ConstraintMode parse_constraint_mode(std::string_view text);

struct ContactPairing {
    int body = 1;
    Vec2 z = Vec2::Zero();
    Real weight = 0.0;
    Real h = 0.0;
    Index facet = -1;
    /// Parameter of z along the facet.
    Real t = 0.0;
    Index element = -1;
    /// Closest point; cp.normal is n_{i,0} (pointing into the body) and
    /// cp.distance is the gap rho.
    ClosestPointResult cp;
    ConstraintMode mode = ConstraintMode::Inequality;

    Real rho() const { return cp.distance; }
    const Vec2& normal() const { return cp.normal; }
};

/// One pairing per quadrature point of the body's contact facets. The
/// interface normal is flipped when the body lies on its negative side.
/// Throws ValidationError when the body has no contact facets.
std::vector<ContactPairing> build_pairings(const BodyMesh& body, const InterfaceMesh& interface,
                                           ConstraintMode mode, int n_gauss, int body_id = 1,
                                           int subdivisions = 1);

/// [v_n]_i at a pairing.
Real normal_jump(const ContactPairing& pairing, const BodyMesh& body, const Vector& body_disp,
                 const HybridSpace& space, const Vector& hybrid_dofs);

Real S_eval(Real Sigma, ConstraintMode mode);
bool S_active(Real Sigma, ConstraintMode mode);

struct NitscheParams {
    Real gamma0 = 1.0;
    /// gamma = gamma0 / h when true, gamma = gamma0 otherwise.
    bool facet_scaled = true;

    Real gamma(Real h) const { return facet_scaled ? gamma0 / h : gamma0; }
};

/// Fixed-size sparse row in global numbering.
struct GlobalRow {
    static constexpr int capacity = 12;
    std::array<Index, capacity> idx{};
    std::array<Real, capacity> val{};
    int size = 0;

    void add(Index i, Real v);
    Real apply(const Vector& x) const;
};

/// Values of the interface quantities at one pairing.
struct ContactStateEval {
    Real sigma_n = 0.0;
    Real jump = 0.0;
    Real Sigma = 0.0;
    Real S = 0.0;
    bool active = false;
};

/// A pairing linearized onto the global unknowns.
struct LinearPairing {
    GlobalRow sigma;  // v -> sigma_n(v_i)
    GlobalRow jump;   // v -> [v_n]_i
    Real rho = 0.0;
    Real gamma = 1.0;
    Real weight = 0.0;
    ConstraintMode mode = ConstraintMode::Inequality;
};

LinearPairing linearize_pairing(const ContactPairing& p, const BodyMesh& body, const Material& mat,
                                const HybridSpace& space, const DofLayout& layout, const NitscheParams& params);

/// Residual and Jacobian of the contact terms over a fixed pairing set.
/// The unsuffixed members are OpenMP kernels; *_reference are serial loops.
class ContactOperator {
public:
    ContactOperator() = default;
    ContactOperator(std::vector<LinearPairing> pairings, Index dof_count);

    Index dof_count() const { return n_; }
    const std::vector<LinearPairing>& pairings() const { return pairings_; }
    std::size_t size() const { return pairings_.size(); }

    ContactStateEval evaluate(std::size_t q, const Vector& x) const;
    std::vector<ContactStateEval> evaluate_all(const Vector& x) const;

    /// Natural active flags: equality pairings always, inequality when Sigma < 0.
    std::vector<char> active_set(const Vector& x) const;

    /// Residual with S taken from the given active flags (S = Sigma where
    /// active, 0 elsewhere); with the natural flags this is the true residual.
    Vector residual(const Vector& x, std::span<const char> active) const;
    Vector residual(const Vector& x) const;
    Vector residual_reference(const Vector& x, std::span<const char> active) const;

    /// Jacobian for the given active flags. Entries of inactive pairings are
    /// stored as explicit zeros so the pattern is independent of the flags.
    SparseMatrix jacobian(std::span<const char> active) const;
    SparseMatrix jacobian_reference(std::span<const char> active) const;

    /// b(v, w) and c(v, w).
    Real b_form(const Vector& v, const Vector& w) const;
    Real c_form(const Vector& v, const Vector& w) const;

    /// sum_q w_q / gamma (S(v) - S(w))^2.
    Real s_distance_sq(const Vector& v, const Vector& w) const;

    /// sum_q w_q / (2 gamma) (S^2 - sigma_n^2).
    Real energy(const Vector& x) const;

private:
    std::vector<LinearPairing> pairings_;
    Index n_ = 0;
};

}  // namespace hnc
