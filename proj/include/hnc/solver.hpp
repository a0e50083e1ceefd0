#pragma once

/**
 * @file solver.hpp
 * @brief Global system of the two-body hybrid contact problem and its
 *        semismooth Newton solver.
 *
 * Unknowns are laid out by DofLayout. The affine part of the residual is
 *
 *   [ K_a  C^T ] [u]   [f]
 *   [ C    0   ] [l] - [0]
 *
 * with K_a the elastic blocks (plus a0 when the hybrid carries a model) and C
 * the scalar constraints (zero mean displacement rows and rows pinning
 * hybrid modes that no term of the problem sees). The contact operator adds
 * the nonlinear interface terms.
 */

#include "hnc/contact.hpp"

#include <Eigen/SparseLU>

#include <iosfwd>
#include <memory>
#include <optional>
#include <vector>

namespace hnc {

struct Pin {
    Vec2 point = Vec2::Zero();
    int component = 0;

    bool operator==(const Pin&) const = default;
};

struct BodySetup {
    BodyMesh mesh;
    Material material;
    Vec2 body_force = Vec2::Zero();
    /// Applied on facets tagged Traction.
    Vec2 traction = Vec2::Zero();
    ConstraintMode mode = ConstraintMode::Inequality;
    /// Components fixed on Dirichlet facets.
    bool fix_x = true;
    bool fix_y = true;
    /// Single DOFs fixed at the node nearest to each point.
    std::vector<Pin> pins;
    /// Zero mean displacement along x / y enforced by a scalar multiplier.
    bool mean_x = false;
    bool mean_y = false;
    NitscheParams nitsche;
};

struct ProblemSetup {
    std::array<BodySetup, 2> bodies;
    HybridSpace space;
    HybridModel model;
    int n_gauss = 2;
    /// Facet subdivisions for contact quadrature; 0 picks enough to place
    /// n_gauss points on every hybrid segment.
    int subdivisions = 0;
};

/// Constraint row over global unknowns.
struct ConstraintRow {
    std::vector<std::pair<Index, Real>> entries;
    std::string label;
    /// Factor applied to the row in the assembled matrix.
    Real scale = 1.0;
};

class System {
public:
    const DofLayout& layout() const { return layout_; }
    const ProblemSetup& setup() const { return *setup_; }
    const BodySetup& body(int i) const { return setup_->bodies[static_cast<std::size_t>(i - 1)]; }
    const HybridSpace& space() const { return setup_->space; }
    bool has_a0() const { return setup_->model.kind != HybridModelKind::None; }

    /// Affine block including constraints.
    const SparseMatrix& linear() const { return linear_; }
    const Vector& load() const { return load_; }
    const ContactOperator& contact() const { return contact_; }
    const std::vector<ContactPairing>& pairings() const { return pairings_; }
    const std::vector<ConstraintRow>& constraints() const { return constraints_; }
    int subdivisions(int body) const { return subdivisions_[static_cast<std::size_t>(body - 1)]; }
    /// True when Dirichlet data and mean constraints leave a rigid motion of
    /// the body free, so only contact holds it.
    bool floating(int body) const;
    /// Gram matrix of the rigid modes (tx, ty, rotation / body size) seen by
    /// the body's Dirichlet and mean constraints.
    const Eigen::Matrix3d& rigid_gram(int body) const { return rigid_gram_[static_cast<std::size_t>(body - 1)]; }
    /// Rigid modes seen by the normal jump at a pairing.
    Eigen::Vector3d rigid_row(std::size_t pairing) const;

    /// Body-local elastic stiffness (all DOFs, before elimination).
    const SparseMatrix& body_stiffness(int body) const { return body_k_[static_cast<std::size_t>(body - 1)]; }
    const SparseMatrix& a0() const { return a0_; }

    Vector residual(const Vector& x) const;
    Vector residual(const Vector& x, std::span<const char> active) const;
    SparseMatrix jacobian(std::span<const char> active) const;

    /// sum over i in I_a of a_i(u_i, u_i).
    Real energy_norm_sq(const Vector& x) const;
    /// Discrete augmented Lagrangian (with multiplier terms); its gradient is residual().
    Real lagrangian(const Vector& x) const;

private:
    friend System build_system(std::shared_ptr<const ProblemSetup> setup);

    std::shared_ptr<const ProblemSetup> setup_;
    DofLayout layout_;
    SparseMatrix linear_;
    Vector load_;
    ContactOperator contact_;
    std::vector<ContactPairing> pairings_;
    std::vector<ConstraintRow> constraints_;
    std::array<SparseMatrix, 2> body_k_;
    SparseMatrix a0_;
    std::array<int, 2> subdivisions_{1, 1};
    std::array<Eigen::Matrix3d, 2> rigid_gram_;
    std::array<Vec2, 2> rigid_center_;
    std::array<Real, 2> rigid_length_{1.0, 1.0};
};

/// Validates the setup and assembles every linear block. Throws
/// ValidationError when the system would be singular by construction.
System build_system(std::shared_ptr<const ProblemSetup> setup);
System build_system(ProblemSetup setup);

/// Fixed-DOF flags of a body (Dirichlet facets and pins).
std::vector<char> fixed_dofs(const BodySetup& body);

/// Column ordering for SparseLU: COLAMD on the sparse part, with dense rows
/// and columns (constraint multipliers) moved to the end.
struct DenseLastOrdering {
    using PermutationType = Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic, int>;
    void operator()(const SparseMatrix& mat, PermutationType& perm) const;
};

/// Factorization wrapper: sparse LU with column reordering, reusing the
/// symbolic analysis while the sparsity pattern is unchanged.
class LinearSolver {
public:
    /// Solves A x = b. Throws SolverError when A is singular or the
    /// residual check ||A x - b|| <= 1e-10 (||A|| ||x|| + ||b||) fails.
    Vector solve(const SparseMatrix& A, const Vector& b);

private:
    Eigen::SparseLU<SparseMatrix, DenseLastOrdering> lu_;
    bool analyzed_ = false;
    Index rows_ = -1;
    Index nnz_ = -1;
};

Vector linear_solve(const SparseMatrix& A, const Vector& b);

struct NewtonOptions {
    Real tol_rel = 1e-10;
    int max_iter = 25;
    /// Linearize the first step with every inequality pairing active.
    bool all_active_start = true;
    /// When the active pairings leave a floating body free to move rigidly,
    /// linearize with extra pairings active, smallest Sigma first.
    bool support_floating = true;
    /// Count negative eigenvalues of the final fixed-active-set matrix on the
    /// constrained subspace (dense, skipped above 2500 unknowns).
    bool check_definiteness = false;
    std::ostream* log = nullptr;
};

struct IterationRecord {
    int iter = 0;
    Real residual = 0.0;
    Index active = 0;
};

struct SystemState {
    Vector x;
    std::vector<IterationRecord> log;
    /// Number of linear solves performed.
    int iterations = 0;
    std::vector<char> active;
    /// Negative directions found by the definiteness check (-1 when not run).
    Index negative_pivots = -1;
};

class NonConvergenceError : public Error {
public:
    NonConvergenceError(const std::string& what, std::vector<IterationRecord> log)
        : Error(what), log_(std::move(log)) {}
    const std::vector<IterationRecord>& log() const { return log_; }

private:
    std::vector<IterationRecord> log_;
};

/// Semismooth Newton on the full residual from the zero state. Converged when
/// ||R|| <= tol_rel ||f|| (absolute floor 1e-12 when f = 0).
SystemState semismooth_newton(const System& system, const NewtonOptions& options = {});

/// "iter k residual r active m"
void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& log);

}  // namespace hnc
