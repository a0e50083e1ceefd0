#include "hnc/solver.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <set>
#include <sstream>

namespace hnc {

std::vector<char> fixed_dofs(const BodySetup& body) {
    const auto& mesh = body.mesh;
    std::vector<char> fixed(static_cast<std::size_t>(mesh.dof_count()), 0);
    for (Index f : mesh.facets_with_tag(FacetTag::Dirichlet)) {
        for (Index n : mesh.facets()[static_cast<std::size_t>(f)].nodes) {
            if (body.fix_x) fixed[static_cast<std::size_t>(2 * n)] = 1;
            if (body.fix_y) fixed[static_cast<std::size_t>(2 * n + 1)] = 1;
        }
    }
    for (const auto& pin : body.pins) {
        Index best = 0;
        Real best_d = std::numeric_limits<Real>::infinity();
        for (Index n = 0; n < mesh.node_count(); ++n) {
            const Real d = (mesh.node(n) - pin.point).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = n;
            }
        }
        fixed[static_cast<std::size_t>(2 * best + pin.component)] = 1;
    }
    return fixed;
}

namespace {

void validate(const ProblemSetup& s) {
    std::vector<std::string> errors;
    bool any_fixed = false;
    for (int i = 0; i < 2; ++i) {
        const auto& b = s.bodies[static_cast<std::size_t>(i)];
        const std::string name = "body" + std::to_string(i + 1);
        if (!b.mesh.has_tag(FacetTag::Contact)) errors.push_back(name + " has no contact facets");
        const bool has_dirichlet = (b.mesh.has_tag(FacetTag::Dirichlet) && (b.fix_x || b.fix_y)) || !b.pins.empty();
        any_fixed = any_fixed || has_dirichlet;
        if (!has_dirichlet && !b.mean_x && !b.mean_y)
            errors.push_back(name + " has neither Dirichlet data nor a mean-displacement constraint: "
                                    "its rigid motions make the system singular");
        if (!(b.nitsche.gamma0 > 0.0)) errors.push_back(name + " needs gamma0 > 0");
    }
    if (!any_fixed) errors.push_back("no body carries Dirichlet data: the coupled system is singular");
    if (s.n_gauss < 1 || s.n_gauss > 3) errors.push_back("n_gauss must be 1, 2 or 3");
    if (!errors.empty()) {
        std::string msg = "invalid problem:";
        for (const auto& e : errors) msg += "\n  " + e;
        throw ValidationError(msg);
    }
}

int auto_subdivisions(const BodyMesh& mesh, const InterfaceMesh& iface) {
    Real hmax = 0.0;
    for (Index f : mesh.facets_with_tag(FacetTag::Contact)) hmax = std::max(hmax, mesh.facet_length(f));
    return std::max(1, static_cast<int>(std::ceil(hmax / iface.min_length() - 1e-9)));
}

// Hybrid modes invisible to a0 and to every pairing (taken active) are
// pinned to zero; they carry no energy and would make the system singular.
std::vector<Vector> hybrid_null_modes(const ProblemSetup& s, const SparseMatrix& a0,
                                      const std::vector<ContactPairing>& pairings) {
    const Index n = s.space.dof_count();
    std::vector<Triplet> trips;
    for (const auto& p : pairings) {
        const HybridRow r = eval_normal_disp_row(s.space, p.cp);
        const Real w = p.weight * s.bodies[static_cast<std::size_t>(p.body - 1)].nitsche.gamma(p.h);
        for (int i = 0; i < r.size; ++i)
            for (int j = 0; j < r.size; ++j)
                trips.emplace_back(r.dofs[static_cast<std::size_t>(i)], r.dofs[static_cast<std::size_t>(j)],
                                   w * r.coef[static_cast<std::size_t>(i)] * r.coef[static_cast<std::size_t>(j)]);
    }
    SparseMatrix H(n, n);
    H.setFromTriplets(trips.begin(), trips.end());
    if (s.model.kind != HybridModelKind::None) H += a0;

    std::vector<Vector> modes;
    constexpr Index dense_limit = 1500;
    if (s.space.kind() == HybridKind::P0NormalScalar || n > dense_limit) {
        const Vector d = H.diagonal();
        for (Index k = 0; k < n; ++k) {
            if (d(k) == 0.0) {
                Vector e = Vector::Zero(n);
                e(k) = 1.0;
                modes.push_back(e);
            }
        }
        return modes;
    }
    const DenseMatrix Hd(H);
    Eigen::SelfAdjointEigenSolver<DenseMatrix> eig(Hd);
    const Vector& ev = eig.eigenvalues();
    const Real top = std::max(ev.cwiseAbs().maxCoeff(), std::numeric_limits<Real>::min());
    for (Index k = 0; k < n; ++k)
        if (ev(k) < 1e-10 * top) modes.push_back(eig.eigenvectors().col(k));
    return modes;
}

Eigen::RowVector3d rigid_mode_row(const Vec2& d, Real length, const Vec2& dir) {
    return {dir.x(), dir.y(), (dir.y() * d.x() - dir.x() * d.y()) / length};
}

Eigen::Matrix3d rigid_gram(const BodySetup& b, const std::vector<char>& fixed, const Vec2& c, Real length) {
    const auto& mesh = b.mesh;
    const Vec2 ex(1.0, 0.0), ey(0.0, 1.0);
    Eigen::Matrix3d G = Eigen::Matrix3d::Zero();
    for (Index n = 0; n < mesh.node_count(); ++n)
        for (int comp = 0; comp < 2; ++comp)
            if (fixed[static_cast<std::size_t>(2 * n + comp)]) {
                const Eigen::RowVector3d r = rigid_mode_row(mesh.node(n) - c, length, comp == 0 ? ex : ey);
                G += r.transpose() * r;
            }
    const Vector m = node_integrals(mesh) / mesh.area();
    for (int comp = 0; comp < 2; ++comp) {
        if (!(comp == 0 ? b.mean_x : b.mean_y)) continue;
        Eigen::RowVector3d r = Eigen::RowVector3d::Zero();
        for (Index n = 0; n < mesh.node_count(); ++n)
            r += m(n) * rigid_mode_row(mesh.node(n) - c, length, comp == 0 ? ex : ey);
        G += r.transpose() * r;
    }
    return G;
}

bool full_rank(const Eigen::Matrix3d& G) {
    const Eigen::Vector3d ev = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(G, Eigen::EigenvaluesOnly).eigenvalues();
    return ev(0) > 1e-10 * std::max(ev(2), 1e-300);
}

}  // namespace

bool System::floating(int body) const { return !full_rank(rigid_gram(body)); }

Eigen::Vector3d System::rigid_row(std::size_t q) const {
    const auto& p = pairings_[q];
    const auto k = static_cast<std::size_t>(p.body - 1);
    return rigid_mode_row(p.z - rigid_center_[k], rigid_length_[k], p.normal()).transpose();
}

System build_system(ProblemSetup setup) {
    return build_system(std::make_shared<const ProblemSetup>(std::move(setup)));
}

System build_system(std::shared_ptr<const ProblemSetup> setup_ptr) {
    const ProblemSetup& s = *setup_ptr;
    validate(s);
    System sys;
    sys.setup_ = setup_ptr;
    const auto& iface = s.space.interface();

    // Pairings of both bodies.
    for (int i = 1; i <= 2; ++i) {
        const auto& b = s.bodies[static_cast<std::size_t>(i - 1)];
        const int sub = s.subdivisions > 0 ? s.subdivisions : auto_subdivisions(b.mesh, iface);
        sys.subdivisions_[static_cast<std::size_t>(i - 1)] = sub;
        auto p = build_pairings(b.mesh, iface, b.mode, s.n_gauss, i, sub);
        sys.pairings_.insert(sys.pairings_.end(), p.begin(), p.end());
    }

    sys.a0_ = assemble_a0(s.model, s.space);
    const auto null_modes = hybrid_null_modes(s, sys.a0_, sys.pairings_);

    const auto fixed1 = fixed_dofs(s.bodies[0]);
    const auto fixed2 = fixed_dofs(s.bodies[1]);
    for (int i = 1; i <= 2; ++i) {
        const auto k = static_cast<std::size_t>(i - 1);
        const auto& mesh = s.bodies[k].mesh;
        Vec2 lo = mesh.node(0), hi = mesh.node(0);
        for (const auto& p : mesh.nodes()) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        sys.rigid_center_[k] = 0.5 * (lo + hi);
        sys.rigid_length_[k] = std::max((hi - lo).norm(), 1e-300);
        sys.rigid_gram_[k] = rigid_gram(s.bodies[k], i == 1 ? fixed1 : fixed2, sys.rigid_center_[k], sys.rigid_length_[k]);
    }
    Index n_means = 0;
    for (const auto& b : s.bodies) n_means += (b.mean_x ? 1 : 0) + (b.mean_y ? 1 : 0);
    sys.layout_ = DofLayout(fixed1, fixed2, s.space.dof_count(), n_means + static_cast<Index>(null_modes.size()));
    const DofLayout& L = sys.layout_;

    std::vector<Triplet> trips;
    sys.load_ = Vector::Zero(L.total());
    for (int i = 1; i <= 2; ++i) {
        const auto& b = s.bodies[static_cast<std::size_t>(i - 1)];
        auto& K = sys.body_k_[static_cast<std::size_t>(i - 1)];
        K = assemble_elasticity(b.mesh, b.material);
        for (Index c = 0; c < K.outerSize(); ++c) {
            for (SparseMatrix::InnerIterator it(K, c); it; ++it) {
                const Index gr = L.body_global(i, it.row());
                const Index gc = L.body_global(i, it.col());
                if (gr >= 0 && gc >= 0) trips.emplace_back(gr, gc, it.value());
            }
        }
        Vector f = assemble_load(b.mesh, b.body_force) + assemble_traction(b.mesh, FacetTag::Traction, b.traction);
        L.add_body_vector(i, f, sys.load_);
    }
    if (sys.has_a0()) {
        for (Index c = 0; c < sys.a0_.outerSize(); ++c)
            for (SparseMatrix::InnerIterator it(sys.a0_, c); it; ++it)
                trips.emplace_back(L.hybrid_global(it.row()), L.hybrid_global(it.col()), it.value());
    }

    // Constraint rows.
    for (int i = 1; i <= 2; ++i) {
        const auto& b = s.bodies[static_cast<std::size_t>(i - 1)];
        const Vector m = node_integrals(b.mesh) / b.mesh.area();
        for (int comp = 0; comp < 2; ++comp) {
            if (!(comp == 0 ? b.mean_x : b.mean_y)) continue;
            ConstraintRow row;
            row.label = "body" + std::to_string(i) + (comp == 0 ? " mean x" : " mean y");
            for (Index n = 0; n < b.mesh.node_count(); ++n) {
                const Index g = L.node_global(i, n, comp);
                if (g >= 0) row.entries.emplace_back(g, m(n));
            }
            sys.constraints_.push_back(std::move(row));
        }
    }
    for (std::size_t k = 0; k < null_modes.size(); ++k) {
        ConstraintRow row;
        row.label = "hybrid null mode " + std::to_string(k);
        for (Index j = 0; j < null_modes[k].size(); ++j)
            if (null_modes[k](j) != 0.0) row.entries.emplace_back(L.hybrid_global(j), null_modes[k](j));
        sys.constraints_.push_back(std::move(row));
    }
    // Rows enter the matrix scaled to the size of the elastic diagonal; the
    // raw mean rows have entries ~1/n and leave the saddle badly conditioned.
    Real kdiag = 0.0;
    for (const auto& K : sys.body_k_) kdiag = std::max(kdiag, K.diagonal().cwiseAbs().maxCoeff());
    for (std::size_t k = 0; k < sys.constraints_.size(); ++k) {
        auto& row = sys.constraints_[k];
        Real big = 0.0;
        for (const auto& e : row.entries) big = std::max(big, std::abs(e.second));
        row.scale = big > 0.0 ? kdiag / big : 1.0;
        const Index r = L.multiplier_global(static_cast<Index>(k));
        for (const auto& [g, v] : row.entries) {
            trips.emplace_back(r, g, row.scale * v);
            trips.emplace_back(g, r, row.scale * v);
        }
    }
    sys.linear_ = SparseMatrix(L.total(), L.total());
    sys.linear_.setFromTriplets(trips.begin(), trips.end());

    std::vector<LinearPairing> lin;
    lin.reserve(sys.pairings_.size());
    for (const auto& p : sys.pairings_) {
        const auto& b = s.bodies[static_cast<std::size_t>(p.body - 1)];
        lin.push_back(linearize_pairing(p, b.mesh, b.material, s.space, L, b.nitsche));
    }
    sys.contact_ = ContactOperator(std::move(lin), L.total());
    return sys;
}

Vector System::residual(const Vector& x) const { return linear_ * x + contact_.residual(x) - load_; }

Vector System::residual(const Vector& x, std::span<const char> active) const {
    return linear_ * x + contact_.residual(x, active) - load_;
}

SparseMatrix System::jacobian(std::span<const char> active) const {
    SparseMatrix J = linear_ + contact_.jacobian(active);
    J.makeCompressed();
    return J;
}

Real System::energy_norm_sq(const Vector& x) const {
    Real e = 0.0;
    for (int i = 1; i <= 2; ++i) {
        const Vector u = layout_.body_displacement(i, x);
        e += u.dot(body_k_[static_cast<std::size_t>(i - 1)] * u);
    }
    if (has_a0()) {
        const Vector h = layout_.hybrid_dofs(x);
        e += h.dot(a0_ * h);
    }
    return e;
}

Real System::lagrangian(const Vector& x) const {
    return 0.5 * x.dot(linear_ * x) - load_.dot(x) + contact_.energy(x);
}

namespace {

Real inf_norm(const SparseMatrix& A) {
    Vector rows = Vector::Zero(A.rows());
    for (Index c = 0; c < A.outerSize(); ++c)
        for (SparseMatrix::InnerIterator it(A, c); it; ++it) rows(it.row()) += std::abs(it.value());
    return rows.size() ? rows.maxCoeff() : 0.0;
}

}  // namespace

void DenseLastOrdering::operator()(const SparseMatrix& mat, PermutationType& perm) const {
    const Index n = mat.cols();
    Eigen::VectorXi row_count = Eigen::VectorXi::Zero(mat.rows());
    std::vector<char> dense_col(static_cast<std::size_t>(n), 0), dense_row(static_cast<std::size_t>(mat.rows()), 0);
    const Index limit = std::max<Index>(64, static_cast<Index>(10.0 * std::sqrt(static_cast<Real>(n))));
    for (Index c = 0; c < n; ++c) {
        Index count = 0;
        for (SparseMatrix::InnerIterator it(mat, c); it; ++it) {
            ++row_count(it.row());
            ++count;
        }
        dense_col[static_cast<std::size_t>(c)] = count > limit;
    }
    for (Index r = 0; r < mat.rows(); ++r) dense_row[static_cast<std::size_t>(r)] = row_count(r) > limit;

    std::vector<int> col_map, row_map(static_cast<std::size_t>(mat.rows()), -1);
    int nr = 0;
    for (Index r = 0; r < mat.rows(); ++r)
        if (!dense_row[static_cast<std::size_t>(r)]) row_map[static_cast<std::size_t>(r)] = nr++;
    for (Index c = 0; c < n; ++c)
        if (!dense_col[static_cast<std::size_t>(c)]) col_map.push_back(static_cast<int>(c));
    const int nc = static_cast<int>(col_map.size());

    PermutationType sub_perm;
    if (nc > 0) {
        std::vector<Triplet> trips;
        for (int j = 0; j < nc; ++j)
            for (SparseMatrix::InnerIterator it(mat, col_map[static_cast<std::size_t>(j)]); it; ++it)
                if (row_map[static_cast<std::size_t>(it.row())] >= 0)
                    trips.emplace_back(row_map[static_cast<std::size_t>(it.row())], j, 1.0);
        SparseMatrix sub(nr, nc);
        sub.setFromTriplets(trips.begin(), trips.end());
        Eigen::COLAMDOrdering<int>()(sub, sub_perm);
    }
    // perm.indices()(old) = new position.
    perm.resize(static_cast<int>(n));
    for (int j = 0; j < nc; ++j) perm.indices()(col_map[static_cast<std::size_t>(j)]) = sub_perm.indices()(j);
    int next = nc;
    for (Index c = 0; c < n; ++c)
        if (dense_col[static_cast<std::size_t>(c)]) perm.indices()(static_cast<int>(c)) = next++;
}

Vector LinearSolver::solve(const SparseMatrix& A, const Vector& b) {
    if (A.rows() != A.cols() || A.rows() != b.size()) throw SolverError("linear solve: dimension mismatch");
    if (A.rows() == 0) return Vector();
    SparseMatrix M = A;
    M.makeCompressed();
    if (!analyzed_ || rows_ != M.rows() || nnz_ != M.nonZeros()) {
        lu_.analyzePattern(M);
        analyzed_ = true;
        rows_ = M.rows();
        nnz_ = M.nonZeros();
    }
    lu_.factorize(M);
    if (lu_.info() != Eigen::Success)
        throw SolverError("linear solve: factorization failed (" + lu_.lastErrorMessage() + ")");
    Vector x = lu_.solve(b);
    if (lu_.info() != Eigen::Success || !x.allFinite()) throw SolverError("linear solve: matrix is singular");

    const Real anorm = inf_norm(M);
    auto ok = [&](const Vector& r) {
        return r.lpNorm<Eigen::Infinity>() <= 1e-10 * (anorm * x.lpNorm<Eigen::Infinity>() + b.lpNorm<Eigen::Infinity>());
    };
    Vector r = b - M * x;
    for (int refine = 0; refine < 3 && !ok(r); ++refine) {
        x += lu_.solve(r);
        r = b - M * x;
    }
    if (!ok(r) || !x.allFinite()) {
        std::ostringstream msg;
        msg << "linear solve: residual check failed (||r|| = " << r.lpNorm<Eigen::Infinity>()
            << ", ||A|| = " << anorm << ", ||x|| = " << x.lpNorm<Eigen::Infinity>()
            << "); the matrix is numerically singular";
        throw SolverError(msg.str());
    }
    return x;
}

Vector linear_solve(const SparseMatrix& A, const Vector& b) {
    LinearSolver s;
    return s.solve(A, b);
}

void write_iteration_log(std::ostream& out, const std::vector<IterationRecord>& log) {
    for (const auto& r : log) out << "iter " << r.iter << " residual " << r.residual << " active " << r.active << "\n";
}

namespace {

Index count_active(const std::vector<char>& a) { return std::count(a.begin(), a.end(), char{1}); }

// A saddle matrix with m independent constraint rows has m more negative
// eigenvalues than its top-left block restricted to the constraint null space.
Index negative_pivots(const System& sys, std::span<const char> active) {
    const SparseMatrix J = sys.jacobian(active);
    if (J.rows() > 2500) return -1;
    const DenseMatrix A(J);
    const Vector ev = Eigen::SelfAdjointEigenSolver<DenseMatrix>(A, Eigen::EigenvaluesOnly).eigenvalues();
    const Real top = ev.cwiseAbs().maxCoeff();
    Index neg = 0;
    for (Index k = 0; k < ev.size(); ++k)
        if (ev(k) < -1e-12 * top) ++neg;
    return std::max<Index>(0, neg - sys.layout().multiplier_count());
}

void support_floating_bodies(const System& sys, const Vector& x, std::vector<char>& lin) {
    const auto& pairings = sys.pairings();
    for (int b = 1; b <= 2; ++b) {
        if (!sys.floating(b)) continue;
        Eigen::Matrix3d G = sys.rigid_gram(b);
        std::vector<std::pair<Real, std::size_t>> candidates;
        for (std::size_t q = 0; q < pairings.size(); ++q) {
            if (pairings[q].body != b) continue;
            if (lin[q]) {
                const Eigen::Vector3d r = sys.rigid_row(q);
                G += r * r.transpose();
            } else {
                candidates.emplace_back(sys.contact().evaluate(q, x).Sigma, q);
            }
        }
        if (full_rank(G)) continue;
        std::sort(candidates.begin(), candidates.end());
        for (const auto& [sigma, q] : candidates) {
            const Eigen::Vector3d r = sys.rigid_row(q);
            Eigen::Matrix3d trial = G + r * r.transpose();
            const Eigen::Vector3d before = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(G, Eigen::EigenvaluesOnly).eigenvalues();
            const Eigen::Vector3d after = Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d>(trial, Eigen::EigenvaluesOnly).eigenvalues();
            // Take the pairing only when it restrains a new rigid motion.
            const Real tol = 1e-6 * std::max(after(2), 1e-300);
            const auto rank = [tol](const Eigen::Vector3d& ev) { return (ev.array() > tol).count(); };
            if (rank(after) <= rank(before)) continue;
            lin[q] = 1;
            G = trial;
            if (full_rank(G)) break;
        }
    }
}

}  // namespace

SystemState semismooth_newton(const System& system, const NewtonOptions& options) {
    if (!(options.tol_rel > 0.0) || options.max_iter < 1)
        throw ValidationError("newton: need tol_rel > 0 and max_iter >= 1");
    const Index n = system.layout().total();
    SystemState state;
    state.x = Vector::Zero(n);
    const Real fnorm = system.load().norm();
    const Real target = fnorm > 0.0 ? options.tol_rel * fnorm : 1e-12;

    const auto& contact = system.contact();
    bool any_inequality = std::any_of(contact.pairings().begin(), contact.pairings().end(),
                                      [](const LinearPairing& p) { return p.mode == ConstraintMode::Inequality; });
    LinearSolver solver;
    std::set<std::vector<char>> seen;
    std::vector<char> used;

    for (int k = 0;; ++k) {
        std::vector<char> active = contact.active_set(state.x);
        const Vector R = system.residual(state.x, active);
        const Real rnorm = R.norm();
        state.log.push_back({k, rnorm, count_active(active)});
        if (options.log) *options.log << "iter " << k << " residual " << rnorm << " active " << count_active(active) << "\n";

        if (k > 0 && rnorm <= target) {
            state.active = active;
            break;
        }
        if (k >= options.max_iter) {
            std::ostringstream msg;
            msg << "semismooth Newton did not converge in " << options.max_iter << " iterations (residual " << rnorm
                << ", target " << target << ")";
            throw NonConvergenceError(msg.str(), state.log);
        }
        // A set revisited after it has been solved exactly, with a residual
        // still above target, means the iteration is cycling.
        if (k > 1 && active != used && seen.count(active)) {
            throw NonConvergenceError("semismooth Newton: active set cycling at iteration " + std::to_string(k),
                                      state.log);
        }

        std::vector<char> lin = active;
        if (k == 0 && options.all_active_start && any_inequality) std::fill(lin.begin(), lin.end(), char{1});
        if (options.support_floating) support_floating_bodies(system, state.x, lin);
        const Vector Rlin = (lin == active) ? R : system.residual(state.x, lin);
        Vector dx;
        try {
            dx = solver.solve(system.jacobian(lin), -Rlin);
        } catch (const SolverError& e) {
            throw SolverError(std::string(e.what()) + " (Newton iteration " + std::to_string(k) + ")");
        }
        state.x += dx;
        seen.insert(lin);
        used = lin;
        ++state.iterations;
    }

    if (options.check_definiteness) {
        state.negative_pivots = negative_pivots(system, state.active);
        if (state.negative_pivots > 0 && options.log)
            *options.log << "warning: fixed-active-set system is not positive definite (" << state.negative_pivots
                         << " negative pivots); increase the Nitsche parameter\n";
    }
    return state;
}

}  // namespace hnc
