#include "hnc/contact.hpp"

#include <omp.h>

#include <string>

namespace hnc {

std::string_view to_string(ConstraintMode mode) {
    return mode == ConstraintMode::Equality ? "equality" : "inequality";
}

ConstraintMode parse_constraint_mode(std::string_view text) {
    if (text == "equality") return ConstraintMode::Equality;
    if (text == "inequality") return ConstraintMode::Inequality;
    throw ValidationError("unknown constraint mode '" + std::string(text) + "' (expected equality or inequality)");
}

std::vector<ContactPairing> build_pairings(const BodyMesh& body, const InterfaceMesh& interface,
                                           ConstraintMode mode, int n_gauss, int body_id, int subdivisions) {
    const auto quad = contact_quadrature(body, FacetTag::Contact, n_gauss, subdivisions);
    if (quad.empty()) throw ValidationError("body " + std::to_string(body_id) + " has no contact facets");

    // Which side of the interface the body occupies, judged from the
    // centroids of the elements owning the contact facets.
    Real side = 0.0;
    for (Index f : body.facets_with_tag(FacetTag::Contact)) {
        const auto& fc = body.facets()[static_cast<std::size_t>(f)];
        const auto coords = body.element_coords(fc.element);
        Vec2 centroid = Vec2::Zero();
        for (int k = 0; k < body.nodes_per_element(); ++k) centroid += coords[static_cast<std::size_t>(k)];
        centroid /= body.nodes_per_element();
        const auto cp = closest_point(body.facet_point(f, 0.5), interface);
        side += cp.normal.dot(centroid - cp.p0);
    }
    const Real flip = side < 0.0 ? -1.0 : 1.0;

    std::vector<ContactPairing> out;
    out.reserve(quad.size());
    for (const auto& q : quad) {
        ContactPairing p;
        p.body = body_id;
        p.z = q.z;
        p.weight = q.weight;
        p.h = q.h;
        p.facet = q.facet;
        p.t = q.t;
        p.element = body.facets()[static_cast<std::size_t>(q.facet)].element;
        p.cp = closest_point(q.z, interface);
        p.cp.normal *= flip;
        p.cp.distance *= flip;
        p.mode = mode;
        out.push_back(p);
    }
    return out;
}

Real normal_jump(const ContactPairing& pairing, const BodyMesh& body, const Vector& body_disp,
                 const HybridSpace& space, const Vector& hybrid_dofs) {
    const Vec2 ui = facet_displacement(body, body_disp, pairing.facet, pairing.t);
    return eval_normal_disp(space, hybrid_dofs, pairing.cp) - pairing.normal().dot(ui);
}

Real S_eval(Real Sigma, ConstraintMode mode) {
    if (mode == ConstraintMode::Equality) return Sigma;
    return Sigma < 0.0 ? Sigma : 0.0;
}

bool S_active(Real Sigma, ConstraintMode mode) { return mode == ConstraintMode::Equality || Sigma < 0.0; }

void GlobalRow::add(Index i, Real v) {
    if (i < 0) return;
    for (int k = 0; k < size; ++k) {
        if (idx[static_cast<std::size_t>(k)] == i) {
            val[static_cast<std::size_t>(k)] += v;
            return;
        }
    }
    if (size == capacity) throw Error("GlobalRow capacity exceeded");
    idx[static_cast<std::size_t>(size)] = i;
    val[static_cast<std::size_t>(size)] = v;
    ++size;
}

Real GlobalRow::apply(const Vector& x) const {
    Real s = 0.0;
    for (int k = 0; k < size; ++k) s += val[static_cast<std::size_t>(k)] * x(idx[static_cast<std::size_t>(k)]);
    return s;
}

LinearPairing linearize_pairing(const ContactPairing& p, const BodyMesh& body, const Material& mat,
                                const HybridSpace& space, const DofLayout& layout, const NitscheParams& params) {
    LinearPairing lp;
    const StressRow sr = sigma_n_row(body, mat, p.facet, p.t, body.facet_outward_normal(p.facet));
    for (int k = 0; k < sr.size; ++k)
        lp.sigma.add(layout.body_global(p.body, sr.dofs[static_cast<std::size_t>(k)]), sr.coef[static_cast<std::size_t>(k)]);

    const HybridRow hr = eval_normal_disp_row(space, p.cp);
    for (int k = 0; k < hr.size; ++k)
        lp.jump.add(layout.hybrid_global(hr.dofs[static_cast<std::size_t>(k)]), hr.coef[static_cast<std::size_t>(k)]);
    const auto& fc = body.facets()[static_cast<std::size_t>(p.facet)];
    const std::array<Real, 2> shape{1.0 - p.t, p.t};
    for (int a = 0; a < 2; ++a) {
        for (int c = 0; c < 2; ++c) {
            lp.jump.add(layout.node_global(p.body, fc.nodes[static_cast<std::size_t>(a)], c),
                        -shape[static_cast<std::size_t>(a)] * p.normal()(c));
        }
    }
    lp.rho = p.rho();
    lp.gamma = params.gamma(p.h);
    lp.weight = p.weight;
    lp.mode = p.mode;
    return lp;
}

ContactOperator::ContactOperator(std::vector<LinearPairing> pairings, Index dof_count)
    : pairings_(std::move(pairings)), n_(dof_count) {}

ContactStateEval ContactOperator::evaluate(std::size_t q, const Vector& x) const {
    const auto& p = pairings_[q];
    ContactStateEval ev;
    ev.sigma_n = p.sigma.apply(x);
    ev.jump = p.jump.apply(x);
    ev.Sigma = ev.sigma_n - p.gamma * (ev.jump - p.rho);
    ev.S = S_eval(ev.Sigma, p.mode);
    ev.active = S_active(ev.Sigma, p.mode);
    return ev;
}

std::vector<ContactStateEval> ContactOperator::evaluate_all(const Vector& x) const {
    std::vector<ContactStateEval> out(pairings_.size());
    for (std::size_t q = 0; q < pairings_.size(); ++q) out[q] = evaluate(q, x);
    return out;
}

std::vector<char> ContactOperator::active_set(const Vector& x) const {
    std::vector<char> a(pairings_.size());
    for (std::size_t q = 0; q < pairings_.size(); ++q) a[q] = evaluate(q, x).active ? 1 : 0;
    return a;
}

namespace {

// Adds w_q / gamma * (S DS - sigma_n sigma) of pairing p into r.
void accumulate_residual(const LinearPairing& p, const ContactStateEval& ev, bool active, Vector& r) {
    const Real S = active ? ev.Sigma : 0.0;
    const Real scale = p.weight / p.gamma;
    for (int k = 0; k < p.sigma.size; ++k)
        r(p.sigma.idx[static_cast<std::size_t>(k)]) += scale * (S - ev.sigma_n) * p.sigma.val[static_cast<std::size_t>(k)];
    for (int k = 0; k < p.jump.size; ++k)
        r(p.jump.idx[static_cast<std::size_t>(k)]) -= scale * S * p.gamma * p.jump.val[static_cast<std::size_t>(k)];
}

void accumulate_jacobian(const LinearPairing& p, bool active, std::vector<Triplet>& out) {
    const Real scale = p.weight / p.gamma;
    // DS row = sigma - gamma * jump
    std::array<Index, 2 * GlobalRow::capacity> di{};
    std::array<Real, 2 * GlobalRow::capacity> dv{};
    int n = 0;
    for (int k = 0; k < p.sigma.size; ++k) {
        di[static_cast<std::size_t>(n)] = p.sigma.idx[static_cast<std::size_t>(k)];
        dv[static_cast<std::size_t>(n++)] = p.sigma.val[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < p.jump.size; ++k) {
        di[static_cast<std::size_t>(n)] = p.jump.idx[static_cast<std::size_t>(k)];
        dv[static_cast<std::size_t>(n++)] = -p.gamma * p.jump.val[static_cast<std::size_t>(k)];
    }
    const Real a = active ? scale : 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            out.emplace_back(di[static_cast<std::size_t>(i)], di[static_cast<std::size_t>(j)],
                             a * dv[static_cast<std::size_t>(i)] * dv[static_cast<std::size_t>(j)]);
    for (int i = 0; i < p.sigma.size; ++i)
        for (int j = 0; j < p.sigma.size; ++j)
            out.emplace_back(p.sigma.idx[static_cast<std::size_t>(i)], p.sigma.idx[static_cast<std::size_t>(j)],
                             -scale * p.sigma.val[static_cast<std::size_t>(i)] * p.sigma.val[static_cast<std::size_t>(j)]);
}

}  // namespace

Vector ContactOperator::residual_reference(const Vector& x, std::span<const char> active) const {
    Vector r = Vector::Zero(n_);
    for (std::size_t q = 0; q < pairings_.size(); ++q) {
        const auto ev = evaluate(q, x);
        const bool on = pairings_[q].mode == ConstraintMode::Equality || active[q];
        accumulate_residual(pairings_[q], ev, on, r);
    }
    return r;
}

Vector ContactOperator::residual(const Vector& x, std::span<const char> active) const {
    const int nthreads = omp_get_max_threads();
    const auto np = static_cast<std::int64_t>(pairings_.size());
    std::vector<Vector> partial(static_cast<std::size_t>(nthreads), Vector::Zero(n_));
#pragma omp parallel num_threads(nthreads)
    {
        Vector& r = partial[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t q = 0; q < np; ++q) {
            const auto uq = static_cast<std::size_t>(q);
            const auto ev = evaluate(uq, x);
            const bool on = pairings_[uq].mode == ConstraintMode::Equality || active[uq];
            accumulate_residual(pairings_[uq], ev, on, r);
        }
    }
    Vector r = std::move(partial[0]);
    for (std::size_t t = 1; t < partial.size(); ++t) r += partial[t];
    return r;
}

Vector ContactOperator::residual(const Vector& x) const {
    const auto a = active_set(x);
    return residual(x, a);
}

SparseMatrix ContactOperator::jacobian_reference(std::span<const char> active) const {
    std::vector<Triplet> trips;
    for (std::size_t q = 0; q < pairings_.size(); ++q) {
        const bool on = pairings_[q].mode == ConstraintMode::Equality || active[q];
        accumulate_jacobian(pairings_[q], on, trips);
    }
    SparseMatrix J(n_, n_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

SparseMatrix ContactOperator::jacobian(std::span<const char> active) const {
    const int nthreads = omp_get_max_threads();
    const auto np = static_cast<std::int64_t>(pairings_.size());
    std::vector<std::vector<Triplet>> local(static_cast<std::size_t>(nthreads));
#pragma omp parallel num_threads(nthreads)
    {
        auto& trips = local[static_cast<std::size_t>(omp_get_thread_num())];
#pragma omp for schedule(static)
        for (std::int64_t q = 0; q < np; ++q) {
            const auto uq = static_cast<std::size_t>(q);
            const bool on = pairings_[uq].mode == ConstraintMode::Equality || active[uq];
            accumulate_jacobian(pairings_[uq], on, trips);
        }
    }
    std::size_t total = 0;
    for (const auto& t : local) total += t.size();
    std::vector<Triplet> trips;
    trips.reserve(total);
    for (const auto& t : local) trips.insert(trips.end(), t.begin(), t.end());
    SparseMatrix J(n_, n_);
    J.setFromTriplets(trips.begin(), trips.end());
    return J;
}

Real ContactOperator::b_form(const Vector& v, const Vector& w) const {
    Real b = 0.0;
    for (std::size_t q = 0; q < pairings_.size(); ++q) {
        const auto& p = pairings_[q];
        const auto ev = evaluate(q, v);
        const Real DSw = p.sigma.apply(w) - p.gamma * p.jump.apply(w);
        b += p.weight / p.gamma * ev.S * DSw;
    }
    return b;
}

Real ContactOperator::c_form(const Vector& v, const Vector& w) const {
    Real c = 0.0;
    for (const auto& p : pairings_) c += p.weight / p.gamma * p.sigma.apply(v) * p.sigma.apply(w);
    return c;
}

Real ContactOperator::s_distance_sq(const Vector& v, const Vector& w) const {
    Real s = 0.0;
    for (std::size_t q = 0; q < pairings_.size(); ++q) {
        const Real d = evaluate(q, v).S - evaluate(q, w).S;
        s += pairings_[q].weight / pairings_[q].gamma * d * d;
    }
    return s;
}

Real ContactOperator::energy(const Vector& x) const {
    Real e = 0.0;
    for (std::size_t q = 0; q < pairings_.size(); ++q) {
        const auto ev = evaluate(q, x);
        e += 0.5 * pairings_[q].weight / pairings_[q].gamma * (ev.S * ev.S - ev.sigma_n * ev.sigma_n);
    }
    return e;
}

}  // namespace hnc
