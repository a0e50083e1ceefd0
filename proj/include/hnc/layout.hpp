#pragma once

#include "hnc/types.hpp"

#include <vector>

namespace hnc {

/// Global unknown numbering: [body 1 free DOFs | body 2 free DOFs | hybrid | multipliers].
/// Fixed (Dirichlet) body DOFs are eliminated and map to -1.
class DofLayout {
public:
    DofLayout() = default;
    DofLayout(const std::vector<char>& fixed1, const std::vector<char>& fixed2, Index hybrid_dofs,
              Index multipliers);

    Index total() const { return total_; }
    Index body_offset(int body) const { return body == 1 ? 0 : body1_free_; }
    Index body_free_count(int body) const { return body == 1 ? body1_free_ : body2_free_; }
    Index body_dof_count(int body) const;
    Index hybrid_offset() const { return body1_free_ + body2_free_; }
    Index hybrid_count() const { return hybrid_; }
    Index multiplier_offset() const { return hybrid_offset() + hybrid_; }
    Index multiplier_count() const { return multipliers_; }

    /// Global index of body-local DOF, or -1 when eliminated.
    Index body_global(int body, Index local) const;
    /// Global index of (body, node, component).
    Index node_global(int body, Index node, int component) const { return body_global(body, 2 * node + component); }
    Index hybrid_global(Index k) const { return hybrid_offset() + k; }
    Index multiplier_global(Index k) const { return multiplier_offset() + k; }

    /// Full-length body displacement (zeros at eliminated DOFs).
    Vector body_displacement(int body, const Vector& x) const;
    Vector hybrid_dofs(const Vector& x) const;

    /// Scatter of a body-local vector into the global numbering (drops eliminated entries).
    void add_body_vector(int body, const Vector& local, Vector& global) const;

private:
    std::vector<Index> map1_, map2_;
    Index body1_free_ = 0, body2_free_ = 0, hybrid_ = 0, multipliers_ = 0, total_ = 0;
};

}  // namespace hnc
