#include "hnc/layout.hpp"

namespace hnc {

namespace {

std::vector<Index> free_map(const std::vector<char>& fixed, Index offset, Index& count) {
    std::vector<Index> map(fixed.size(), -1);
    count = 0;
    for (std::size_t i = 0; i < fixed.size(); ++i)
        if (!fixed[i]) map[i] = offset + count++;
    return map;
}

}  // namespace

DofLayout::DofLayout(const std::vector<char>& fixed1, const std::vector<char>& fixed2, Index hybrid_dofs,
                     Index multipliers)
    : hybrid_(hybrid_dofs), multipliers_(multipliers) {
    map1_ = free_map(fixed1, 0, body1_free_);
    map2_ = free_map(fixed2, body1_free_, body2_free_);
    total_ = body1_free_ + body2_free_ + hybrid_ + multipliers_;
}

Index DofLayout::body_dof_count(int body) const {
    return static_cast<Index>(body == 1 ? map1_.size() : map2_.size());
}

Index DofLayout::body_global(int body, Index local) const {
    const auto& m = body == 1 ? map1_ : map2_;
    return m[static_cast<std::size_t>(local)];
}

Vector DofLayout::body_displacement(int body, const Vector& x) const {
    const auto& m = body == 1 ? map1_ : map2_;
    Vector u = Vector::Zero(static_cast<Index>(m.size()));
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] >= 0) u(static_cast<Index>(i)) = x(m[i]);
    return u;
}

Vector DofLayout::hybrid_dofs(const Vector& x) const { return x.segment(hybrid_offset(), hybrid_); }

void DofLayout::add_body_vector(int body, const Vector& local, Vector& global) const {
    const auto& m = body == 1 ? map1_ : map2_;
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m[i] >= 0) global(m[i]) += local(static_cast<Index>(i));
}

}  // namespace hnc
