#include "hnc/mesh_gen.hpp"

#include <cmath>
#include <numbers>

namespace hnc {

Real symmetric_grading(Real s, Real beta) {
    if (beta <= 0.0) return 2.0 * s - 1.0;
    return std::sinh(beta * (2.0 * s - 1.0)) / std::sinh(beta);
}

Real end_grading(Real t, Real beta) {
    if (beta <= 0.0) return t;
    return 1.0 - std::sinh(beta * (1.0 - t)) / std::sinh(beta);
}

BodyMesh half_disc_mesh(const HalfDiscOptions& opt, const DiscTagger& tagger) {
    if (opt.n_arc < 2 || opt.n_radial < 1 || opt.radius <= 0.0)
        throw ValidationError("half-disc mesh: need n_arc >= 2, n_radial >= 1, radius > 0");
    const Index na = opt.n_arc;
    const Index nr = opt.n_radial;
    const Real pi = std::numbers::pi;

    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>(1 + nr * (na + 1)));
    nodes.push_back(opt.center);
    // ring j (1..nr), angle index i (0..na)
    auto id = [na](Index j, Index i) { return 1 + (j - 1) * (na + 1) + i; };
    for (Index j = 1; j <= nr; ++j) {
        const Real r = opt.radius * end_grading(static_cast<Real>(j) / static_cast<Real>(nr), opt.radial_grading);
        for (Index i = 0; i <= na; ++i) {
            Real theta;
            if (i == 0)
                theta = pi;
            else if (i == na)
                theta = 2.0 * pi;
            else
                theta = 1.5 * pi + 0.5 * pi * symmetric_grading(static_cast<Real>(i) / static_cast<Real>(na),
                                                                opt.arc_grading);
            Vec2 p = opt.center + r * Vec2(std::cos(theta), std::sin(theta));
            // Keep the flat side exactly flat.
            if (i == 0 || i == na) p.y() = opt.center.y();
            nodes.push_back(p);
        }
    }

    std::vector<std::array<Index, 4>> elements;
    for (Index i = 0; i < na; ++i) elements.push_back({0, id(1, i), id(1, i + 1), 0});
    for (Index j = 1; j < nr; ++j) {
        for (Index i = 0; i < na; ++i) {
            const Index a = id(j, i), b = id(j + 1, i), c = id(j + 1, i + 1), d = id(j, i + 1);
            // Alternate diagonals so the triangulation has no preferred direction.
            if ((i + j) % 2 == 0) {
                elements.push_back({a, b, c, 0});
                elements.push_back({a, c, d, 0});
            } else {
                elements.push_back({a, b, d, 0});
                elements.push_back({b, c, d, 0});
            }
        }
    }

    std::vector<TaggedFacet> facets;
    auto add = [&](Index a, Index b, DiscSide side) {
        const Vec2 mid = 0.5 * (nodes[static_cast<std::size_t>(a)] + nodes[static_cast<std::size_t>(b)]);
        facets.push_back({{a, b}, tagger(side, mid)});
    };
    for (Index i = 0; i < na; ++i) add(id(nr, i), id(nr, i + 1), DiscSide::Arc);
    add(0, id(1, 0), DiscSide::Top);
    add(0, id(1, na), DiscSide::Top);
    for (Index j = 1; j < nr; ++j) {
        add(id(j, 0), id(j + 1, 0), DiscSide::Top);
        add(id(j, na), id(j + 1, na), DiscSide::Top);
    }
    return BodyMesh(std::move(nodes), ElementType::Triangle, std::move(elements), std::move(facets));
}

BodyMesh block_mesh(const BlockOptions& opt, const RectTagger& tagger) {
    if (opt.nx < 1 || opt.ny < 1 || !(opt.x1 > opt.x0) || !(opt.y1 > opt.y0))
        throw ValidationError("block mesh: need nx, ny >= 1 and a non-empty box");
    const Index nx = opt.nx, ny = opt.ny;
    std::vector<Real> xs(static_cast<std::size_t>(nx + 1)), ys(static_cast<std::size_t>(ny + 1));
    const Real xc = 0.5 * (opt.x0 + opt.x1), hx = 0.5 * (opt.x1 - opt.x0);
    for (Index i = 0; i <= nx; ++i) {
        xs[static_cast<std::size_t>(i)] =
            xc + hx * symmetric_grading(static_cast<Real>(i) / static_cast<Real>(nx), opt.x_grading);
    }
    xs.front() = opt.x0;
    xs.back() = opt.x1;
    if (nx % 2 == 0) xs[static_cast<std::size_t>(nx / 2)] = xc;
    for (Index j = 0; j <= ny; ++j) {
        ys[static_cast<std::size_t>(j)] =
            opt.y0 + (opt.y1 - opt.y0) * end_grading(static_cast<Real>(j) / static_cast<Real>(ny), opt.y_grading);
    }
    ys.front() = opt.y0;
    ys.back() = opt.y1;

    std::vector<Vec2> nodes;
    nodes.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1)));
    for (Index j = 0; j <= ny; ++j)
        for (Index i = 0; i <= nx; ++i) nodes.emplace_back(xs[static_cast<std::size_t>(i)], ys[static_cast<std::size_t>(j)]);
    auto id = [nx](Index i, Index j) { return j * (nx + 1) + i; };

    std::vector<std::array<Index, 4>> elements;
    for (Index j = 0; j < ny; ++j) {
        for (Index i = 0; i < nx; ++i) {
            const Index a = id(i, j), b = id(i + 1, j), c = id(i + 1, j + 1), d = id(i, j + 1);
            if (opt.type == ElementType::Quad) {
                elements.push_back({a, b, c, d});
            } else if ((i + j) % 2 == 0) {
                elements.push_back({a, b, c, 0});
                elements.push_back({a, c, d, 0});
            } else {
                elements.push_back({a, b, d, 0});
                elements.push_back({b, c, d, 0});
            }
        }
    }

    std::vector<TaggedFacet> facets;
    auto add = [&](Index a, Index b, RectSide side) {
        const Vec2 mid = 0.5 * (nodes[static_cast<std::size_t>(a)] + nodes[static_cast<std::size_t>(b)]);
        facets.push_back({{a, b}, tagger(side, mid)});
    };
    for (Index i = 0; i < nx; ++i) {
        add(id(i, 0), id(i + 1, 0), RectSide::Bottom);
        add(id(i + 1, ny), id(i, ny), RectSide::Top);
    }
    for (Index j = 0; j < ny; ++j) {
        add(id(nx, j), id(nx, j + 1), RectSide::Right);
        add(id(0, j + 1), id(0, j), RectSide::Left);
    }
    return BodyMesh(std::move(nodes), opt.type, std::move(elements), std::move(facets));
}

}  // namespace hnc
