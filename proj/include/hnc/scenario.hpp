#pragma once

/**
 * @file scenario.hpp
 * @brief Problem description in flat `section.key = value` text, built-in
 *        templates, and conversion to a ProblemSetup.
 *
 * Sections are `scenario`, `body1`, `body2`, `hybrid` and `solver`. Blank
 * lines and lines starting with `#` are ignored. Vectors are written as
 * space separated numbers.
 */

#include "hnc/mesh_gen.hpp"
#include "hnc/solver.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace hnc {

enum class MeshSource { HalfDisc, Block, File };

struct BodyScenario {
    MeshSource mesh = MeshSource::Block;
    std::string file;
    HalfDiscOptions disc;
    BlockOptions block;
    /// Generator boundary tags: disc {arc, top}, block {bottom, right, top, left}.
    FacetTag disc_arc = FacetTag::Contact;
    FacetTag disc_top = FacetTag::Neumann;
    std::array<FacetTag, 4> block_sides{FacetTag::Dirichlet, FacetTag::Neumann, FacetTag::Contact,
                                        FacetTag::Neumann};
    /// Generated contact facets keep their tag only when they overlap the x
    /// range [contact_xmin, contact_xmax]. Empty range = no restriction.
    Real contact_xmin = 0.0;
    Real contact_xmax = 0.0;

    Real E = 1.0;
    Real nu = 0.0;
    Vec2 force = Vec2::Zero();
    Vec2 traction = Vec2::Zero();
    ConstraintMode mode = ConstraintMode::Inequality;
    bool fix_x = true;
    bool fix_y = true;
    std::vector<Pin> pins;
    bool mean_x = false;
    bool mean_y = false;
    /// gamma = gamma_mult * E / h (facet scaled) or gamma_mult * E.
    Real gamma_mult = 10.0;
    bool gamma_facet_scaled = true;

    bool operator==(const BodyScenario&) const = default;
};

enum class InterfaceSource { Segment, Body1Boundary, Body2Boundary, File };

struct HybridScenario {
    HybridKind kind = HybridKind::P0NormalScalar;
    InterfaceSource source = InterfaceSource::Segment;
    Vec2 a{-1.0, 0.0};
    Vec2 b{1.0, 0.0};
    Index count = 10;
    NormalSide orient = NormalSide::Left;
    std::string file;
    HybridModelKind model = HybridModelKind::None;
    Real stiffness = 0.0;

    bool operator==(const HybridScenario&) const = default;
};

struct SolverScenario {
    Real tol_rel = 1e-10;
    int max_iter = 25;
    int n_gauss = 2;
    int subdivisions = 0;
    bool all_active_start = true;
    bool check_definiteness = false;

    bool operator==(const SolverScenario&) const = default;
};

struct Scenario {
    std::string name = "custom";
    std::array<BodyScenario, 2> bodies;
    HybridScenario hybrid;
    SolverScenario solver;

    bool operator==(const Scenario&) const = default;
};

/// Parses the key-value text over the defaults of Scenario. body1.mesh,
/// body2.mesh and hybrid.kind are required. Collects every problem (unknown
/// keys, bad values, missing files, singular setups) into one ValidationError.
Scenario parse_scenario(std::istream& in);
Scenario parse_scenario_file(const std::string& path);
/// Writes every key; parse_scenario reads the result back unchanged.
void write_scenario(std::ostream& out, const Scenario& s);

/// Problems that make the scenario unusable, without throwing.
std::vector<std::string> validate_scenario(const Scenario& s);

/// Half-disc on a block with a piecewise-constant hybrid layer tied to the
/// block top and a line load on the disc.
Scenario hertz_scenario(Index constants = 1000);
/// Coarse, mildly graded Hertz meshes used as the base of refinement studies.
Scenario hertz_convergence_scenario();
/// Two stacked blocks with uniform pressure on top and a flat interface.
Scenario patch_scenario(ConstraintMode mode, Real pressure = 1.0);
/// Disc pressed into a soft block through a string bonded to the disc arc.
Scenario string_scenario(Real stiffness);

/// Multiplies every generator density by k.
Scenario refined(Scenario s, Index k);
/// Applies the same gamma multiplier to both bodies.
Scenario with_gamma_mult(Scenario s, Real c);

BodyMesh build_body_mesh(const BodyScenario& b);
ProblemSetup build_setup(const Scenario& s);
NewtonOptions newton_options(const Scenario& s);

struct Solved {
    System system;
    SystemState state;
};

/// Builds and solves. Throws ValidationError, SolverError or NonConvergenceError.
Solved solve_scenario(const Scenario& s, std::ostream* log = nullptr);

}  // namespace hnc
