#pragma once

/**
 * @file oracles.hpp
 * @brief Reference solutions and experiment drivers: the Hertz line-contact
 *        pressure, the complementarity lemmas, the contact patch test,
 *        refinement studies and the hybrid stiffness sweep.
 */

#include "hnc/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <vector>

namespace hnc {

/// Contact of two elastic cylinders under line load P (force per length).
struct HertzSolution {
    Real P = 0.0;
    Real R = 0.0;
    Real E_star = 0.0;
    Real a = 0.0;
    Real p_max = 0.0;

    Real pressure(Real x) const;
};

HertzSolution hertz_oracle(Real P, Real R, Real E1, Real nu1, Real E2, Real nu2);

/// (a <= 0, b <= 0, ab = 0) evaluated independently of a = min(a - b, 0);
/// true when the two agree.
bool kkt_lemma_check(Real a, Real b);

/// For B(v) = M v + c: |[B v]_- - [B w]_-|^2 <= ([B v]_- - [B w]_-, M (v - w)).
/// slack receives RHS - LHS.
bool affine_monotonicity_check(const DenseMatrix& M, const Vector& c, const Vector& v, const Vector& w,
                               Real* slack = nullptr);

struct SweepResult {
    Index cases = 0;
    Index failures = 0;
    Real worst_slack = 0.0;
};

/// Grid a, b in {-2, -1.75, ..., 2} plus `random_pairs` random pairs.
SweepResult kkt_lemma_sweep(Index random_pairs, std::uint64_t seed = 1);
/// Random dimensions 1..64, random M, c, v, w.
SweepResult affine_monotonicity_sweep(Index instances, std::uint64_t seed = 2);

/// Interface quantities at one contact quadrature point.
struct PressureSample {
    Vec2 z = Vec2::Zero();
    Real weight = 0.0;
    Real Sigma = 0.0;
    Real sigma_n = 0.0;
    Real S = 0.0;
    bool active = false;
    ConstraintMode mode = ConstraintMode::Inequality;
};

std::vector<PressureSample> pressure_profile(const System& sys, const Vector& x, int body);

struct ContactMetrics {
    /// max(-Sigma)
    Real p_max = 0.0;
    /// Largest |x| with Sigma < -0.01 p_max.
    Real half_width = 0.0;
    /// Integral of S.
    Real force = 0.0;
    Real active_fraction = 0.0;
    Real max_abs_Sigma = 0.0;
    /// max S over inequality points (must not exceed 0).
    Real max_S = 0.0;
};

ContactMetrics contact_metrics(const std::vector<PressureSample>& profile);

/// sqrt(sum w (-S - p(x))^2) against an analytical pressure.
Real pressure_l2_error(const std::vector<PressureSample>& profile, const HertzSolution& hertz);

/// Hertz solution matching a hertz-type scenario (load from the body-1
/// traction over the flat side, radius from the disc).
HertzSolution hertz_for(const Scenario& s);

struct PatchResult {
    Real max_sigma_error = 0.0;
    Real max_jump = 0.0;
    int iterations = 0;
    Index pairings = 0;
};

/// Two stacked blocks under uniform pressure; compares Sigma with -pressure.
PatchResult run_patch_test(ConstraintMode mode, Real pressure = 1.0);

/// Evaluates a body displacement field at arbitrary points by locating the
/// containing element (nearest element for points slightly outside).
class PointLocator {
public:
    explicit PointLocator(const BodyMesh& mesh);
    /// Element and reference coordinates of p.
    std::pair<Index, Vec2> locate(const Vec2& p) const;
    Vec2 evaluate(const Vector& u, const Vec2& p) const;

private:
    const BodyMesh* mesh_;
    Vec2 lo_, cell_;
    Index nx_ = 1, ny_ = 1;
    std::vector<std::vector<Index>> buckets_;
};

struct ConvergenceLevel {
    Index factor = 1;
    /// Largest element diameter over both bodies.
    Real h = 0.0;
    Index dofs = 0;
    int iterations = 0;
    Real energy_error = 0.0;
    Real pressure_l2 = 0.0;
};

struct ConvergenceReport {
    std::vector<ConvergenceLevel> levels;
    Index reference_factor = 0;
    Real energy_rate = 0.0;
    Real pressure_rate = 0.0;
    /// False when a level failed; `error` then names it.
    bool complete = true;
    std::string error;
};

/// Solves the scenario refined by each factor and by `reference_factor`,
/// and measures each level against the reference solution. The hybrid
/// mesh is left unchanged.
ConvergenceReport convergence_study(const Scenario& base, const std::vector<Index>& factors,
                                    Index reference_factor);

/// Least-squares slope of log(e) against log(h).
Real fitted_rate(const std::vector<Real>& h, const std::vector<Real>& e);

/// level,h,energy_error,pressure_l2,rate (rate = local energy rate).
void write_convergence_csv(std::ostream& out, const ConvergenceReport& report);

struct ConstantsPoint {
    Index constants = 0;
    Real pressure_l2 = 0.0;
    Real p_max = 0.0;
    int iterations = 0;
};

/// Hertz pressure error against the analytical solution for several hybrid
/// resolutions on fixed body meshes.
std::vector<ConstantsPoint> constants_sweep(const Scenario& base, const std::vector<Index>& constants);

struct StiffnessPoint {
    Real stiffness = 0.0;
    Real max_down = 0.0;
    int iterations = 0;
    Vector x;
};

/// Largest downward displacement -min u_y over the nodes of a body.
Real max_downward_displacement(const System& sys, const Vector& x, int body);

std::vector<StiffnessPoint> stiffness_sweep(const Scenario& base, const std::vector<Real>& stiffness);

}  // namespace hnc
