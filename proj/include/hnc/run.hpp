#pragma once

/**
 * @file run.hpp
 * @brief Output writers and the subcommands behind the command-line tool.
 *
 * Every command writes into an output directory and returns whether its
 * checks passed. Solver failures propagate as exceptions.
 */

#include "hnc/oracles.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace hnc {

/// Legacy ASCII unstructured grid with a point displacement vector field.
void write_vtk(std::ostream& out, const BodyMesh& mesh, const Vector& displacement, const std::string& title);

/// x,y,Sigma,sigma_n,S,active (one row per contact quadrature point).
void write_pressure_csv(std::ostream& out, const std::vector<PressureSample>& profile);
/// x,Sigma,sigma_n,hertz_p
void write_hertz_csv(std::ostream& out, const std::vector<PressureSample>& profile, const HertzSolution& hertz);

struct RunOptions {
    std::filesystem::path out = "out";
    /// Progress and Newton iteration lines; null for silence.
    std::ostream* log = nullptr;
};

struct RunResult {
    bool pass = true;
    std::vector<std::filesystem::path> files;
    /// The key = value lines also written to summary.txt.
    std::string summary;
};

/// body1.vtk, body2.vtk, pressure.csv (body 1), iterations.log, summary.txt.
RunResult command_solve(const Scenario& s, const RunOptions& opt);

/// Solve plus comparison with the Hertz solution. Passes when p_max is
/// within 15%, the half-width within 20% and the contact force within 5%.
RunResult command_hertz_bench(const Scenario& s, const RunOptions& opt);

/// Both constraint modes; passes when |Sigma + p| <= 1e-8 everywhere and
/// Newton needs at most 1 (equality) or 3 (inequality) iterations.
RunResult command_patch_test(const RunOptions& opt, Real pressure = 1.0);

struct ConvergeOptions {
    std::vector<Index> factors{1, 2, 4};
    Index reference_factor = 8;
    Real min_rate = 0.8;
    Real max_rate = 1.2;
    /// Also sweep the number of hybrid constants at fixed body meshes.
    std::vector<Index> constants;
    /// Base of the constants sweep (default: the Hertz benchmark).
    Scenario sweep_base = hertz_scenario();
};

/// convergence.csv and, with a constants list, constants.csv. Passes when
/// the fitted energy rate lies in [min_rate, max_rate] and the constants
/// sweep error decreases.
RunResult command_converge(const Scenario& base, const ConvergeOptions& copt, const RunOptions& opt);

/// Both complementarity sweeps; passes with zero failures.
RunResult command_lemmas(const RunOptions& opt, Index samples = 100000);

/// stiffness.csv and one body1 VTK per stiffness. Passes when the maximum
/// downward displacement strictly decreases and a zero stiffness reproduces
/// the run without a hybrid model to 1e-10.
RunResult command_stiffness_sweep(const Scenario& base, const std::vector<Real>& stiffness, const RunOptions& opt);

}  // namespace hnc
