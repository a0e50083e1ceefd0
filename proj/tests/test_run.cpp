#include "helpers.hpp"

#include "hnc/run.hpp"

#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

using namespace hnc;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("hnc_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

int cli(const std::string& args) {
    const std::string cmd = std::string(HNC_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

void write_file(const fs::path& p, const Scenario& s) {
    std::ofstream out(p);
    write_scenario(out, s);
}

}  // namespace

TEST_CASE("legacy VTK layout") {
    const BodyMesh mesh = test::two_triangle_square();
    Vector u(8);
    u << 0, 0, 0.1, 0, 0.1, 0.2, 0, 0.2;
    std::ostringstream out;
    write_vtk(out, mesh, u, "square");
    const auto l = lines(out.str());
    REQUIRE(l.size() == 4 + 1 + 4 + 1 + 2 + 1 + 2 + 2 + 4);
    CHECK(l[0] == "# vtk DataFile Version 3.0");
    CHECK(l[1] == "square");
    CHECK(l[3] == "DATASET UNSTRUCTURED_GRID");
    CHECK(l[4] == "POINTS 4 double");
    CHECK(l[9] == "CELLS 2 8");
    CHECK(l[10] == "3 0 1 2");
    CHECK(l[12] == "CELL_TYPES 2");
    CHECK(l[13] == "5");
    CHECK(l[15] == "POINT_DATA 4");
    CHECK(l[16] == "VECTORS displacement double");
    CHECK(l[19] == "0.1 0.2 0");
}

TEST_CASE("solve writes one pressure row per body-1 pairing, deterministically") {
    const fs::path a = scratch("solve_a"), b = scratch("solve_b");
    const Scenario s = test::tiny_hertz();
    const RunResult ra = command_solve(s, {a, nullptr});
    command_solve(s, {b, nullptr});
    CHECK(ra.pass);
    for (const char* f : {"body1.vtk", "body2.vtk", "pressure.csv", "iterations.log", "summary.txt"})
        CHECK(fs::exists(a / f));

    const auto rows = lines(slurp(a / "pressure.csv"));
    CHECK(rows.front() == "x,y,Sigma,sigma_n,S,active");
    const System sys = build_system(build_setup(s));
    std::size_t body1 = 0;
    for (const auto& p : sys.pairings()) body1 += p.body == 1 ? 1 : 0;
    CHECK(rows.size() == body1 + 1);
    CHECK(slurp(a / "pressure.csv") == slurp(b / "pressure.csv"));
    CHECK(slurp(a / "summary.txt").find("iterations = ") != std::string::npos);
    CHECK(lines(slurp(a / "iterations.log")).size() >= 2);
}

TEST_CASE("patch and lemma commands pass") {
    const fs::path d = scratch("patch");
    const RunResult p = command_patch_test({d, nullptr}, 1.0);
    CHECK(p.pass);
    CHECK(p.summary.find("pass = true") != std::string::npos);
    const RunResult l = command_lemmas({scratch("lemmas"), nullptr}, 1000);
    CHECK(l.pass);
}

TEST_CASE("command-line exit codes") {
    const fs::path d = scratch("cli");
    CHECK(cli("--help") == 0);
    CHECK(cli("--no-such-flag solve") == 2);
    CHECK(cli("--mode sideways solve") == 2);
    CHECK(cli("--quiet --out " + (d / "patch").string() + " patch-test") == 0);
    CHECK(fs::exists(d / "patch" / "summary.txt"));

    {
        std::ofstream bad(d / "bad.txt");
        bad << "body1.mesh = block\nbody2.mesh = block\nhybrid.kind = p0\nbody1.E = -1\n";
    }
    CHECK(cli("--scenario " + (d / "bad.txt").string() + " --out " + (d / "bad").string() + " solve") == 2);

    Scenario stuck = with_gamma_mult(test::tiny_hertz(), 1000.0);
    stuck.solver.max_iter = 1;
    write_file(d / "stuck.txt", stuck);
    CHECK(cli("--quiet --scenario " + (d / "stuck.txt").string() + " --out " + (d / "stuck").string() + " solve") == 3);
    CHECK(fs::exists(d / "stuck" / "iterations.log"));

    // A softening sequence breaks the stiffening check.
    Scenario str = string_scenario(0.0);
    str.bodies[0].disc.n_arc = 12;
    str.bodies[0].disc.n_radial = 4;
    str.bodies[1].block.nx = 12;
    str.bodies[1].block.ny = 4;
    write_file(d / "string.txt", str);
    const std::string base = "--quiet --scenario " + (d / "string.txt").string() + " --out " + (d / "sweep").string();
    CHECK(cli(base + " stiffness-sweep --stiffness 0 50") == 0);
    CHECK(cli(base + " stiffness-sweep --stiffness 50 0") == 4);
    CHECK(fs::exists(d / "sweep" / "stiffness.csv"));
}
