#include <catch2/catch_amalgamated.hpp>

#include <cstring>
#include <sstream>

#include "rshdg/condense.hpp"
#include "rshdg/exact.hpp"

using namespace rshdg;

namespace {

double solution_difference(const HdgSolution& a, const HdgSolution& b) {
  double diff = 0.0, scale = 0.0;
  for (std::size_t e = 0; e < a.u.size(); ++e) {
    diff = std::max(diff, (a.u[e] - b.u[e]).cwiseAbs().maxCoeff());
    diff = std::max(diff, (a.p[e] - b.p[e]).cwiseAbs().maxCoeff());
    scale = std::max({scale, a.u[e].cwiseAbs().maxCoeff(), a.p[e].cwiseAbs().maxCoeff()});
  }
  for (std::size_t e = 0; e < a.uhat.size(); ++e) {
    diff = std::max(diff, (a.uhat[e] - b.uhat[e]).cwiseAbs().maxCoeff());
    scale = std::max(scale, a.uhat[e].cwiseAbs().maxCoeff());
  }
  diff = std::max(diff, std::abs(a.multiplier - b.multiplier));
  return diff / (scale > 0.0 ? scale : 1.0);
}

}  // namespace

TEST_CASE("retained dimension matches the counting formula") {
  for (int n : {2, 4}) {
    const Mesh mesh = structured_unit_square(n);
    for (int k = 0; k <= 2; ++k) {
      const SpaceSpec spec = SpaceSpec::with_default_tau(k);
      const ExactSolution exact = exact_trig();
      const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
      const CondensedSystem cond = condense(sys);
      const int interior = mesh.num_interior_edges();
      CHECK(cond.dimension() == 2 * (k + 1) * interior + mesh.num_triangles() + 1);
      CHECK(cond.dimension() < sys.dofs.dimension());
    }
  }
}

TEST_CASE("condensed and full solves agree") {
  const Mesh mesh = structured_unit_square(4);
  const ExactSolution exact = exact_trig();
  for (int k = 0; k <= 2; ++k) {
    const SpaceSpec spec = SpaceSpec::with_default_tau(k);
    const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
    const HdgSolution full = solve_full(sys);
    const HdgSolution cond = condense(sys).solve();
    CHECK(solution_difference(full, cond) < 1e-10);
  }
}

TEST_CASE("condensed solve matches polynomial reproduction too") {
  const Mesh mesh = structured_unit_square(2);
  for (int k = 0; k <= 2; ++k) {
    const SpaceSpec spec = SpaceSpec::with_default_tau(k);
    const ExactSolution exact = exact_divfree_poly(k);
    const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
    const HdgSolution full = solve_full(sys);
    const HdgSolution cond = condense(sys).solve();
    CHECK(solution_difference(full, cond) < 1e-10);
  }
}

TEST_CASE("condensed matrix is symmetric") {
  const Mesh mesh = structured_unit_square(3);
  const ExactSolution exact = exact_trig();
  for (int k = 0; k <= 2; ++k) {
    const SpaceSpec spec = SpaceSpec::with_default_tau(k);
    const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
    const CondensedSystem cond = condense(sys);
    CHECK(cond.matrix().symmetry_error() < 1e-10);
  }
}

TEST_CASE("condensation is deterministic") {
  const Mesh mesh = structured_unit_square(3);
  const SpaceSpec spec = SpaceSpec::with_default_tau(1);
  const ExactSolution exact = exact_trig();
  const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
  const CondensedSystem a = condense(sys);
  const CondensedSystem b = condense(sys);
  REQUIRE(a.matrix().nonzeros() == b.matrix().nonzeros());
  CHECK(std::memcmp(a.matrix().values().data(), b.matrix().values().data(),
                    a.matrix().values().size() * sizeof(double)) == 0);
  CHECK(std::memcmp(a.rhs().data(), b.rhs().data(), a.rhs().size() * sizeof(double)) == 0);
}

TEST_CASE("single-element mesh condenses to mean pressure and multiplier") {
  std::istringstream in("3 1\n0 0\n1 0\n0 1\n0 1 2\n");
  const Mesh mesh = read_mesh(in);
  const VectorField zero = [](double, double) { return Eigen::Vector2d::Zero().eval(); };
  for (int k = 0; k <= 2; ++k) {
    const SpaceSpec spec = SpaceSpec::with_default_tau(k);
    const GlobalSystem sys = assemble(mesh, spec, zero, zero);
    const CondensedSystem cond = condense(sys);
    CHECK(cond.dimension() == 2);  // no interior edges: mean pressure + multiplier
    const HdgSolution sol = cond.solve();
    CHECK(sol.u[0].norm() == 0.0);
    CHECK(sol.p[0].norm() == 0.0);
  }
}

TEST_CASE("single-element solve with data agrees with the full system") {
  std::istringstream in("3 1\n0 0\n1 0\n0 1\n0 1 2\n");
  const Mesh mesh = read_mesh(in);
  const ExactSolution exact = exact_linear_flow();
  for (int k = 0; k <= 2; ++k) {
    const SpaceSpec spec = SpaceSpec::with_default_tau(k);
    const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
    const HdgSolution full = solve_full(sys);
    const HdgSolution cond = condense(sys).solve();
    CHECK(solution_difference(full, cond) < 1e-11);
  }
}

TEST_CASE("condensed solve reports solver metadata") {
  const Mesh mesh = structured_unit_square(4);
  const SpaceSpec spec = SpaceSpec::with_default_tau(0);
  const ExactSolution exact = exact_trig();
  const GlobalSystem sys = assemble(mesh, spec, exact.body_force, exact.velocity);
  SolveReport report;
  condense(sys).solve(&report);
  CHECK(report.relative_residual < 1e-9);
  CHECK(report.pivot_count == condense(sys).dimension());
}
