#include "oracles.hpp"
#include "wlap/analysis.hpp"
#include "wlap/linear_solver.hpp"

#include <doctest.h>

#include <cmath>

using namespace wlap;

namespace {

// Random SPD system from the Dirichlet assembly on a random mask.
SparseSystem random_spd(oracle::Gen& gen, Eigen::Index w, Eigen::Index h) {
  Mask m = gen.interior_mask(w, h, 0.1);
  m(h / 2, w / 2) = true;
  const auto d = build_domain(m, 1.0 / double(w - 1));
  return assemble_dirichlet(d, gen.field(w, h, d.spacing));
}

SparseSystem random_weak(oracle::Gen& gen, Eigen::Index n) {
  Mask m = gen.interior_mask(n, n, 0.05);
  const auto d = build_domain(m, 1.0 / double(n - 1));
  return assemble_weak(d, make_weight(gen.smooth_weight(n, 0.2, 0.7), d), gen.field(n, n, d.spacing));
}

double rel(const Vector& a, const Vector& b) { return (a - b).norm() / b.norm(); }

}  // namespace

TEST_CASE("identity-like system converges immediately") {
  const Eigen::Index n = 16;
  const double h = 1.0 / 15;
  const auto grid = build_domain(Mask::Constant(n, n, false), h);
  oracle::Gen gen(1);
  const auto f = gen.field(n, n, h);
  const auto rep = solve(assemble_collocation(grid, make_weight(ScalarField(n, n, h, 1.0)), f));
  CHECK(rep.converged);
  CHECK(rep.iterations <= 2);
  CHECK((recover_from_collocation(grid, rep.solution).values - f.values).abs().maxCoeff() < 1e-12);
}

TEST_CASE("annulus Dirichlet system: cg matches dense LU") {
  const auto a = build_annulus(0.25, 65);
  const auto s = assemble_dirichlet(a.domain, a.data);
  REQUIRE(s.n() <= kDirectLimit);
  SolveOptions cg;
  cg.tolerance = 1e-12;
  const auto it = solve(s, cg);
  SolveOptions lu;
  lu.method = SolveMethod::direct;
  const auto direct = solve(s, lu);
  CHECK(it.converged);
  CHECK(rel(it.solution, direct.solution) < 1e-8);
}

TEST_CASE("method mismatch and argument checks") {
  oracle::Gen gen(2);
  const auto s = random_weak(gen, 12);
  REQUIRE_FALSE(s.symmetric_hint);
  CHECK_THROWS_AS(solve(s, SolveOptions{}), MethodMismatchError);
  SolveOptions bad;
  bad.method = SolveMethod::bicgstab;
  bad.tolerance = 0.0;
  CHECK_THROWS_AS(solve(s, bad), std::invalid_argument);
  CHECK_THROWS_AS(residual(s, Vector::Zero(s.n() + 1)), std::invalid_argument);
}

TEST_CASE("zero weight: the solver cannot succeed and the diagnosis says why") {
  const Eigen::Index n = 10;
  const auto grid = build_domain(Mask::Constant(n, n, false), 0.1);
  const auto w = make_weight(ScalarField(n, n, 0.1, 0.0));
  oracle::Gen gen(3);
  AssemblyOptions singular;
  singular.allow_singular = true;
  auto s = assemble_collocation(grid, w, gen.field(n, n, 0.1), singular);
  // c = 0 zeroes the data term; a right-hand side off the range of the
  // singular matrix has no solution at all.
  REQUIRE(s.rhs.norm() == 0.0);
  for (Eigen::Index k = 0; k < s.n(); ++k) s.rhs[k] = gen.uniform(0.5, 1.0);
  SolveOptions opt;
  opt.method = SolveMethod::bicgstab;
  opt.tolerance = 1e-12;
  bool failed = false;
  try {
    failed = !solve(s, opt).converged;
  } catch (const BreakdownError& e) {
    failed = !e.partial().converged;
  }
  CHECK(failed);
  const auto diag = detect_singularity(s, grid, w);
  CHECK(diag.kind == SingularityKind::constant_nullspace);
  CHECK(diag.constant_residual < 1e-12);
  CHECK(diag.evidence.find("pure Neumann") != std::string::npos);
}

TEST_CASE("single weak pixel becomes ill-conditioned under refinement") {
  auto diagnose = [](Eigen::Index n) {
    const double h = 1.0 / double(n - 1);
    const auto grid = build_domain(Mask::Constant(n, n, false), h);
    ScalarField c(n, n, h, 0.0);
    c(n / 2, n / 2) = 1e-3;
    const auto w = make_weight(c);
    return detect_singularity(assemble_collocation(grid, w, ScalarField(n, n, h, 0.5)), grid, w);
  };
  const auto coarse = diagnose(17);
  const auto fine = diagnose(129);
  CHECK(coarse.kind == SingularityKind::ok);
  CHECK(fine.kind == SingularityKind::ill_conditioned);
  CHECK(fine.condition_estimate > 1e12);
  CHECK(fine.condition_estimate > 100 * coarse.condition_estimate);
}

TEST_CASE("binary mask with data is regular") {
  oracle::Gen gen(4);
  const auto s = random_spd(gen, 20, 20);
  CHECK(detect_singularity(s).kind == SingularityKind::ok);
}

TEST_CASE("residual") {
  oracle::Gen gen(5);
  const auto s = random_spd(gen, 18, 15);
  REQUIRE(s.n() <= 500);
  CHECK(residual(s, Vector::Zero(s.n())) == doctest::Approx(s.rhs.norm()).epsilon(1e-15));
  const Vector x = oracle::dense_solve(Eigen::MatrixXd(s.matrix), s.rhs);
  CHECK(residual(s, x) < 1e-10 * s.rhs.norm());
  const double norm_a = Eigen::MatrixXd(s.matrix).operatorNorm();
  for (int t = 0; t < 10; ++t) {
    Vector y = x;
    const double delta = gen.uniform(-1e-3, 1e-3);
    y[gen.integer(0, s.n() - 1)] += delta;
    CHECK(std::abs(residual(s, y) - residual(s, x)) <= norm_a * std::abs(delta) * (1 + 1e-12));
  }
}

TEST_CASE("cg, bicgstab and dense LU agree") {
  oracle::Gen gen(6);
  for (int t = 0; t < 8; ++t) {
    const auto n = gen.integer(8, 40);
    const auto s = t % 2 ? random_spd(gen, n, gen.integer(8, 40)) : random_weak(gen, n);
    REQUIRE(s.n() <= 2000);
    SolveOptions lu;
    lu.method = SolveMethod::direct;
    const Vector ref = solve(s, lu).solution;
    SolveOptions bi;
    bi.method = SolveMethod::bicgstab;
    bi.tolerance = 1e-13;
    const auto b = solve(s, bi);
    CHECK(b.converged);
    CHECK(rel(b.solution, ref) < 1e-8);
    if (s.symmetric_hint) {
      SolveOptions cg;
      cg.tolerance = 1e-13;
      const auto c = solve(s, cg);
      CHECK(c.converged);
      CHECK(rel(c.solution, ref) < 1e-8);
      CHECK(c.final_residual <= cg.tolerance * (1 + s.rhs.norm()));
    }
  }
}

TEST_CASE("cg energy decreases monotonically") {
  oracle::Gen gen(7);
  const auto s = random_spd(gen, 40, 40);
  SolveOptions opt;
  opt.track_energy = true;
  opt.jacobi = false;
  const auto rep = solve(s, opt);
  REQUIRE(rep.energy_trace.size() > 3);
  for (std::size_t k = 1; k < rep.energy_trace.size(); ++k)
    CHECK(rep.energy_trace[k] <= rep.energy_trace[k - 1] + 1e-12 * std::abs(rep.energy_trace[k - 1]));
}

TEST_CASE("iteration cap gives a report, not an exception") {
  oracle::Gen gen(8);
  const auto s = random_spd(gen, 40, 40);
  SolveOptions opt;
  opt.max_iterations = 3;
  const auto rep = solve(s, opt);
  CHECK_FALSE(rep.converged);
  CHECK(rep.iterations == 3);
  CHECK(rep.final_residual == doctest::Approx(residual(s, rep.solution)));
}

TEST_CASE("solves are deterministic") {
  oracle::Gen gen(9);
  const auto s = random_weak(gen, 30);
  SolveOptions opt;
  opt.method = SolveMethod::bicgstab;
  const auto a = solve(s, opt), b = solve(s, opt);
  CHECK(a.iterations == b.iterations);
  CHECK((a.solution.array() == b.solution.array()).all());
}

TEST_CASE("generalized power iteration against dense eigensolve") {
  oracle::Gen gen(10);
  for (int t = 0; t < 4; ++t) {
    const Eigen::Index n = 15;
    Mask m = gen.interior_mask(n, n, 0.05);
    m(7, 7) = true;
    const auto d = build_domain(m, 1.0 / 14);
    const auto c = gen.field(n, n, d.spacing, 0.0, 0.8);
    const auto k = weighted_stiffness(d, c);
    const auto mass = lumped_mass(d);
    const auto est = largest_generalized_eigenvalue(mass, k, 1e-14, 20000);
    const double ref = oracle::max_generalized_eigenvalue(Eigen::MatrixXd(mass), Eigen::MatrixXd(k));
    CHECK(est.value == doctest::Approx(ref).epsilon(1e-6));
  }
}
