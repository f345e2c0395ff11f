#include <doctest.h>

#include <optional>
#include <random>

#include "test_util.hpp"

using namespace graphpass;
using graphpass::testing::constant_field;
using graphpass::testing::unit_model;

namespace {

// single vertex, V = 1, F = (|s|^4 + |t|^4)/4: residual u - u^3 per component,
// per-component energy u^2/2 - u^4/4, nontrivial roots at +-1 with value 1/4
struct ScalarFixture {
  WeightedGraph g = build_graph({"o"}, {}, {1.0});
  Model m = unit_model(g, power_pq(4.0, 4.0));
  SolverConfig cfg;

  StatePair at(double u, double v = 0.0) const {
    return StatePair(VertexFunction::constant(g, u), VertexFunction::constant(g, v));
  }
};

}  // namespace

TEST_CASE("newton converges on the scalar cubic") {
  ScalarFixture fx;
  SolutionRecord trivial = newton_solve(fx.g, fx.m, fx.cfg, fx.at(0.0));
  CHECK(trivial.is_trivial);
  CHECK(trivial.iterations == 0);
  CHECK(trivial.residual_sup == 0.0);

  SolutionRecord rec = newton_solve(fx.g, fx.m, fx.cfg, fx.at(1.2));
  CHECK_FALSE(rec.is_trivial);
  CHECK(std::abs(rec.state.u(0) - 1.0) <= 1e-6);
  CHECK(rec.residual_sup <= fx.cfg.tol_residual);
  CHECK(rec.energy == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(rec.method == "newton_deflated");

  SolutionRecord neg = newton_solve(fx.g, fx.m, fx.cfg, fx.at(-0.8));
  CHECK(std::abs(neg.state.u(0) + 1.0) <= 1e-6);
}

TEST_CASE("deflation steers newton away from known roots") {
  ScalarFixture fx;
  SolutionRecord first = newton_solve(fx.g, fx.m, fx.cfg, fx.at(1.2));
  first.id = 0;

  // from a start that plain Newton sends to +1, the deflated solve must not
  // return +1 again
  std::vector<SolutionRecord> known = {first};
  bool saw_other = false;
  try {
    SolutionRecord second = newton_solve(fx.g, fx.m, fx.cfg, fx.at(0.9), known);
    CHECK(pair_dist(fx.g, fx.m, second.state, first.state) > 1e-3);
    CHECK(second.residual_sup <= fx.cfg.tol_residual);  // still a true root
    CHECK(second.deflated_against == std::vector<int>{0});
    saw_other = true;
  } catch (const NoConvergence&) {
    // acceptable: deflation may push the iteration out of the basin entirely
  }

  // soundness over many random starts: deflated results are never the
  // deflated-against root, and always satisfy the undeflated residual
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> box(-2.0, 2.0);
  int converged = 0;
  for (int trial = 0; trial < 50; ++trial) {
    StatePair start = fx.at(box(rng), box(rng));
    std::optional<SolutionRecord> base;
    try {
      base = newton_solve(fx.g, fx.m, fx.cfg, start);
    } catch (const Error&) {
      continue;
    }
    if (base->is_trivial) continue;
    base->id = 0;
    try {
      SolutionRecord defl = newton_solve(fx.g, fx.m, fx.cfg, start, {*base});
      CHECK(pair_dist(fx.g, fx.m, defl.state, base->state) > fx.cfg.dedup_distance);
      CHECK(defl.residual_sup <= fx.cfg.tol_residual);
      ++converged;
    } catch (const Error&) {
    }
  }
  CHECK((saw_other || converged > 0));
}

TEST_CASE("antipodal completion") {
  ScalarFixture fx;
  SolutionRecord rec = newton_solve(fx.g, fx.m, fx.cfg, fx.at(1.2));
  SolutionRecord anti = antipode(fx.g, fx.m, fx.cfg, rec);
  CHECK(anti.state.u(0) == doctest::Approx(-rec.state.u(0)));
  CHECK(anti.energy == doctest::Approx(rec.energy));
  CHECK(anti.residual_sup <= fx.cfg.tol_residual);
  CHECK(anti.method == "newton_deflated+antipode");

  // an asymmetric nonlinearity must be caught
  Nonlinearity skew;
  skew.name = "skew";
  skew.F = [](int, double s, double t) { return s * s * s + t * t * t; };
  skew.F_s = [](int, double s, double) { return 3.0 * s * s; };
  skew.F_t = [](int, double, double t) { return 3.0 * t * t; };
  skew.F_ss = [](int, double s, double) { return 6.0 * s; };
  skew.F_st = [](int, double, double) { return 0.0; };
  skew.F_tt = [](int, double, double t) { return 6.0 * t; };
  Model ms = unit_model(fx.g, skew);
  SolutionRecord sk = newton_solve(fx.g, ms, fx.cfg, fx.at(0.3, 0.3));
  CHECK(std::abs(sk.state.u(0) - 1.0 / 3.0) <= 1e-6);  // root of u = 3u^2
  CHECK_THROWS_AS(antipode(fx.g, ms, fx.cfg, sk), SymmetryViolated);
}

TEST_CASE("mountain pass on the scalar oracle") {
  ScalarFixture fx;
  CHECK(phi(fx.g, fx.m, fx.at(2.0)).total == doctest::Approx(-2.0));
  SolutionRecord rec = mountain_pass(fx.g, fx.m, fx.cfg, fx.at(2.0));
  CHECK(rec.method == "mountain_pass");
  CHECK(std::abs(std::abs(rec.state.u(0)) - 1.0) <= 1e-6);
  CHECK(rec.energy == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(rec.residual_sup <= fx.cfg.tol_residual);

  // a far point with Phi > 0 gets doubled until Phi < 0 before deformation
  SolutionRecord rec2 = mountain_pass(fx.g, fx.m, fx.cfg, fx.at(0.3));
  CHECK(rec2.energy == doctest::Approx(0.25).epsilon(1e-6));

  SolverConfig bad = fx.cfg;
  bad.mp_path_points = 2;
  CHECK_THROWS_AS(mountain_pass(fx.g, fx.m, bad, fx.at(2.0)), BadParams);
}

TEST_CASE("enumerate on the scalar fixture") {
  ScalarFixture fx;
  CHECK_THROWS_AS(enumerate_solutions(fx.g, fx.m, fx.cfg, 0), BadParams);

  EnumerateResult res = enumerate_solutions(fx.g, fx.m, fx.cfg, 2);
  CHECK_FALSE(res.found_fewer);
  REQUIRE(res.selected.size() == 2);
  // roots are (u,v) in {-1,0,1}^2 minus the origin: energies 1/4 and 1/2
  CHECK(res.selected[0].energy == doctest::Approx(0.25).epsilon(1e-8));
  CHECK(res.selected[1].energy == doctest::Approx(0.5).epsilon(1e-8));
  CHECK(res.selected[0].energy < res.selected[1].energy);
  for (const auto& rec : res.all_accepted) {
    CHECK(rec.residual_sup <= fx.cfg.tol_residual);
    CHECK_FALSE(rec.is_trivial);
    // every accepted root has its antipode in the accepted set
    bool found = false;
    for (const auto& other : res.all_accepted)
      if (pair_dist(fx.g, fx.m, other.state, -rec.state) <= 1e-6) found = true;
    CHECK(found);
  }
  CHECK(res.energy_levels.size() == 2);
}

TEST_CASE("enumerate is deterministic for a fixed seed") {
  ScalarFixture fx;
  fx.cfg.seed = 77;
  EnumerateResult a = enumerate_solutions(fx.g, fx.m, fx.cfg, 2);
  EnumerateResult b = enumerate_solutions(fx.g, fx.m, fx.cfg, 2);
  REQUIRE(a.all_accepted.size() == b.all_accepted.size());
  REQUIRE(a.energy_levels.size() == b.energy_levels.size());
  for (std::size_t i = 0; i < a.energy_levels.size(); ++i)
    CHECK(a.energy_levels[i] == b.energy_levels[i]);
  for (std::size_t i = 0; i < a.all_accepted.size(); ++i) {
    CHECK(a.all_accepted[i].energy == b.all_accepted[i].energy);
    CHECK(a.all_accepted[i].iterations == b.all_accepted[i].iterations);
    CHECK(pair_dist(fx.g, fx.m, a.all_accepted[i].state, b.all_accepted[i].state) == 0.0);
  }
}

TEST_CASE("mountain pass energy clears the audited ring level") {
  WeightedGraph g = generate_path(3);
  Nonlinearity r11 = remark11_poly(constant_field(0.5), constant_field(0.5), 0.5, 0.5);
  Model m = unit_model(g, r11, 1.0, 1.0);
  SamplingPlan plan;
  plan.samples = 200;
  AuditReport rep = audit(g, m, plan);
  REQUIRE(rep.all_checked_pass);
  REQUIRE(rep.alpha_star > 0.0);

  SolverConfig cfg;
  StatePair far(VertexFunction::constant(g, 3.0), VertexFunction::constant(g, 0.0));
  SolutionRecord rec = mountain_pass(g, m, cfg, far);
  CHECK(rec.energy > 0.0);
  CHECK(rec.energy >= rep.alpha_star);
  CHECK(rec.residual_sup <= cfg.tol_residual);
}
