#include <doctest.h>

#include <random>

#include "test_util.hpp"

using namespace graphpass;
using graphpass::testing::constant_field;
using graphpass::testing::random_function;
using graphpass::testing::random_graph;
using graphpass::testing::random_potential;
using graphpass::testing::unit_model;
using graphpass::testing::zero_nonlinearity;

namespace {

StatePair random_state(const WeightedGraph& g, std::mt19937_64& rng, double amp = 1.0) {
  return StatePair(random_function(g, rng, amp), random_function(g, rng, amp));
}

Model random_model(const WeightedGraph& g, std::mt19937_64& rng, Nonlinearity nl,
                   double b1, double b2) {
  std::uniform_real_distribution<double> coeff(0.5, 2.0);
  return Model(g, coeff(rng), coeff(rng), b1, b2, random_potential(g, rng),
               random_potential(g, rng), std::move(nl));
}

Nonlinearity quadratic_nl(double lambda) {
  Nonlinearity nl;
  nl.name = "quadratic";
  nl.F = [lambda](int, double s, double t) { return 0.5 * lambda * (s * s + t * t); };
  nl.F_s = [lambda](int, double s, double) { return lambda * s; };
  nl.F_t = [lambda](int, double, double t) { return lambda * t; };
  nl.F_ss = [lambda](int, double, double) { return lambda; };
  nl.F_st = [](int, double, double) { return 0.0; };
  nl.F_tt = [lambda](int, double, double) { return lambda; };
  nl.claims_even = true;
  nl.claims_F0 = true;
  return nl;
}

}  // namespace

TEST_CASE("state pairs") {
  WeightedGraph g = generate_path(3);
  WeightedGraph h = generate_path(3);
  CHECK_THROWS_AS(StatePair(VertexFunction::zero(g), VertexFunction::zero(h)), GraphMismatch);
  StatePair z = StatePair::zero(g);
  CHECK(pair_norm(g, unit_model(g, zero_nonlinearity()), z) == 0.0);
  StatePair s(VertexFunction::constant(g, 1.0), VertexFunction::constant(g, -2.0));
  StatePair neg = -s;
  CHECK(neg.u(0) == -1.0);
  CHECK(neg.v(2) == 2.0);
}

TEST_CASE("phi worked examples") {
  WeightedGraph p2 = generate_path(2);
  Eigen::VectorXd uv(2);
  uv << 1.0, 0.0;
  StatePair s(VertexFunction(p2, uv), VertexFunction::zero(p2));

  Model m0 = unit_model(p2, zero_nonlinearity());
  EnergyBreakdown b0 = phi(p2, m0, s);
  CHECK(b0.quad_u == doctest::Approx(2.0));  // (1/2)||u||_E^2 with ||u||_E^2 = 4
  CHECK(b0.total == doctest::Approx(2.0));

  Model m4 = unit_model(p2, zero_nonlinearity(), 4.0);
  EnergyBreakdown b4 = phi(p2, m4, s);
  CHECK(b4.kirchhoff_u == doctest::Approx(1.0));  // (4/4)(int |grad u|^2)^2 = 1
  CHECK(b4.total == doctest::Approx(3.0));

  CHECK(phi(p2, m4, StatePair::zero(p2)).total == 0.0);
}

TEST_CASE("residual on the single-vertex cubic") {
  WeightedGraph one = build_graph({"o"}, {}, {1.0});
  Model m = unit_model(one, power_pq(4.0, 4.0));
  for (double u : {0.0, 0.5, 1.0, -1.0, 2.0}) {
    StatePair s(VertexFunction::constant(one, u), VertexFunction::zero(one));
    StatePair r = residual(one, m, s);
    CHECK(r.u(0) == doctest::Approx(u - u * u * u));
    CHECK(r.v(0) == doctest::Approx(0.0));
  }
  StatePair root(VertexFunction::constant(one, 1.0), VertexFunction::zero(one));
  CHECK(residual_sup(one, m, root) == doctest::Approx(0.0));
}

TEST_CASE("residual agrees with the assembled linear operator for quadratic F") {
  std::mt19937_64 rng(21);
  double lambda = 0.7;
  for (int trial = 0; trial < 10; ++trial) {
    WeightedGraph g = random_graph(rng, 12);
    Model m = random_model(g, rng, quadratic_nl(lambda), 0.0, 0.0);
    StatePair s = random_state(g, rng, 2.0);
    AssembledOperators ops = assemble(g);
    Eigen::VectorXd r1 = ops.biharmonic_matrix * s.u.values() -
                         m.a1 * (ops.laplacian_matrix * s.u.values()) +
                         (m.V1.values().array() * s.u.values().array()).matrix() -
                         lambda * s.u.values();
    StatePair r = residual(g, m, s);
    for (int x = 0; x < g.size(); ++x)
      CHECK(std::abs(r.u(x) - r1(x)) <= 1e-12 * (1.0 + std::abs(r1(x))));
  }
}

TEST_CASE("phi_directional is the derivative of phi and pairs with the residual") {
  std::mt19937_64 rng(22);
  Nonlinearity r11 = remark11_poly(constant_field(0.4), constant_field(0.6), 0.4, 0.6);
  std::uniform_real_distribution<double> bco(0.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    WeightedGraph g = random_graph(rng, 10);
    Model m = random_model(g, rng, r11, bco(rng), bco(rng));
    StatePair s = random_state(g, rng);
    StatePair d = random_state(g, rng);

    double pairing = phi_directional(g, m, s, d);
    double h = 1e-5;
    double fd = (phi(g, m, axpy(g, s, h, d)).total - phi(g, m, axpy(g, s, -h, d)).total) /
                (2.0 * h);
    CHECK(std::abs(pairing - fd) <= 1e-6 * (1.0 + std::abs(fd)));

    // weak form equals the mu-weighted pairing with the strong residual
    StatePair r = residual(g, m, s);
    double strong = 0.0;
    for (int x = 0; x < g.size(); ++x)
      strong += (r.u(x) * d.u(x) + r.v(x) * d.v(x)) * g.mu(x);
    CHECK(std::abs(pairing - strong) <= 1e-10 * (1.0 + std::abs(pairing)));

    CHECK(phi_directional(g, m, s, StatePair::zero(g)) == doctest::Approx(0.0));
    CHECK(self_pairing(g, m, s) ==
          doctest::Approx(phi_directional(g, m, s, s)).epsilon(1e-10));
  }
}

TEST_CASE("the functional identity behind the compactness argument") {
  std::mt19937_64 rng(23);
  Nonlinearity r11 = remark11_poly(constant_field(0.5), constant_field(0.5), 0.5, 0.5);
  std::uniform_real_distribution<double> bco(0.0, 2.0);
  for (int trial = 0; trial < 100; ++trial) {
    WeightedGraph g = random_graph(rng, 10);
    bool kirchhoff = trial % 2 == 0;
    Model m = random_model(g, rng, r11, kirchhoff ? bco(rng) + 0.01 : 0.0,
                           kirchhoff ? bco(rng) : 0.0);
    StatePair s = random_state(g, rng, 2.0);
    CeramiDiagnostics cd = cerami_identity(g, m, s);
    CHECK(cd.gap <= 1e-9 * (1.0 + std::abs(cd.phi)));
    if (m.theta() == 2) CHECK(cd.quarter_norms == 0.0);
  }
  // identity at the origin is exact
  WeightedGraph g = generate_path(3);
  Model m = unit_model(g, r11, 1.0, 1.0);
  CHECK(cerami_identity(g, m, StatePair::zero(g)).gap == doctest::Approx(0.0));
}

TEST_CASE("evenness transfers from F to phi") {
  std::mt19937_64 rng(24);
  Nonlinearity r42 = remark42_exponential(constant_field(0.2), 0.2, 0.2);
  for (int trial = 0; trial < 50; ++trial) {
    WeightedGraph g = random_graph(rng, 10);
    Model m = random_model(g, rng, r42, 1.0, 0.5);
    StatePair s = random_state(g, rng, 2.0);
    double p = phi(g, m, s).total;
    CHECK(std::abs(p - phi(g, m, -s).total) <= 1e-12 * (1.0 + std::abs(p)));
  }
}

TEST_CASE("jacobian_apply matches finite differences of the residual") {
  std::mt19937_64 rng(25);
  Nonlinearity r11 = remark11_poly(constant_field(0.4), constant_field(0.7), 0.4, 0.7);
  for (int trial = 0; trial < 30; ++trial) {
    WeightedGraph g = random_graph(rng, 8);
    // alternate b = 0 and b > 0 so the nonlocal term is exercised
    Model m = random_model(g, rng, r11, trial % 2 ? 1.3 : 0.0, trial % 2 ? 0.8 : 0.0);
    StatePair s = random_state(g, rng);
    StatePair d = random_state(g, rng);
    StatePair jd = jacobian_apply(g, m, s, d);
    double h = 1e-6;
    StatePair rp = residual(g, m, axpy(g, s, h, d));
    StatePair rm = residual(g, m, axpy(g, s, -h, d));
    for (int x = 0; x < g.size(); ++x) {
      double fdu = (rp.u(x) - rm.u(x)) / (2.0 * h);
      double fdv = (rp.v(x) - rm.v(x)) / (2.0 * h);
      CHECK(std::abs(jd.u(x) - fdu) <= 1e-5 * (1.0 + std::abs(fdu)));
      CHECK(std::abs(jd.v(x) - fdv) <= 1e-5 * (1.0 + std::abs(fdv)));
    }
  }
}

TEST_CASE("jacobian is symmetric in the mass-weighted pairing") {
  std::mt19937_64 rng(26);
  Nonlinearity r11 = remark11_poly(constant_field(0.5), constant_field(0.5), 0.5, 0.5);
  for (int trial = 0; trial < 20; ++trial) {
    WeightedGraph g = random_graph(rng, 10);
    Model m = random_model(g, rng, r11, 1.1, 0.6);
    StatePair s = random_state(g, rng);
    StatePair d1 = random_state(g, rng);
    StatePair d2 = random_state(g, rng);
    StatePair j1 = jacobian_apply(g, m, s, d1);
    StatePair j2 = jacobian_apply(g, m, s, d2);
    double a = 0.0, b = 0.0;
    for (int x = 0; x < g.size(); ++x) {
      a += (j1.u(x) * d2.u(x) + j1.v(x) * d2.v(x)) * g.mu(x);
      b += (j2.u(x) * d1.u(x) + j2.v(x) * d1.v(x)) * g.mu(x);
    }
    CHECK(std::abs(a - b) <= 1e-10 * (1.0 + std::abs(a)));
  }
}

TEST_CASE("second-partial fallback") {
  WeightedGraph g = generate_path(3);
  Nonlinearity full = remark11_poly(constant_field(0.5), constant_field(0.5), 0.5, 0.5);
  Nonlinearity firsts_only = full;
  firsts_only.F_ss = nullptr;
  firsts_only.F_st = nullptr;
  firsts_only.F_tt = nullptr;
  CHECK_FALSE(firsts_only.has_second_partials());

  Model m_full = unit_model(g, full, 1.0, 1.0);
  Model m_fd = unit_model(g, firsts_only, 1.0, 1.0);
  std::mt19937_64 rng(27);
  StatePair s = random_state(g, rng);
  StatePair d = random_state(g, rng);
  CHECK_THROWS_AS(jacobian_apply(g, m_fd, s, d, false), MissingSecondPartials);
  StatePair exact = jacobian_apply(g, m_full, s, d);
  StatePair approx = jacobian_apply(g, m_fd, s, d, true);
  for (int x = 0; x < g.size(); ++x) {
    CHECK(std::abs(exact.u(x) - approx.u(x)) <= 1e-6 * (1.0 + std::abs(exact.u(x))));
    CHECK(std::abs(exact.v(x) - approx.v(x)) <= 1e-6 * (1.0 + std::abs(exact.v(x))));
  }
}
