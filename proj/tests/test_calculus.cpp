#include <doctest.h>

#include <random>

#include "test_util.hpp"

using namespace graphpass;
using graphpass::testing::random_function;
using graphpass::testing::random_graph;
using graphpass::testing::random_potential;

namespace {

VertexFunction vf(const WeightedGraph& g, std::initializer_list<double> vals) {
  Eigen::VectorXd v(g.size());
  int i = 0;
  for (double x : vals) v(i++) = x;
  return VertexFunction(g, std::move(v));
}

}  // namespace

TEST_CASE("vertex function binding") {
  WeightedGraph g = generate_path(3);
  WeightedGraph h = generate_path(3);
  VertexFunction u = VertexFunction::zero(g);
  CHECK_THROWS_AS(laplacian(h, u), GraphMismatch);
  CHECK_THROWS_AS(VertexFunction(g, Eigen::VectorXd::Zero(2)), GraphMismatch);
  Eigen::VectorXd bad(3);
  bad << 0.0, std::numeric_limits<double>::quiet_NaN(), 0.0;
  CHECK_THROWS_AS(VertexFunction(g, bad), BadParams);
}

TEST_CASE("laplacian and biharmonic on paths") {
  WeightedGraph p2 = generate_path(2);
  VertexFunction u2 = vf(p2, {1.0, 0.0});
  VertexFunction lu2 = laplacian(p2, u2);
  CHECK(lu2(0) == doctest::Approx(-1.0));
  CHECK(lu2(1) == doctest::Approx(1.0));

  WeightedGraph p3 = generate_path(3);
  VertexFunction u3 = vf(p3, {0.0, 1.0, 0.0});
  VertexFunction lu3 = laplacian(p3, u3);
  CHECK(lu3(0) == doctest::Approx(1.0));
  CHECK(lu3(1) == doctest::Approx(-2.0));
  CHECK(lu3(2) == doctest::Approx(1.0));
  VertexFunction bu3 = biharmonic(p3, u3);
  CHECK(bu3(0) == doctest::Approx(-3.0));
  CHECK(bu3(1) == doctest::Approx(6.0));
  CHECK(bu3(2) == doctest::Approx(-3.0));

  std::mt19937_64 rng(1);
  WeightedGraph g = random_graph(rng);
  CHECK(laplacian(g, VertexFunction::constant(g, 3.7)).values().cwiseAbs().maxCoeff() ==
        doctest::Approx(0.0));
}

TEST_CASE("gamma field and integrals") {
  WeightedGraph p2 = generate_path(2);
  VertexFunction u = vf(p2, {1.0, 0.0});
  VertexFunction gm = gamma_field(p2, u, u);
  CHECK(gm(0) == doctest::Approx(0.5));
  CHECK(gm(1) == doctest::Approx(0.5));

  GraphProfile prof;
  WeightedGraph pm = build_graph({"a", "b"}, {{"a", "b", 1.0}}, {2.0, 3.0});
  CHECK(integral(pm, vf(pm, {1.0, -1.0})) == doctest::Approx(-1.0));
  CHECK(integral(pm, VertexFunction::zero(pm)) == 0.0);

  WeightedGraph p3 = generate_path(3);
  VertexFunction u3 = vf(p3, {0.0, 1.0, 0.0});
  CHECK(dirichlet_energy(p3, u3) == doctest::Approx(2.0));
  CHECK(dirichlet_energy(p3, VertexFunction::constant(p3, 5.0)) == doctest::Approx(0.0));

  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    WeightedGraph g = random_graph(rng);
    VertexFunction a = random_function(g, rng), b = random_function(g, rng);
    // edge-wise and vertex-wise evaluations agree
    CHECK(gamma_integral(g, a, b) ==
          doctest::Approx(integral(g, gamma_field(g, a, b))).epsilon(1e-12));
    // symmetry and bilinearity spot checks
    CHECK(gamma_integral(g, a, b) == doctest::Approx(gamma_integral(g, b, a)));
    CHECK(dirichlet_energy(g, a) >= 0.0);
    for (int x = 0; x < g.size(); ++x) CHECK(gamma_field(g, a, a)(x) >= 0.0);
  }
}

TEST_CASE("integration-by-parts identities on random graphs") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 100; ++trial) {
    WeightedGraph g = random_graph(rng);
    VertexFunction u = random_function(g, rng, 3.0);
    VertexFunction phi = random_function(g, rng, 3.0);

    // sum rule: the laplacian integrates to zero
    CHECK(std::abs(integral(g, laplacian(g, u))) <= 1e-10 * (1.0 + u.values().norm()));

    // Green: int (-Delta u) u dmu = int |grad u|^2 dmu
    VertexFunction lu = laplacian(g, u);
    double lhs = 0.0;
    for (int x = 0; x < g.size(); ++x) lhs += -lu(x) * u(x) * g.mu(x);
    double rhs = dirichlet_energy(g, u);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * (1.0 + std::abs(lhs) + std::abs(rhs)));

    // int (Delta^2 u) phi dmu = int (Delta u)(Delta phi) dmu
    VertexFunction bu = biharmonic(g, u);
    VertexFunction lphi = laplacian(g, phi);
    double l2 = 0.0, r2 = 0.0;
    for (int x = 0; x < g.size(); ++x) {
      l2 += bu(x) * phi(x) * g.mu(x);
      r2 += lu(x) * lphi(x) * g.mu(x);
    }
    CHECK(std::abs(l2 - r2) <= 1e-10 * (1.0 + std::abs(l2) + std::abs(r2)));
  }
}

TEST_CASE("lr norms") {
  WeightedGraph p2 = generate_path(2);
  VertexFunction u = vf(p2, {3.0, -4.0});
  CHECK(norm_lr(p2, u, 2.0) == doctest::Approx(5.0));
  CHECK(norm_lr(p2, u, kInfExponent) == doctest::Approx(4.0));
  CHECK(norm_lr(p2, VertexFunction::zero(p2), 3.0) == 0.0);
  CHECK_THROWS_AS(norm_lr(p2, u, 1.5), BadExponent);
}

TEST_CASE("E inner product and norm") {
  WeightedGraph p2 = generate_path(2);
  VertexFunction u = vf(p2, {1.0, 0.0});
  VertexFunction pot = VertexFunction::constant(p2, 1.0);
  CHECK(e_inner(p2, 1.0, pot, u, u) == doctest::Approx(4.0));
  CHECK(e_norm(p2, 1.0, pot, u) == doctest::Approx(2.0));
  CHECK_THROWS_AS(e_inner(p2, 0.0, pot, u, u), BadParams);
  CHECK_THROWS_AS(e_inner(p2, 1.0, vf(p2, {1.0, 0.0}), u, u), NonPositivePotential);

  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    WeightedGraph g = random_graph(rng);
    VertexFunction pg = random_potential(g, rng);
    VertexFunction a = random_function(g, rng), b = random_function(g, rng),
                   c = random_function(g, rng);
    double alpha = 1.7;
    CHECK(e_inner(g, 2.0, pg, a, b) == doctest::Approx(e_inner(g, 2.0, pg, b, a)));
    VertexFunction combo(g, b.values() + alpha * c.values());
    CHECK(e_inner(g, 2.0, pg, a, combo) ==
          doctest::Approx(e_inner(g, 2.0, pg, a, b) + alpha * e_inner(g, 2.0, pg, a, c))
              .epsilon(1e-10));
    CHECK(e_inner(g, 2.0, pg, a, a) > 0.0);
  }
}

TEST_CASE("assembled operators match the pointwise definitions") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    WeightedGraph g = random_graph(rng);
    AssembledOperators ops = assemble(g);
    VertexFunction u = random_function(g, rng, 2.0);
    Eigen::VectorXd lu = ops.laplacian_matrix * u.values();
    Eigen::VectorXd bu = ops.biharmonic_matrix * u.values();
    VertexFunction lu_ref = laplacian(g, u);
    VertexFunction bu_ref = biharmonic(g, u);
    for (int x = 0; x < g.size(); ++x) {
      CHECK(std::abs(lu(x) - lu_ref(x)) <= 1e-12 * (1.0 + std::abs(lu_ref(x))));
      CHECK(std::abs(bu(x) - bu_ref(x)) <= 1e-12 * (1.0 + std::abs(bu_ref(x))));
    }
    double dir = u.values().transpose() * ops.dirichlet_matrix * u.values();
    CHECK(dir == doctest::Approx(dirichlet_energy(g, u)).epsilon(1e-12));

    VertexFunction pot = random_potential(g, rng);
    Eigen::MatrixXd E = e_matrix(g, 1.3, pot, ops);
    VertexFunction w = random_function(g, rng, 2.0);
    double quad = u.values().transpose() * E * w.values();
    CHECK(quad == doctest::Approx(e_inner(g, 1.3, pot, u, w)).epsilon(1e-10));
  }
}

TEST_CASE("sharp L2 embedding constant") {
  WeightedGraph one = build_graph({"o"}, {}, {1.0});
  VertexFunction pot1 = VertexFunction::constant(one, 1.0);
  CHECK(sharp_embedding_2(one, 1.0, pot1) == doctest::Approx(1.0));
  // V = 4 on a single vertex: E = 4, M = 1, constant 1/2
  CHECK(sharp_embedding_2(one, 1.0, VertexFunction::constant(one, 4.0)) ==
        doctest::Approx(0.5));

  // raising the potential can only shrink the constant
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 10; ++trial) {
    WeightedGraph g = random_graph(rng, 12);
    VertexFunction pot = random_potential(g, rng);
    VertexFunction bigger(g, pot.values() * 2.0);
    CHECK(sharp_embedding_2(g, 1.0, bigger) <= sharp_embedding_2(g, 1.0, pot) + 1e-12);
    // the sharp constant is attained by some eigenvector, so it never
    // exceeds the closed-form bound
    double gamma2 = embedding_gamma(g.mu_min(), pot.values().minCoeff(), 2.0);
    CHECK(sharp_embedding_2(g, 1.0, pot) <= gamma2 * (1.0 + 1e-10));
  }
}
