#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include "graphpass/errors.hpp"
#include "graphpass/graph.hpp"

namespace graphpass {

/// One real value per vertex, aligned to the graph's canonical ordering.
class VertexFunction {
 public:
  VertexFunction(const WeightedGraph& g, Eigen::VectorXd values)
      : values_(std::move(values)), tag_(g.tag()) {
    if (values_.size() != g.size())
      throw GraphMismatch("value count does not match vertex count");
    if (!values_.allFinite()) throw BadParams("vertex function has non-finite values");
  }

  static VertexFunction zero(const WeightedGraph& g) {
    return VertexFunction(g, Eigen::VectorXd::Zero(g.size()));
  }
  static VertexFunction constant(const WeightedGraph& g, double c) {
    return VertexFunction(g, Eigen::VectorXd::Constant(g.size(), c));
  }

  const Eigen::VectorXd& values() const { return values_; }
  Eigen::VectorXd& values() { return values_; }
  double operator()(int i) const { return values_(i); }
  std::uint64_t graph_tag() const { return tag_; }
  int size() const { return static_cast<int>(values_.size()); }

 private:
  Eigen::VectorXd values_;
  std::uint64_t tag_;
};

inline void require_bound(const WeightedGraph& g, const VertexFunction& u) {
  if (u.graph_tag() != g.tag())
    throw GraphMismatch("vertex function is bound to a different graph");
}

/// (Delta u)(x) = (1/mu(x)) sum_{y~x} w_xy (u(y) - u(x))
inline VertexFunction laplacian(const WeightedGraph& g, const VertexFunction& u) {
  require_bound(g, u);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (int x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(x)) acc += nb.weight * (u(nb.index) - u(x));
    out(x) = acc / g.mu(x);
  }
  return VertexFunction(g, std::move(out));
}

inline VertexFunction biharmonic(const WeightedGraph& g, const VertexFunction& u) {
  return laplacian(g, laplacian(g, u));
}

/// Gamma(u,v)(x) = (1/(2 mu(x))) sum_{y~x} w_xy (u(y)-u(x))(v(y)-v(x))
inline VertexFunction gamma_field(const WeightedGraph& g, const VertexFunction& u,
                                  const VertexFunction& v) {
  require_bound(g, u);
  require_bound(g, v);
  Eigen::VectorXd out = Eigen::VectorXd::Zero(g.size());
  for (int x = 0; x < g.size(); ++x) {
    double acc = 0.0;
    for (const auto& nb : g.neighbors(x))
      acc += nb.weight * (u(nb.index) - u(x)) * (v(nb.index) - v(x));
    out(x) = acc / (2.0 * g.mu(x));
  }
  return VertexFunction(g, std::move(out));
}

inline double integral(const WeightedGraph& g, const VertexFunction& f) {
  require_bound(g, f);
  double acc = 0.0;
  for (int x = 0; x < g.size(); ++x) acc += f(x) * g.mu(x);
  return acc;
}

/// int_V Gamma(u,v) dmu, summed edge-wise (the 1/(2 mu) factors cancel).
inline double gamma_integral(const WeightedGraph& g, const VertexFunction& u,
                             const VertexFunction& v) {
  require_bound(g, u);
  require_bound(g, v);
  double acc = 0.0;
  for (const auto& e : g.edges())
    acc += e.weight * (u(e.b) - u(e.a)) * (v(e.b) - v(e.a));
  return acc;
}

/// int_V |grad u|^2 dmu
inline double dirichlet_energy(const WeightedGraph& g, const VertexFunction& u) {
  return gamma_integral(g, u, u);
}

constexpr double kInfExponent = std::numeric_limits<double>::infinity();

/// ||u||_r for r in [2, inf]; r = inf is the sup norm.
inline double norm_lr(const WeightedGraph& g, const VertexFunction& u, double r) {
  require_bound(g, u);
  if (r == kInfExponent) return u.values().cwiseAbs().maxCoeff();
  if (!(r >= 2.0)) throw BadExponent("norm exponent must satisfy r >= 2");
  double acc = 0.0;
  for (int x = 0; x < g.size(); ++x) acc += std::pow(std::abs(u(x)), r) * g.mu(x);
  return std::pow(acc, 1.0 / r);
}

inline void require_positive_potential(const WeightedGraph& g, const VertexFunction& pot) {
  require_bound(g, pot);
  if (pot.values().minCoeff() <= 0.0)
    throw NonPositivePotential("potential must be strictly positive");
}

/// (u,w)_E = int (Du Dw + a Gamma(u,w) + V u w) dmu
inline double e_inner(const WeightedGraph& g, double a, const VertexFunction& pot,
                      const VertexFunction& u, const VertexFunction& w) {
  if (!(a > 0.0)) throw BadParams("coefficient a must be positive");
  require_positive_potential(g, pot);
  require_bound(g, u);
  require_bound(g, w);
  VertexFunction lu = laplacian(g, u);
  VertexFunction lw = laplacian(g, w);
  double acc = 0.0;
  for (int x = 0; x < g.size(); ++x)
    acc += (lu(x) * lw(x) + pot(x) * u(x) * w(x)) * g.mu(x);
  return acc + a * gamma_integral(g, u, w);
}

inline double e_norm(const WeightedGraph& g, double a, const VertexFunction& pot,
                     const VertexFunction& u) {
  return std::sqrt(std::max(0.0, e_inner(g, a, pot, u, u)));
}

// ---------------------------------------------------------------------------
// Assembled sparse operators.

struct AssembledOperators {
  Eigen::SparseMatrix<double> laplacian_matrix;   // u -> Delta u
  Eigen::SparseMatrix<double> biharmonic_matrix;  // u -> Delta^2 u
  Eigen::SparseMatrix<double> dirichlet_matrix;   // u^T D u = int |grad u|^2 dmu
  Eigen::VectorXd mass_diagonal;                  // mu(x)
};

inline AssembledOperators assemble(const WeightedGraph& g) {
  const int n = g.size();
  std::vector<Eigen::Triplet<double>> lap, dir;
  for (int x = 0; x < n; ++x) {
    double wsum = 0.0;
    for (const auto& nb : g.neighbors(x)) {
      lap.emplace_back(x, nb.index, nb.weight / g.mu(x));
      wsum += nb.weight;
    }
    lap.emplace_back(x, x, -wsum / g.mu(x));
  }
  for (const auto& e : g.edges()) {
    dir.emplace_back(e.a, e.a, e.weight);
    dir.emplace_back(e.b, e.b, e.weight);
    dir.emplace_back(e.a, e.b, -e.weight);
    dir.emplace_back(e.b, e.a, -e.weight);
  }
  AssembledOperators ops;
  ops.laplacian_matrix.resize(n, n);
  ops.laplacian_matrix.setFromTriplets(lap.begin(), lap.end());
  ops.biharmonic_matrix = ops.laplacian_matrix * ops.laplacian_matrix;
  ops.dirichlet_matrix.resize(n, n);
  ops.dirichlet_matrix.setFromTriplets(dir.begin(), dir.end());
  ops.mass_diagonal = Eigen::Map<const Eigen::VectorXd>(g.measure().data(), n);
  return ops;
}

/// Dense symmetric matrix of the E-inner product: u^T E w = (u,w)_E.
inline Eigen::MatrixXd e_matrix(const WeightedGraph& g, double a, const VertexFunction& pot,
                                const AssembledOperators& ops) {
  require_positive_potential(g, pot);
  Eigen::MatrixXd L = Eigen::MatrixXd(ops.laplacian_matrix);
  Eigen::MatrixXd E = L.transpose() * ops.mass_diagonal.asDiagonal() * L;
  E += a * Eigen::MatrixXd(ops.dirichlet_matrix);
  E += (ops.mass_diagonal.array() * pot.values().array()).matrix().asDiagonal();
  return 0.5 * (E + E.transpose());  // symmetrize round-off
}

/// Sharp constant sup ||u||_2 / ||u||_E, via the generalized eigenproblem
/// E z = lambda M z: the constant is 1/sqrt(lambda_min).
inline double sharp_embedding_2(const WeightedGraph& g, double a, const VertexFunction& pot) {
  AssembledOperators ops = assemble(g);
  Eigen::MatrixXd E = e_matrix(g, a, pot, ops);
  Eigen::MatrixXd M = Eigen::MatrixXd(ops.mass_diagonal.asDiagonal());
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(E, M);
  if (es.info() != Eigen::Success) throw EigenSolverFailure("generalized eigensolver failed");
  double lam = es.eigenvalues().minCoeff();
  if (!(lam > 0.0)) throw EigenSolverFailure("E-matrix is not positive definite");
  return 1.0 / std::sqrt(lam);
}

}  // namespace graphpass
