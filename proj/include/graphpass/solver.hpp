#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "graphpass/energy.hpp"

namespace graphpass {

struct SolverConfig {
  double tol_residual = 1e-9;  // sup-norm acceptance threshold
  int max_iters = 100;
  double deflation_power = 2.0;
  double deflation_shift = 1.0;
  double line_search_factor = 0.5;
  int line_search_max = 40;
  int mp_path_points = 21;
  int mp_max_deformations = 500;
  double mp_descent_step = 0.5;
  std::uint64_t seed = 0;
  bool use_mountain_pass = true;  // enumerate stages
  bool use_newton = true;
  int shells = 6;             // enumerate: E-norm shells rho* 2^j, j = 0..shells-1
  int starts_per_shell = 24;  // enumerate: random starts per shell
  double dedup_distance = 1e-6;
  double trivial_norm = 1e-8;
};

struct SolutionRecord {
  StatePair state;
  double energy = 0.0;
  double residual_sup = 0.0;
  std::string method;
  std::vector<int> deflated_against;
  int iterations = 0;
  bool is_trivial = false;
  int id = -1;
};

namespace detail {

/// Action of the E_i Gram matrix in the canonical basis:
/// (E u)(x) = mu(x) (Delta^2 u - a Delta u + V u)(x).
inline VertexFunction e_apply(const WeightedGraph& g, double a, const VertexFunction& pot,
                              const VertexFunction& u) {
  VertexFunction lu = laplacian(g, u);
  VertexFunction bu = laplacian(g, lu);
  Eigen::VectorXd out(g.size());
  for (int x = 0; x < g.size(); ++x)
    out(x) = g.mu(x) * (bu(x) - a * lu(x) + pot(x) * u(x));
  return VertexFunction(g, std::move(out));
}

inline Eigen::VectorXd stack(const StatePair& s) {
  Eigen::VectorXd z(s.u.size() + s.v.size());
  z << s.u.values(), s.v.values();
  return z;
}

inline StatePair unstack(const WeightedGraph& g, const Eigen::VectorXd& z) {
  int n = g.size();
  return StatePair(VertexFunction(g, z.head(n)), VertexFunction(g, z.tail(n)));
}

/// Product of deflation factors 1/||state - w||^p + shift, and the
/// logarithmic gradient sum(grad m_w / m_w) in stacked coordinates.
struct Deflation {
  double value = 1.0;
  Eigen::VectorXd log_gradient;
};

inline Deflation deflation_at(const WeightedGraph& g, const Model& m, const SolverConfig& cfg,
                              const StatePair& state, const std::vector<SolutionRecord>& known) {
  Deflation d;
  d.log_gradient = Eigen::VectorXd::Zero(2 * g.size());
  for (const auto& rec : known) {
    StatePair diff = axpy(g, state, -1.0, rec.state);
    double nd = pair_norm(g, m, diff);
    if (nd == 0.0) {
      d.value = std::numeric_limits<double>::infinity();
      continue;
    }
    double mw = std::pow(nd, -cfg.deflation_power) + cfg.deflation_shift;
    d.value *= mw;
    StatePair ed(e_apply(g, m.a1, m.V1, diff.u), e_apply(g, m.a2, m.V2, diff.v));
    double coeff = -cfg.deflation_power * std::pow(nd, -cfg.deflation_power - 2.0) / mw;
    d.log_gradient += coeff * stack(ed);
  }
  return d;
}

/// Solve J delta = rhs with the assembled dense Jacobian (desk-scale graphs)
/// or matrix-free BiCGStab with diagonal preconditioning for larger ones.
inline Eigen::VectorXd solve_linear(const WeightedGraph& g, const Model& m,
                                    const StatePair& state, const Eigen::VectorXd& rhs) {
  const int n = g.size();
  const int N = 2 * n;
  auto apply = [&](const Eigen::VectorXd& z) {
    StatePair jd = jacobian_apply(g, m, state, unstack(g, z));
    return stack(jd);
  };

  if (N <= 2000) {
    Eigen::MatrixXd J(N, N);
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(N);
    for (int j = 0; j < N; ++j) {
      basis(j) = 1.0;
      J.col(j) = apply(basis);
      basis(j) = 0.0;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(J);
    if (!lu.isInvertible()) throw SingularJacobian("assembled Jacobian is singular");
    return lu.solve(rhs);
  }

  // matrix-free BiCGStab, Jacobi preconditioner from the diagonal of J
  Eigen::VectorXd diag(N);
  {
    Eigen::VectorXd basis = Eigen::VectorXd::Zero(N);
    for (int j = 0; j < N; ++j) {
      basis(j) = 1.0;
      diag(j) = apply(basis)(j);
      basis(j) = 0.0;
      if (std::abs(diag(j)) < 1e-14) diag(j) = 1.0;
    }
  }
  auto precond = [&](const Eigen::VectorXd& z) { return (z.array() / diag.array()).matrix(); };

  Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
  Eigen::VectorXd r = rhs - apply(x);
  Eigen::VectorXd r0 = r;
  double rho = 1.0, alpha = 1.0, omega = 1.0;
  Eigen::VectorXd v = Eigen::VectorXd::Zero(N), p = Eigen::VectorXd::Zero(N);
  double tol = 1e-12 * std::max(1.0, rhs.norm());
  for (int it = 0; it < 4 * N; ++it) {
    double rho_new = r0.dot(r);
    if (std::abs(rho_new) < 1e-300) {  // restart on stagnation
      r0 = r;
      rho_new = r.squaredNorm();
      p.setZero();
      v.setZero();
      omega = 1.0;
    }
    double beta = (rho_new / rho) * (alpha / omega);
    rho = rho_new;
    p = r + beta * (p - omega * v);
    Eigen::VectorXd ph = precond(p);
    v = apply(ph);
    alpha = rho / r0.dot(v);
    Eigen::VectorXd sres = r - alpha * v;
    if (sres.norm() < tol) { x += alpha * ph; return x; }
    Eigen::VectorXd sh = precond(sres);
    Eigen::VectorXd t = apply(sh);
    omega = t.dot(sres) / t.squaredNorm();
    x += alpha * ph + omega * sh;
    r = sres - omega * t;
    if (r.norm() < tol) return x;
  }
  throw SingularJacobian("iterative linear solver did not converge");
}

}  // namespace detail

/// Damped Newton on the deflated residual. The Newton direction for the
/// deflated system is the undeflated direction rescaled by
/// 1 / (1 - grad(log M) . delta), so only one linear solve is needed.
/// Acceptance is on the sup-norm of the UNDEFLATED residual.
inline SolutionRecord newton_solve(const WeightedGraph& g, const Model& m,
                                   const SolverConfig& cfg, const StatePair& start,
                                   const std::vector<SolutionRecord>& known = {}) {
  StatePair state = start;
  auto deflated_merit = [&](const StatePair& s) {
    if (!s.u.values().allFinite() || !s.v.values().allFinite())
      return std::numeric_limits<double>::infinity();
    StatePair r = residual(g, m, s);
    return detail::deflation_at(g, m, cfg, s, known).value * detail::stack(r).norm();
  };

  for (int iter = 0; iter <= cfg.max_iters; ++iter) {
    StatePair r = residual(g, m, state);
    double rs = std::max(r.u.values().cwiseAbs().maxCoeff(),
                         r.v.values().cwiseAbs().maxCoeff());
    if (rs <= cfg.tol_residual) {
      SolutionRecord rec{state, phi(g, m, state).total, rs, "newton_deflated", {}, iter, false};
      for (const auto& k : known) rec.deflated_against.push_back(k.id);
      rec.is_trivial = pair_norm(g, m, state) < cfg.trivial_norm;
      return rec;
    }

    Eigen::VectorXd delta = detail::solve_linear(g, m, state, -detail::stack(r));
    if (!known.empty()) {
      detail::Deflation d = detail::deflation_at(g, m, cfg, state, known);
      double den = 1.0 - d.log_gradient.dot(delta);
      if (std::abs(den) < 1e-12) throw NoConvergence("deflation scaling degenerate");
      delta /= den;
    }

    double merit0 = deflated_merit(state);
    double t = 1.0;
    bool stepped = false;
    for (int ls = 0; ls < cfg.line_search_max; ++ls) {
      StatePair trial = detail::unstack(g, detail::stack(state) + t * delta);
      if (deflated_merit(trial) < merit0) {
        state = trial;
        stepped = true;
        break;
      }
      t *= cfg.line_search_factor;
    }
    if (!stepped) throw NoConvergence("line search failed");
  }
  throw NoConvergence("max iterations exceeded");
}

/// Riesz lift of Phi' in the E-inner product: solve E h = G where G is the
/// Euclidean gradient (mass-scaled strong residual).
inline StatePair pairing_gradient_lift(const WeightedGraph& g, const Model& m,
                                       const StatePair& state) {
  AssembledOperators ops = assemble(g);
  Eigen::MatrixXd E1 = e_matrix(g, m.a1, m.V1, ops);
  Eigen::MatrixXd E2 = e_matrix(g, m.a2, m.V2, ops);
  StatePair r = residual(g, m, state);
  Eigen::VectorXd g1 = (r.u.values().array() * ops.mass_diagonal.array()).matrix();
  Eigen::VectorXd g2 = (r.v.values().array() * ops.mass_diagonal.array()).matrix();
  Eigen::LLT<Eigen::MatrixXd> llt1(E1), llt2(E2);
  if (llt1.info() != Eigen::Success || llt2.info() != Eigen::Success)
    throw EigenSolverFailure("E Gram matrix not positive definite");
  return StatePair(VertexFunction(g, llt1.solve(g1)), VertexFunction(g, llt2.solve(g2)));
}

/// Numerical mountain pass: deform a discretized path from 0 to a far point
/// with Phi < 0 by pushing the max-energy node along the negative
/// E-gradient, with Newton polish once the saddle estimate settles.
inline SolutionRecord mountain_pass(const WeightedGraph& g, const Model& m,
                                    const SolverConfig& cfg, const StatePair& far_point_in) {
  if (cfg.mp_path_points < 3) throw BadParams("mountain pass needs at least 3 path points");
  StatePair far = far_point_in;
  int doublings = 0;
  while (phi(g, m, far).total >= 0.0) {
    if (++doublings > 60) throw BadFarPoint("could not reach Phi < 0 by doubling");
    far = axpy(g, StatePair::zero(g), 2.0, far);
  }

  const int np = cfg.mp_path_points;
  std::vector<StatePair> path;
  path.reserve(static_cast<std::size_t>(np));
  for (int i = 0; i < np; ++i)
    path.push_back(axpy(g, StatePair::zero(g), static_cast<double>(i) / (np - 1), far));

  double prev_max = std::numeric_limits<double>::infinity();
  int stalled = 0;
  bool project = true;
  for (int it = 0; it < cfg.mp_max_deformations; ++it) {
    int peak = 1;
    double peak_phi = -std::numeric_limits<double>::infinity();
    for (int i = 1; i + 1 < np; ++i) {
      double p = phi(g, m, path[static_cast<std::size_t>(i)]).total;
      if (p > peak_phi) { peak_phi = p; peak = i; }
    }
    StatePair& node = path[static_cast<std::size_t>(peak)];
    double rs = residual_sup(g, m, node);
    if (rs <= cfg.tol_residual && pair_norm(g, m, node) >= cfg.trivial_norm) {
      SolutionRecord rec{node, peak_phi, rs, "mountain_pass", {}, it, false};
      return rec;
    }

    if (peak_phi > prev_max - 1e-12 * (1.0 + std::abs(prev_max))) ++stalled; else stalled = 0;
    prev_max = peak_phi;
    if (stalled >= 3) {
      // deformation has flattened out: polish the saddle estimate with Newton
      try {
        SolutionRecord rec = newton_solve(g, m, cfg, node);
        if (!rec.is_trivial && rec.energy > 0.0) {
          rec.method = "mountain_pass";
          rec.iterations += it;
          return rec;
        }
      } catch (const Error&) {
        // keep deforming
      }
      stalled = 0;
      // the polished point was unusable: allow one unconstrained step so the
      // path keeps evolving instead of stalling at the same node forever
      project = false;
    }

    StatePair grad = pairing_gradient_lift(g, m, node);
    if (project) {
      // descend only orthogonally to the path tangent; a tangential pull
      // would drag the peak node along the path and break the barrier
      StatePair tangent = axpy(g, path[static_cast<std::size_t>(peak + 1)], -1.0,
                               path[static_cast<std::size_t>(peak - 1)]);
      double tn2 = pair_norm_sq(g, m, tangent);
      if (tn2 > 0.0) {
        double proj = (e_inner(g, m.a1, m.V1, grad.u, tangent.u) +
                       e_inner(g, m.a2, m.V2, grad.v, tangent.v)) / tn2;
        grad = axpy(g, grad, -proj, tangent);
      }
    }
    project = true;
    double gn = pair_norm(g, m, grad);
    if (gn < 1e-15) continue;
    double step = cfg.mp_descent_step;
    double before = peak_phi;
    for (int ls = 0; ls < cfg.line_search_max; ++ls) {
      StatePair trial = axpy(g, node, -step, grad);
      if (phi(g, m, trial).total < before) {
        node = trial;
        break;
      }
      step *= cfg.line_search_factor;
    }
  }
  throw NoConvergence("mountain pass did not converge");
}

/// Mirror a record through the origin; valid when F passed the evenness audit.
inline SolutionRecord antipode(const WeightedGraph& g, const Model& m, const SolverConfig& cfg,
                               const SolutionRecord& rec) {
  SolutionRecord anti = rec;
  anti.state = -rec.state;
  anti.residual_sup = residual_sup(g, m, anti.state);
  if (anti.residual_sup > cfg.tol_residual)
    throw SymmetryViolated("antipode residual exceeds tolerance");
  anti.energy = phi(g, m, anti.state).total;
  if (std::abs(anti.energy - rec.energy) > 1e-10 * (1.0 + std::abs(rec.energy)))
    throw SymmetryViolated("antipode energy differs");
  anti.method = rec.method + "+antipode";
  anti.id = -1;
  return anti;
}

struct EnumerateResult {
  std::vector<SolutionRecord> selected;      // up to K, strictly increasing energies
  std::vector<SolutionRecord> all_accepted;  // every distinct nontrivial root found
  std::vector<double> energy_levels;         // deduplicated energy sequence
  bool found_fewer = false;
};

namespace detail {

inline StatePair random_state_on_shell(const WeightedGraph& g, const Model& m,
                                       std::mt19937_64& rng, double radius) {
  std::normal_distribution<double> gauss;
  Eigen::VectorXd zu(g.size()), zv(g.size());
  for (int x = 0; x < g.size(); ++x) zu(x) = gauss(rng);
  for (int x = 0; x < g.size(); ++x) zv(x) = gauss(rng);
  StatePair s(VertexFunction(g, std::move(zu)), VertexFunction(g, std::move(zv)));
  double nrm = pair_norm(g, m, s);
  return axpy(g, StatePair::zero(g), radius / std::max(nrm, 1e-300), s);
}

inline bool is_duplicate(const WeightedGraph& g, const Model& m, const SolverConfig& cfg,
                         const std::vector<SolutionRecord>& set, const StatePair& s) {
  for (const auto& rec : set)
    if (pair_dist(g, m, rec.state, s) <= cfg.dedup_distance) return true;
  return false;
}

}  // namespace detail

/// Mountain pass once, then deflated Newton from randomized starts on
/// growing E-norm shells; antipodal completion when F is even. Returns up
/// to K records with strictly increasing energies (symmetry copies whose
/// energies tie within 1e-8 collapse to one representative per level).
inline EnumerateResult enumerate_solutions(const WeightedGraph& g, const Model& m,
                                           const SolverConfig& cfg, int K,
                                           bool even_audited = true) {
  if (K < 1) throw BadParams("enumerate: K must be >= 1");
  EnumerateResult result;
  std::mt19937_64 rng(cfg.seed);
  auto& accepted = result.all_accepted;
  int next_id = 0;

  auto try_accept = [&](SolutionRecord rec) {
    if (rec.is_trivial || pair_norm(g, m, rec.state) < cfg.trivial_norm) return;
    if (detail::is_duplicate(g, m, cfg, accepted, rec.state)) return;
    rec.id = next_id++;
    rec.energy = phi(g, m, rec.state).total;  // recompute at acceptance
    accepted.push_back(rec);
    if (even_audited && m.nonlinearity.claims_even) {
      SolutionRecord anti = antipode(g, m, cfg, accepted.back());
      if (!detail::is_duplicate(g, m, cfg, accepted, anti.state)) {
        anti.id = next_id++;
        accepted.push_back(std::move(anti));
      }
    }
  };

  double rho0 = m.nonlinearity.rho_star.value_or(1.0);
  if (cfg.use_mountain_pass) {
    try {
      StatePair far = detail::random_state_on_shell(g, m, rng, 4.0 * rho0);
      try_accept(mountain_pass(g, m, cfg, far));
    } catch (const Error&) {
      // fall through to the Newton rounds
    }
  }

  // deflate against the nearest accepted roots only: a deflation operator
  // built from many far-away roots degrades Newton's basins everywhere,
  // and deduplication at acceptance keeps the omission harmless
  auto local_known = [&](const StatePair& start) {
    const std::size_t cap = 8;
    if (accepted.size() <= cap) return accepted;
    std::vector<std::pair<double, std::size_t>> by_dist;
    by_dist.reserve(accepted.size());
    for (std::size_t i = 0; i < accepted.size(); ++i)
      by_dist.emplace_back(pair_dist(g, m, accepted[i].state, start), i);
    std::partial_sort(by_dist.begin(), by_dist.begin() + cap, by_dist.end());
    std::vector<SolutionRecord> out;
    out.reserve(cap);
    for (std::size_t i = 0; i < cap; ++i) out.push_back(accepted[by_dist[i].second]);
    return out;
  };

  // shells grow geometrically from rho*; when rho* is tiny, extend the
  // ladder so the outermost shell still reaches O(10) E-norms
  int shells = cfg.shells;
  if (cfg.use_newton && rho0 > 0.0)
    shells = std::clamp(static_cast<int>(std::ceil(std::log2(32.0 / rho0))), cfg.shells, 24);
  for (int j = 0; cfg.use_newton && j < shells; ++j) {
    double radius = rho0 * std::pow(2.0, j);
    for (int s = 0; s < cfg.starts_per_shell; ++s) {
      StatePair start = detail::random_state_on_shell(g, m, rng, radius);
      try {
        try_accept(newton_solve(g, m, cfg, start, local_known(start)));
      } catch (const Error&) {
        continue;
      }
    }
  }

  std::stable_sort(accepted.begin(), accepted.end(),
                   [](const SolutionRecord& a, const SolutionRecord& b) {
                     return a.energy < b.energy;
                   });
  const double tie = 1e-8;
  for (const auto& rec : accepted) {
    if (!result.energy_levels.empty() &&
        std::abs(rec.energy - result.energy_levels.back()) <= tie)
      continue;
    result.energy_levels.push_back(rec.energy);
    if (static_cast<int>(result.selected.size()) < K) result.selected.push_back(rec);
  }
  result.found_fewer = static_cast<int>(result.selected.size()) < K;
  return result;
}

}  // namespace graphpass
