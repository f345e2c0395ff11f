#pragma once

#include <cmath>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "graphpass/calculus.hpp"
#include "graphpass/graph.hpp"
#include "graphpass/model.hpp"

namespace graphpass {

enum class Verdict { passes_on_samples, fails_with_witness, not_checkable_on_finite_graph };

inline const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::passes_on_samples: return "passes_on_samples";
    case Verdict::fails_with_witness: return "fails_with_witness";
    default: return "not_checkable_on_finite_graph";
  }
}

struct Witness {
  int x;
  double s, t;
  std::string detail;
};

struct HypothesisResult {
  Verdict verdict = Verdict::passes_on_samples;
  std::optional<Witness> witness;
  std::string note;
};

struct SamplingPlan {
  std::uint64_t seed = 0;
  int samples = 1000;
  double range = 5.0;  // (s,t) drawn uniformly from [-range, range]^2
  std::vector<double> trend_radii = {10.0, 100.0, 1000.0};
};

struct AuditReport {
  std::map<std::string, HypothesisResult> hypotheses;
  double gamma_2_1 = 0.0, gamma_2_2 = 0.0;
  double gamma_inf_1 = 0.0, gamma_inf_2 = 0.0;
  double alpha_star = 0.0;
  int theta = 0;
  bool all_checked_pass = true;

  bool even_ok() const {
    auto it = hypotheses.find("F6");
    return it != hypotheses.end() && it->second.verdict == Verdict::passes_on_samples;
  }
};

namespace detail {

/// max of a(|(s,t)|) over the diamond |s|+|t| <= radius: 201x201 grid of the
/// bounding box plus one local refinement pass around the best cell.
inline double diamond_max(const std::function<double(double)>& a, double radius) {
  auto value = [&](double s, double t) {
    return std::abs(s) + std::abs(t) <= radius ? a(std::hypot(s, t))
                                               : -std::numeric_limits<double>::infinity();
  };
  const int n = 201;
  double best = -std::numeric_limits<double>::infinity();
  double bs = 0.0, bt = 0.0;
  double h = 2.0 * radius / (n - 1);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = -radius + i * h, t = -radius + j * h;
      double v = value(s, t);
      if (v > best) { best = v; bs = s; bt = t; }
    }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = bs + (i - n / 2) * h / 100.0, t = bt + (j - n / 2) * h / 100.0;
      double v = value(s, t);
      if (v > best) best = v;
    }
  return best;
}

}  // namespace detail

/// Checks the structural hypotheses at sampled points and computes the
/// constants they define. Limit-type hypotheses report trend evidence only.
inline AuditReport audit(const WeightedGraph& g, const Model& m, const SamplingPlan& plan) {
  AuditReport rep;
  const auto& nl = m.nonlinearity;
  rep.theta = m.theta();
  rep.gamma_2_1 = embedding_gamma(g.mu_min(), m.inf_V1, 2.0);
  rep.gamma_2_2 = embedding_gamma(g.mu_min(), m.inf_V2, 2.0);
  rep.gamma_inf_1 = embedding_gamma(g.mu_min(), m.inf_V1, kInfExponent);
  rep.gamma_inf_2 = embedding_gamma(g.mu_min(), m.inf_V2, kInfExponent);

  std::mt19937_64 rng(plan.seed);
  std::uniform_real_distribution<double> box(-plan.range, plan.range);
  std::uniform_int_distribution<int> vx(0, g.size() - 1);
  struct Sample { int x; double s, t; };
  std::vector<Sample> samples;
  samples.reserve(static_cast<std::size_t>(plan.samples));
  for (int i = 0; i < plan.samples; ++i) samples.push_back({vx(rng), box(rng), box(rng)});

  auto fail = [&](HypothesisResult& r, int x, double s, double t, std::string detail) {
    if (r.verdict != Verdict::fails_with_witness) {
      r.verdict = Verdict::fails_with_witness;
      r.witness = Witness{x, s, t, std::move(detail)};
    }
  };

  // (F0): exact at the origin for every vertex.
  {
    HypothesisResult r;
    for (int x = 0; x < g.size(); ++x)
      if (nl.F(x, 0.0, 0.0) != 0.0) fail(r, x, 0.0, 0.0, "F(x,0,0) != 0");
    rep.hypotheses["F0"] = r;
  }

  // (F6): evenness at sampled points.
  {
    HypothesisResult r;
    for (const auto& sm : samples) {
      double d = nl.F(sm.x, sm.s, sm.t) - nl.F(sm.x, -sm.s, -sm.t);
      if (std::abs(d) > 1e-12 * (1.0 + std::abs(nl.F(sm.x, sm.s, sm.t))))
        fail(r, sm.x, sm.s, sm.t, "F(x,s,t) != F(x,-s,-t)");
    }
    rep.hypotheses["F6"] = r;
  }

  // (F2): monotone growth of F/|(s,t)|^theta along sampled rays.
  {
    HypothesisResult r;
    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    int rays = std::max(8, plan.samples / 50);
    for (int i = 0; i < rays; ++i) {
      int x = vx(rng);
      double phi = angle(rng);
      double prev = -std::numeric_limits<double>::infinity();
      for (double rad : plan.trend_radii) {
        double s = rad * std::cos(phi), t = rad * std::sin(phi);
        double ratio = nl.F(x, s, t) / std::pow(rad, rep.theta);
        if (!(ratio > prev)) fail(r, x, s, t, "F/|(s,t)|^theta not growing along ray");
        prev = ratio;
      }
    }
    r.note = "trend evidence only; the limit itself is not decidable by sampling";
    rep.hypotheses["F2"] = r;
  }

  // (V): coercivity is a statement at infinity; report the outermost shell.
  {
    HypothesisResult r;
    r.verdict = Verdict::not_checkable_on_finite_graph;
    int far = 0;
    std::vector<int> dist(static_cast<std::size_t>(g.size()));
    for (int x = 0; x < g.size(); ++x) {
      dist[static_cast<std::size_t>(x)] = graph_distance(g, g.id(0), g.id(x));
      far = std::max(far, dist[static_cast<std::size_t>(x)]);
    }
    double shell_min = std::numeric_limits<double>::infinity();
    for (int x = 0; x < g.size(); ++x)
      if (dist[static_cast<std::size_t>(x)] == far)
        shell_min = std::min(shell_min, std::min(m.V1(x), m.V2(x)));
    r.note = "min V over outermost shell (dist " + std::to_string(far) +
             "): " + std::to_string(shell_min);
    rep.hypotheses["V"] = r;
  }

  // (F1): growth envelope at sampled points, when supplied.
  if (nl.growth_bound) {
    HypothesisResult r;
    for (const auto& sm : samples) {
      double env = nl.growth_bound->a(std::hypot(sm.s, sm.t)) * nl.growth_bound->b(sm.x);
      double worst = std::max({std::abs(nl.F(sm.x, sm.s, sm.t)),
                               std::abs(nl.F_s(sm.x, sm.s, sm.t)),
                               std::abs(nl.F_t(sm.x, sm.s, sm.t))});
      if (worst > env * (1.0 + 1e-12)) fail(r, sm.x, sm.s, sm.t, "growth envelope violated");
    }
    rep.hypotheses["F1"] = r;
  }

  // (C1): a(rho)/rho^2 -> h as rho -> 0, sampled on shrinking radii.
  if (nl.growth_bound && nl.h) {
    HypothesisResult r;
    double worst_gap = 0.0;
    for (double rho : {1e-2, 1e-3, 1e-4}) {
      double ratio = nl.growth_bound->a(rho) / (rho * rho);
      worst_gap = std::abs(ratio - *nl.h);
    }
    if (!std::isfinite(worst_gap) || worst_gap > 1.0 + std::abs(*nl.h))
      fail(r, 0, 1e-4, 0.0, "a(rho)/rho^2 not settling near h");
    r.note = "trend evidence only";
    rep.hypotheses["C1"] = r;
  }

  // (C2): alpha_* by grid maximization over the diamond.
  if (nl.growth_bound && nl.rho_star) {
    HypothesisResult r;
    double rho = *nl.rho_star;
    double radius = (rep.gamma_inf_1 + rep.gamma_inf_2) * rho;
    VertexFunction bfun(g, [&] {
      Eigen::VectorXd v(g.size());
      for (int x = 0; x < g.size(); ++x) v(x) = nl.growth_bound->b(x);
      return v;
    }());
    double b_int = integral(g, bfun);
    rep.alpha_star = 0.25 * rho * rho - detail::diamond_max(nl.growth_bound->a, radius) * b_int;
    if (rep.alpha_star <= 0.0) {
      r.verdict = Verdict::fails_with_witness;
      r.witness = Witness{0, rho, 0.0, "alpha_* <= 0 at the supplied rho_*"};
    }
    r.note = "alpha_* = " + std::to_string(rep.alpha_star);
    rep.hypotheses["C2"] = r;
  }

  // (F3): F >= 0 outside the r0 disc, at sampled points pushed outward.
  if (nl.r0) {
    HypothesisResult r;
    for (const auto& sm : samples) {
      double rad = std::hypot(sm.s, sm.t);
      double scale = rad < *nl.r0 ? (*nl.r0 + 1.0) / std::max(rad, 1e-9) : 1.0;
      double s = sm.s * scale, t = sm.t * scale;
      if (nl.F(sm.x, s, t) < 0.0) fail(r, sm.x, s, t, "F negative outside r0 disc");
    }
    rep.hypotheses["F3"] = r;
  }

  // (F4): calF >= 0, and |F|^k <= c |(s,t)|^{2k} calF outside the r0 disc.
  if (nl.r0 && nl.k && nl.c) {
    HypothesisResult r;
    for (const auto& sm : samples) {
      double cf = calF(m, sm.x, sm.s, sm.t);
      if (cf < -1e-12) fail(r, sm.x, sm.s, sm.t, "calF negative");
      double rad = std::hypot(sm.s, sm.t);
      double scale = rad < *nl.r0 ? (*nl.r0 + 1.0) / std::max(rad, 1e-9) : 1.0;
      double s = sm.s * scale, t = sm.t * scale;
      double rad2 = std::hypot(s, t);
      double lhs = std::pow(std::abs(nl.F(sm.x, s, t)), *nl.k);
      double rhs = *nl.c * std::pow(rad2, 2.0 * *nl.k) * calF(m, sm.x, s, t);
      if (lhs > rhs * (1.0 + 1e-10)) fail(r, sm.x, s, t, "(F4) bound violated");
    }
    rep.hypotheses["F4"] = r;
  }

  // (F5): mu F <= s F_s + t F_t + sigma (s^2 + t^2) at sampled points.
  if (nl.mu_ar && nl.sigma) {
    HypothesisResult r;
    double mu = *nl.mu_ar, sig = *nl.sigma;
    double sig_cap = (mu - 2.0) / (2.0 * std::max(rep.gamma_2_1 * rep.gamma_2_1,
                                                  rep.gamma_2_2 * rep.gamma_2_2));
    if (!(sig > 0.0) || !(sig < sig_cap))
      fail(r, 0, 0.0, 0.0, "sigma outside (0, (mu-2)/(2 max gamma_2^2))");
    for (const auto& sm : samples) {
      double lhs = mu * nl.F(sm.x, sm.s, sm.t);
      double rhs = sm.s * nl.F_s(sm.x, sm.s, sm.t) + sm.t * nl.F_t(sm.x, sm.s, sm.t) +
                   sig * (sm.s * sm.s + sm.t * sm.t);
      if (lhs > rhs + 1e-10 * (1.0 + std::abs(rhs))) fail(r, sm.x, sm.s, sm.t, "(F5) violated");
    }
    rep.hypotheses["F5"] = r;
  }

  for (const auto& [name, hr] : rep.hypotheses)
    if (hr.verdict == Verdict::fails_with_witness) rep.all_checked_pass = false;
  return rep;
}

/// Audit entry that insists on a specific hypothesis being checkable.
inline HypothesisResult audit_require(const WeightedGraph& g, const Model& m,
                                      const SamplingPlan& plan, const std::string& name) {
  AuditReport rep = audit(g, m, plan);
  auto it = rep.hypotheses.find(name);
  if (it == rep.hypotheses.end())
    throw MissingMetadata("hypothesis " + name + " needs metadata the nonlinearity did not supply");
  return it->second;
}

}  // namespace graphpass
