#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "graphpass/calculus.hpp"
#include "graphpass/errors.hpp"
#include "graphpass/graph.hpp"

namespace graphpass {

using ScalarField = std::function<double(int)>;           // vertex index -> real
using PointFunction = std::function<double(int, double, double)>;  // (x, s, t) -> real

/// Growth envelope |F|, |F_s|, |F_t| <= a(|(s,t)|) b(x).
struct GrowthBound {
  std::function<double(double)> a;  // radial envelope, a: R+ -> R+
  ScalarField b;                    // summable vertex factor
};

/// Coupled nonlinearity F(x,s,t) with its first partials; second partials
/// and hypothesis metadata are optional.
struct Nonlinearity {
  std::string name = "custom";
  PointFunction F;
  PointFunction F_s;
  PointFunction F_t;
  PointFunction F_ss;  // may be null: finite-difference fallback
  PointFunction F_st;
  PointFunction F_tt;

  bool claims_even = false;  // F(x,s,t) = F(x,-s,-t)
  bool claims_F0 = false;    // F(x,0,0) = 0

  std::optional<GrowthBound> growth_bound;          // (F1)
  std::optional<double> h;                          // (C1) limit of a(rho)/rho^2
  std::optional<double> rho_star;                   // (C2)
  std::optional<double> r0;                         // (F3)/(F4) radius
  std::optional<double> k;                          // (F4)
  std::optional<double> c;                          // (F4)
  std::optional<double> mu_ar;                      // (F5) Ambrosetti-Rabinowitz exponent
  std::optional<double> sigma;                      // (F5)

  bool has_second_partials() const { return F_ss && F_st && F_tt; }
};

/// Full model: coefficients, potentials, nonlinearity.
struct Model {
  double a1 = 1.0, a2 = 1.0;
  double b1 = 0.0, b2 = 0.0;
  VertexFunction V1;
  VertexFunction V2;
  Nonlinearity nonlinearity;
  double inf_V1 = 0.0, inf_V2 = 0.0;
  std::optional<int> theta_override;

  Model(const WeightedGraph& g, double a1_, double a2_, double b1_, double b2_,
        VertexFunction V1_, VertexFunction V2_, Nonlinearity nl)
      : a1(a1_), a2(a2_), b1(b1_), b2(b2_),
        V1(std::move(V1_)), V2(std::move(V2_)), nonlinearity(std::move(nl)) {
    if (!(a1 > 0.0) || !(a2 > 0.0)) throw BadParams("a_i must be positive");
    if (b1 < 0.0 || b2 < 0.0) throw BadParams("b_i must be nonnegative");
    require_positive_potential(g, V1);
    require_positive_potential(g, V2);
    inf_V1 = V1.values().minCoeff();
    inf_V2 = V2.values().minCoeff();
  }

  /// Homogeneity exponent: 4 for the Kirchhoff case, 2 for the pure
  /// biharmonic case (b1 = b2 = 0), unless overridden.
  int theta() const {
    if (theta_override) return *theta_override;
    return (b1 > 0.0 || b2 > 0.0) ? 4 : 2;
  }
};

/// calF(x,s,t) = (1/theta)(F_s s + F_t t) - F
inline double calF(const Model& m, int x, double s, double t) {
  const auto& nl = m.nonlinearity;
  double th = static_cast<double>(m.theta());
  return (nl.F_s(x, s, t) * s + nl.F_t(x, s, t) * t) / th - nl.F(x, s, t);
}

/// Embedding constants gamma_{r} of the E -> L^r inequality:
///   2 <= r < inf:  (mu_min inf_V)^{(2-r)/(2r)} (inf_V)^{-1/r}
///   r = inf:       (mu_min inf_V)^{-1/2}
inline double embedding_gamma(double mu_min, double inf_V, double r) {
  if (!(mu_min > 0.0) || !(inf_V > 0.0)) throw BadParams("mu_min and inf_V must be positive");
  if (r == kInfExponent) return 1.0 / std::sqrt(mu_min * inf_V);
  if (!(r >= 2.0)) throw BadExponent("embedding exponent must satisfy r >= 2");
  return std::pow(mu_min * inf_V, (2.0 - r) / (2.0 * r)) * std::pow(inf_V, -1.0 / r);
}

// ---------------------------------------------------------------------------
// Builtin nonlinearities.

/// F(x,s,t) = c1(x)((5/6)s^6 - (3/4)s^4) + c2(x)((5/6)t^6 - (3/4)t^4),
/// so F_s = c1(x)(5 s^5 - 3 s^3). Coefficients must stay in (0, 1).
inline Nonlinearity remark11_poly(ScalarField c1, ScalarField c2,
                                  double coeff_min, double coeff_max) {
  if (!(coeff_min > 0.0) || !(coeff_max < 1.0) || coeff_min > coeff_max)
    throw CoefficientOutOfRange("remark11_poly coefficients must lie in (0,1)");
  Nonlinearity nl;
  nl.name = "remark11_poly";
  nl.F = [c1, c2](int x, double s, double t) {
    auto term = [](double z) { return (5.0 / 6.0) * std::pow(z, 6) - 0.75 * std::pow(z, 4); };
    return c1(x) * term(s) + c2(x) * term(t);
  };
  nl.F_s = [c1](int x, double s, double) {
    return c1(x) * (5.0 * std::pow(s, 5) - 3.0 * std::pow(s, 3));
  };
  nl.F_t = [c2](int x, double, double t) {
    return c2(x) * (5.0 * std::pow(t, 5) - 3.0 * std::pow(t, 3));
  };
  nl.F_ss = [c1](int x, double s, double) {
    return c1(x) * (25.0 * std::pow(s, 4) - 9.0 * s * s);
  };
  nl.F_st = [](int, double, double) { return 0.0; };
  nl.F_tt = [c2](int x, double, double t) {
    return c2(x) * (25.0 * std::pow(t, 4) - 9.0 * t * t);
  };
  nl.claims_even = true;
  nl.claims_F0 = true;
  // |F|, |F_s|, |F_t| <= (5 rho^6 + 5 rho^5 + 3 rho^4 + 3 rho^3) * max(c1,c2)(x)
  nl.growth_bound = GrowthBound{
      [](double rho) {
        return 5.0 * std::pow(rho, 6) + 5.0 * std::pow(rho, 5) + 3.0 * std::pow(rho, 4) +
               3.0 * std::pow(rho, 3);
      },
      [c1, c2](int x) { return std::max(c1(x), c2(x)); }};
  nl.h = 0.0;
  // (F3): on |(s,t)| = r0 the larger coordinate z >= r0/sqrt(2) must outweigh
  // the other coordinate's dip, which is at worst -0.09 * coeff_max.
  auto term = [](double z) { return (5.0 / 6.0) * std::pow(z, 6) - 0.75 * std::pow(z, 4); };
  double dip = 0.09 * coeff_max / coeff_min;
  double z = 1.0;
  while (term(z) < dip) z += 1.0 / 64.0;
  nl.r0 = std::sqrt(2.0) * z;
  // (F4) with theta = 4: calF = (5/12)(c1 s^6 + c2 t^6), so k = 3/2 matches
  // the growth of |F|^k against |(s,t)|^{2k} calF.
  nl.k = 1.5;
  nl.c = 2.0 * (12.0 / 5.0) * std::pow((5.0 / 6.0) * coeff_max, 1.5) / coeff_min;
  // (F5): for mu in (4,6) the inequality holds per coordinate with no slack.
  nl.mu_ar = 5.0;
  nl.sigma = 1e-3;
  // (C2): a(rho) ~ 3 rho^3 near zero beats (1/4) rho^2 for small rho.
  nl.rho_star = 1e-4;
  return nl;
}

/// Scalar exponential example represented as a decoupled system:
/// F(x,s,t) = G(x,s) + G(x,t) with G(x,s) = c(x) e^{|s|} s^4, so for s >= 0
/// the partial is c(x) e^s (s^4 + 4 s^3) and the even reflection for s < 0.
inline Nonlinearity remark42_exponential(ScalarField c, double coeff_min, double coeff_max) {
  if (!(coeff_min > 0.0) || !(coeff_max < 1.0) || coeff_min > coeff_max)
    throw CoefficientOutOfRange("remark42_exponential coefficient must lie in (0,1)");
  auto G = [](double z) { return std::exp(std::abs(z)) * std::pow(z, 4); };
  auto Gp = [](double z) {
    double az = std::abs(z);
    return std::exp(az) * (std::pow(z, 3) * az + 4.0 * std::pow(z, 3));
  };
  auto Gpp = [](double z) {
    double az = std::abs(z);
    return std::exp(az) * (std::pow(z, 4) + 8.0 * az * z * z + 12.0 * z * z);
  };
  Nonlinearity nl;
  nl.name = "remark42_exponential";
  nl.F = [c, G](int x, double s, double t) { return c(x) * (G(s) + G(t)); };
  nl.F_s = [c, Gp](int x, double s, double) { return c(x) * Gp(s); };
  nl.F_t = [c, Gp](int x, double, double t) { return c(x) * Gp(t); };
  nl.F_ss = [c, Gpp](int x, double s, double) { return c(x) * Gpp(s); };
  nl.F_st = [](int, double, double) { return 0.0; };
  nl.F_tt = [c, Gpp](int x, double, double t) { return c(x) * Gpp(t); };
  nl.claims_even = true;
  nl.claims_F0 = true;
  nl.growth_bound = GrowthBound{
      [](double rho) { return 6.0 * std::exp(rho) * (std::pow(rho, 4) + std::pow(rho, 3)); },
      [c](int x) { return c(x); }};
  nl.h = 0.0;
  nl.r0 = 0.0;  // G >= 0 everywhere
  nl.mu_ar = 3.0;  // mu G <= s G' holds for mu <= 4
  nl.sigma = 1e-3;
  nl.rho_star = 1e-4;
  return nl;
}

/// Convenience super-theta power: F = |s|^p / p + |t|^q / q with p, q > theta.
inline Nonlinearity power_pq(double p, double q) {
  if (!(p > 2.0) || !(q > 2.0)) throw BadParams("power_pq needs p, q > 2");
  Nonlinearity nl;
  nl.name = "power_pq";
  nl.F = [p, q](int, double s, double t) {
    return std::pow(std::abs(s), p) / p + std::pow(std::abs(t), q) / q;
  };
  nl.F_s = [p](int, double s, double) {
    return s == 0.0 ? 0.0 : std::pow(std::abs(s), p - 2.0) * s;
  };
  nl.F_t = [q](int, double, double t) {
    return t == 0.0 ? 0.0 : std::pow(std::abs(t), q - 2.0) * t;
  };
  nl.F_ss = [p](int, double s, double) {
    return (p - 1.0) * std::pow(std::abs(s), p - 2.0);
  };
  nl.F_st = [](int, double, double) { return 0.0; };
  nl.F_tt = [q](int, double, double t) {
    return (q - 1.0) * std::pow(std::abs(t), q - 2.0);
  };
  nl.claims_even = true;
  nl.claims_F0 = true;
  nl.growth_bound = GrowthBound{
      [p, q](double rho) {
        return std::pow(rho, p) / p + std::pow(rho, q) / q + std::pow(rho, p - 1.0) +
               std::pow(rho, q - 1.0);
      },
      [](int) { return 1.0; }};
  if (std::min(p, q) > 3.0) {
    nl.h = 0.0;
    nl.rho_star = 1e-4;
  }
  nl.r0 = 0.0;
  nl.mu_ar = std::min(p, q);
  nl.sigma = 1e-3;
  return nl;
}

}  // namespace graphpass
