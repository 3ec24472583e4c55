#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>

namespace riplab {

// Sample-complexity bound formulas. Every absolute constant is a caller
// visible knob defaulting to 1; reports should echo the constants used.

/// e(p) exponent: 1 for 1 <= p < 2 and 3 for p = 2.
inline double entropyExponent(double p) {
  if (p < 1.0 || p > 2.0) throw std::invalid_argument("entropyExponent: p must be in [1,2]");
  return p == 2.0 ? 3.0 : 1.0;
}

/// Dyadic entropy-number bound for v : l_1^N -> l_inf^m(H),
/// e_l(v) <= c * normV * sqrt((1+ln(N/l)) (1+ln m)) / sqrt(l).
inline double maureyBound(double N, double m, double l, double normV, double c = 1.0) {
  if (N < 1 || m < 1 || l < 1) throw std::invalid_argument("maureyBound: N, m, l must be >= 1");
  return c * normV * std::sqrt((1.0 + std::log(N / l)) * (1.0 + std::log(m))) / std::sqrt(l);
}

/// Lorentz-aggregate entropy bound
/// E_{2,1}(v) <= C sqrt((1+ln N)(1+ln m)) (1+ln m+ln d) * normV.
inline double e21Bound(double N, double m, double blockDim, double normV, double C = 1.0) {
  if (N < 1 || m < 1 || blockDim < 1)
    throw std::invalid_argument("e21Bound: N, m, blockDim must be >= 1");
  return C * std::sqrt((1.0 + std::log(N)) * (1.0 + std::log(m))) *
         (1.0 + std::log(m) + std::log(blockDim)) * normV;
}

/// c(p) = (1/2 - 1/p')^{-1} * C^{p'} with C a user constant.
inline double dualTypePConstant(double p, double C = 1.0) {
  if (p <= 1.0 || p >= 2.0) throw std::invalid_argument("dualTypePConstant: need 1 < p < 2");
  const double pPrime = p / (p - 1.0);
  return std::pow(C, pPrime) / (0.5 - 1.0 / pPrime);
}

/// Model family selector for the complexity constant M_{p,alpha}.
struct ComplexityInputs {
  enum class Family { CanonicalL1, Polytope, SchattenQ, TensorHull, DualTypeP };
  Family family = Family::CanonicalL1;
  double N = 1;       // ambient dimension (canonical)
  double M = 1;       // atom count (polytope)
  double n = 1;       // matrix side (Schatten) / mode size (tensor)
  double q = 1;       // Schatten exponent, 1 <= q <= 2
  int order = 1;      // tensor order
  double typeConstant = 1;  // T_p(X^*) for the dual-type-p family
};

/// Entropy-type complexity constant M_{p,alpha_d}(K) for the given family.
/// The dual-type-p branches depend on m because the underlying entropy
/// estimate does; the others do not.
inline double complexityConstant(const ComplexityInputs& in, double p, double blockDim,
                                 double m, double C = 1.0) {
  using Family = ComplexityInputs::Family;
  const double logD = 1.0 + std::log(blockDim);
  switch (in.family) {
    case Family::CanonicalL1:
      if (p != 2.0) throw std::invalid_argument("complexityConstant: canonical branch needs p = 2");
      return C * std::sqrt(1.0 + std::log(in.N)) * logD;
    case Family::Polytope:
      if (p != 2.0) throw std::invalid_argument("complexityConstant: polytope branch needs p = 2");
      return C * std::sqrt(1.0 + std::log(in.M)) * logD;
    case Family::SchattenQ: {
      if (p != 2.0) throw std::invalid_argument("complexityConstant: Schatten branch needs p = 2");
      if (in.q < 1.0 || in.q > 2.0)
        throw std::invalid_argument("complexityConstant: Schatten exponent must be in [1,2]");
      if (in.q == 1.0) return C * std::pow(logD, 1.5) * std::pow(1.0 + std::log(in.n), 1.5);
      const double qPrime = in.q / (in.q - 1.0);
      return C * std::pow(logD, 1.5) * std::pow(qPrime, 1.5);
    }
    case Family::TensorHull: {
      // Rank-1 atoms reduce to the polytope branch with ln M <= 3nd(1+ln d).
      if (p != 2.0) throw std::invalid_argument("complexityConstant: tensor branch needs p = 2");
      const double lnM = 3.0 * in.n * in.order * (1.0 + std::log(double(in.order)));
      return C * std::sqrt(1.0 + lnM) * logD;
    }
    case Family::DualTypeP: {
      if (p == 2.0) return C * std::pow(in.typeConstant, 3.0) * std::pow(1.0 + std::log(m), 1.5);
      const double pPrime = p / (p - 1.0);
      return dualTypePConstant(p, C) * std::pow(in.typeConstant, pPrime + 1.0) *
             std::pow(m, 2.0 / p - 1.0) * std::sqrt(1.0 + std::log(m));
    }
  }
  throw std::logic_error("complexityConstant: unreachable");
}

struct SampleComplexityInputs {
  double s = 1;
  double delta = 0.1;
  double zeta = 0.1;
  double p = 2.0;
  double blockDim = 1;
  double alphaMoment = 1;   // deterministic bound on alpha_d(v_j)
  double opNormMoment = 1;  // deterministic bound on ||v_j||
  double c = 1.0;           // absolute constant
};

struct FixedPointResult {
  std::uint64_t m = 1;
  int iterations = 0;
  bool satisfied = false;
};

namespace detail {

constexpr double kMMax = 9.2e18;  // ~2^63

/// Smallest integer m with m >= rhs(m), found by upward fixed-point
/// iteration (the right side grows only logarithmically), then trimmed by a
/// short downward scan so small answers are exact minima.
template <class Rhs>
FixedPointResult solveFixedPoint(const Rhs& rhs) {
  FixedPointResult res;
  double m = 1.0;
  for (res.iterations = 1; res.iterations <= 200; ++res.iterations) {
    const double need = rhs(m);
    if (!(need > m)) {  // satisfied
      double candidate = std::max(1.0, std::ceil(need));
      // The map m -> rhs(m) is nondecreasing, so walk down to the minimum.
      for (int guard = 0; guard < 100000 && candidate > 1.0 &&
                          rhs(candidate - 1.0) <= candidate - 1.0;
           ++guard)
        candidate -= 1.0;
      res.m = static_cast<std::uint64_t>(candidate);
      res.satisfied = true;
      return res;
    }
    if (need > kMMax) return res;  // unsatisfiable at these constants
    m = std::ceil(need);
  }
  return res;
}

}  // namespace detail

/// Joint sufficient-m condition: the smallest m with
///   m^{1/p} / (1+ln m)^{e(p)/2} >= c M_{p,alpha}(K; m) sqrt(s) / delta * alphaMoment
///   m >= c delta^{-2} s ln(1/zeta) opNormMoment^2.
/// The complexity constant is re-evaluated at each iterate since some
/// families depend on m.
inline FixedPointResult predictM(const ComplexityInputs& model, const SampleComplexityInputs& in,
                                 double complexityC = 1.0) {
  if (in.delta <= 0 || in.zeta <= 0 || in.zeta >= 1 || in.s < 1 || in.p <= 1 || in.p > 2)
    throw std::invalid_argument("predictM: invalid inputs");
  const double ep = entropyExponent(in.p);
  const double tail =
      in.c * in.s * std::log(1.0 / in.zeta) * in.opNormMoment * in.opNormMoment / (in.delta * in.delta);
  auto rhs = [&](double m) {
    const double complexity = complexityConstant(model, in.p, in.blockDim, m, complexityC);
    const double target = in.c * complexity * std::sqrt(in.s) * in.alphaMoment / in.delta;
    // Invert m^{1/p} >= target (1+ln m)^{e/2} at the current log value.
    const double entropyNeed = std::pow(target * std::pow(1.0 + std::log(m), ep / 2.0), in.p);
    return std::max({1.0, entropyNeed, tail});
  };
  return detail::solveFixedPoint(rhs);
}

/// Verifies that m satisfies both displayed predictM inequalities.
inline bool predictMSatisfied(const ComplexityInputs& model, const SampleComplexityInputs& in,
                              std::uint64_t m, double complexityC = 1.0) {
  const double md = static_cast<double>(m);
  const double ep = entropyExponent(in.p);
  const double complexity = complexityConstant(model, in.p, in.blockDim, md, complexityC);
  const bool entropyOk =
      std::pow(md, 1.0 / in.p) / std::pow(1.0 + std::log(md), ep / 2.0) >=
      in.c * complexity * std::sqrt(in.s) * in.alphaMoment / in.delta - 1e-9;
  const bool tailOk = md >= in.c * in.s * std::log(1.0 / in.zeta) * in.opNormMoment *
                                in.opNormMoment / (in.delta * in.delta) -
                            1e-9;
  return entropyOk && tailOk;
}

/// Headline polytope requirement at a given m:
/// c delta^{-2} s ||u||^2 max((1+ln m)(1+ln md)^2 (1+ln M), ln(1/zeta)).
inline double polytopeHeadlineRequirement(double s, double delta, double M, double blockDim,
                                          double normU, double zeta, double m,
                                          double c = 1.0) {
  const double lm = 1.0 + std::log(m);
  const double lmd = 1.0 + std::log(m * blockDim);
  return c / (delta * delta) * s * normU * normU *
         std::max(lm * lmd * lmd * (1.0 + std::log(M)), std::log(1.0 / zeta));
}

/// Group-structured tensor requirement at a given m:
/// c delta^{-2} s (1+ln m)^3 (1+3nd(1+ln d)+ln(1/zeta))^2.
inline double tensorRequirement(double n, int order, double s, double delta, double zeta,
                                double m, double c = 1.0) {
  const double base =
      1.0 + 3.0 * n * order * (1.0 + std::log(double(order))) + std::log(1.0 / zeta);
  const double lg = 1.0 + std::log(m);
  return c / (delta * delta) * s * lg * lg * lg * base * base;
}

/// Gaussian tail threshold sqrt(2 (1 + 3nd(1+ln d) + ln(1/zeta))) for the
/// dual norm of the rank-1 tensor hull.
inline double gaussianDualNormBound(double n, int order, double zeta) {
  if (n < 1 || order < 1 || zeta <= 0 || zeta >= 1)
    throw std::invalid_argument("gaussianDualNormBound: invalid inputs");
  return std::sqrt(2.0 * (1.0 + 3.0 * n * order * (1.0 + std::log(double(order))) +
                          std::log(1.0 / zeta)));
}

/// Gaussian-operator baseline m >= c delta^{-2} (nd(1+ln d) + ln(1/zeta)).
inline std::uint64_t gordonGaussianM(double n, int order, double delta, double zeta,
                                     double c = 1.0) {
  if (n < 1 || order < 1 || delta <= 0 || zeta <= 0 || zeta >= 1)
    throw std::invalid_argument("gordonGaussianM: invalid inputs");
  const double v = c / (delta * delta) *
                   (n * order * (1.0 + std::log(double(order))) + std::log(1.0 / zeta));
  return static_cast<std::uint64_t>(std::max(1.0, std::ceil(v)));
}

/// Group-structured tensor operator: smallest m with
///   m >= c delta^{-2} s (1+ln m)^3 (1 + 3nd(1+ln d) + ln(1/zeta))^2.
inline FixedPointResult tensorM(double n, int order, double s, double delta, double zeta,
                                double c = 1.0) {
  if (n < 1 || order < 1 || s < 1 || delta <= 0 || zeta <= 0 || zeta >= 1)
    throw std::invalid_argument("tensorM: invalid inputs");
  auto rhs = [&](double m) {
    return std::max(1.0, tensorRequirement(n, order, s, delta, zeta, m, c));
  };
  return detail::solveFixedPoint(rhs);
}

/// Re-substitution check for tensorM.
inline bool tensorMSatisfied(double n, int order, double s, double delta, double zeta,
                             std::uint64_t m, double c = 1.0) {
  const double md = static_cast<double>(m);
  return md >= tensorRequirement(n, order, s, delta, zeta, md, c) - 1e-9;
}

}  // namespace riplab
