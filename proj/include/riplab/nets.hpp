#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "riplab/bounds.hpp"
#include "riplab/rng.hpp"
#include "riplab/signal.hpp"
#include "riplab/tensor_ops.hpp"

namespace riplab {

struct NetBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Greedy farthest-point epsilon-net on the unit sphere of R^n.
///
/// Points are pairwise separated by more than epsilon (so the cardinality is
/// at most (1+2/eps)^n by the volume argument) and the covering radius is
/// validated against fresh random samples during construction.
struct SphereNet {
  Eigen::MatrixXd points;  // n x |net|, unit columns
  double epsilon = 0.0;
  std::uint64_t seed = 0;
  int validationRounds = 0;

  Index dimension() const { return points.rows(); }
  Index size() const { return points.cols(); }

  double volumetricCardinalityBound() const {
    return std::pow(1.0 + 2.0 / epsilon, static_cast<double>(points.rows()));
  }

  /// Distance from x to the nearest net point.
  double distance(const Eigen::VectorXd& x) const {
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < points.cols(); ++j) {
      const double d = (points.col(j) - x).norm();
      if (d < best) best = d;
    }
    return best;
  }

  Index nearest(const Eigen::VectorXd& x) const {
    Index arg = 0;
    double best = std::numeric_limits<double>::infinity();
    for (Index j = 0; j < points.cols(); ++j) {
      const double d = (points.col(j) - x).norm();
      if (d < best) {
        best = d;
        arg = j;
      }
    }
    return arg;
  }
};

struct NetOptions {
  Index poolSize = 50000;
  Index maxPoints = 300000;
  Index validationSamples = 100000;
  int maxRounds = 8;
};

namespace detail {

inline Eigen::VectorXd randomSpherePoint(Index n, Rng& rng) {
  Eigen::VectorXd v(n);
  double nrm = 0.0;
  do {
    for (Index i = 0; i < n; ++i) v[i] = rng.gaussian();
    nrm = v.norm();
  } while (nrm < 1e-12);
  return v / nrm;
}

}  // namespace detail

/// Builds the net: greedy farthest point over a random pool, then repeated
/// fresh-sample validation rounds; uncovered validation points are admitted
/// (they are farther than epsilon, so the packing property is preserved).
inline SphereNet sphereNet(Index n, double epsilon, Rng rng, NetOptions opt = {}) {
  if (n < 1) throw std::invalid_argument("sphereNet: n must be >= 1");
  if (epsilon <= 0.0 || epsilon >= 1.0)
    throw std::invalid_argument("sphereNet: epsilon must be in (0,1)");

  SphereNet net;
  net.epsilon = epsilon;
  net.seed = rng.seed();

  std::vector<Eigen::VectorXd> pts;
  Eigen::MatrixXd pool(n, opt.poolSize);
  for (Index j = 0; j < opt.poolSize; ++j) pool.col(j) = detail::randomSpherePoint(n, rng);

  Eigen::VectorXd minDist = Eigen::VectorXd::Constant(opt.poolSize, 2.0);
  // Seed with the axis vectors so degenerate pools still cover them.
  for (Index i = 0; i < n; ++i) {
    for (const double s : {1.0, -1.0}) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(n);
      e[i] = s;
      pts.push_back(e);
      for (Index j = 0; j < opt.poolSize; ++j)
        minDist[j] = std::min(minDist[j], (pool.col(j) - e).norm());
    }
  }

  auto greedyPass = [&]() {
    while (static_cast<Index>(pts.size()) < opt.maxPoints) {
      Index arg = 0;
      const double far = minDist.maxCoeff(&arg);
      if (far <= epsilon) return true;
      const Eigen::VectorXd p = pool.col(arg);
      pts.push_back(p);
      for (Index j = 0; j < opt.poolSize; ++j)
        minDist[j] = std::min(minDist[j], (pool.col(j) - p).norm());
    }
    return false;
  };
  if (!greedyPass()) throw NetBudgetError("sphereNet: point budget exceeded");

  // Validation rounds on fresh samples.
  for (int round = 0; round < opt.maxRounds; ++round) {
    bool clean = true;
    for (Index t = 0; t < opt.validationSamples; ++t) {
      const Eigen::VectorXd x = detail::randomSpherePoint(n, rng);
      double best = 2.0;
      for (const auto& p : pts) best = std::min(best, (x - p).norm());
      if (best > epsilon) {
        clean = false;
        pts.push_back(x);
        if (static_cast<Index>(pts.size()) > opt.maxPoints)
          throw NetBudgetError("sphereNet: point budget exceeded during validation");
      }
    }
    net.validationRounds = round + 1;
    if (clean) {
      net.points.resize(n, static_cast<Index>(pts.size()));
      for (Index j = 0; j < net.points.cols(); ++j) net.points.col(j) = pts[j];
      return net;
    }
  }
  throw NetBudgetError("sphereNet: covering not validated within round budget");
}

/// Max distance from `samples` fresh sphere points to the net (covering check).
inline double coveringRadiusEstimate(const SphereNet& net, Index samples, Rng rng) {
  double worst = 0.0;
  for (Index t = 0; t < samples; ++t)
    worst = std::max(worst, net.distance(detail::randomSpherePoint(net.dimension(), rng)));
  return worst;
}

/// Implicit product net Delta^{(x)d} of rank-1 tensors.
struct TensorAtomSet {
  SphereNet base;
  int order = 1;

  double logCardinality() const {
    return order * std::log(static_cast<double>(base.size()));
  }
  double cardinality() const {
    return std::pow(static_cast<double>(base.size()), order);
  }
  /// ln M <= 3 n d (1+ln d), valid when epsilon is inside the admissible window.
  double logCardinalityBound() const {
    return 3.0 * static_cast<double>(base.dimension()) * order *
           (1.0 + std::log(static_cast<double>(order)));
  }
  /// Coefficient expansion of the hull containment K ⊂ e absconv(atoms).
  static constexpr double expansionFactor = 2.718281828459045235;
};

/// Admissible epsilon window for order d: 1/(d+1) < 3 eps <= 1/d.
inline bool tensorEpsilonAdmissible(double epsilon, int order) {
  return 3.0 * epsilon > 1.0 / (order + 1) && 3.0 * epsilon <= 1.0 / order;
}

inline TensorAtomSet tensorAtoms(SphereNet net, int order) {
  if (order < 1) throw std::invalid_argument("tensorAtoms: order must be >= 1");
  if (!tensorEpsilonAdmissible(net.epsilon, order))
    throw std::invalid_argument("tensorAtoms: epsilon outside the admissible window for this order");
  TensorAtomSet atoms{std::move(net), order};
  if (atoms.logCardinality() > atoms.logCardinalityBound())
    throw std::logic_error("tensorAtoms: cardinality bound violated");
  return atoms;
}

struct NetDualNormResult {
  double value = 0.0;    // includes the hull expansion factor e
  double netMax = 0.0;   // max_{atoms} |<atom, xi>| before expansion
  bool certified = false;
};

namespace detail {

// Recursive exact maximum of |<z_{j_1} x ... x z_{j_d}, xi>| over the product net.
inline double productNetMax(const Eigen::VectorXcd& cur, const Eigen::MatrixXd& pts,
                            Index n, int modesLeft) {
  if (modesLeft == 0) return std::abs(cur[0]);
  double best = 0.0;
  for (Index j = 0; j < pts.cols(); ++j) {
    const Eigen::VectorXcd contracted =
        contractMode(cur, n, modesLeft, modesLeft - 1, pts.col(j).cast<cplx>());
    best = std::max(best, productNetMax(contracted, pts, n, modesLeft - 1));
  }
  return best;
}

}  // namespace detail

/// Certified upper bound on the tensor-hull dual norm by exhaustive product-net
/// enumeration: ||xi||_{X*} <= e max_{atoms} |<atom, xi>|.
inline NetDualNormResult netDualNormEnumerate(const Eigen::VectorXcd& xi,
                                              const TensorAtomSet& atoms,
                                              double budget = 1e7) {
  const Index n = atoms.base.dimension();
  if (atoms.cardinality() > budget)
    throw NetBudgetError("netDualNormEnumerate: product net too large");
  NetDualNormResult res;
  res.netMax = detail::productNetMax(xi, atoms.base.points, n, atoms.order);
  res.value = TensorAtomSet::expansionFactor * res.netMax;
  res.certified = true;
  return res;
}

/// Heuristic surrogate: discrete alternating ascent over the product net
/// (each sweep picks the best net point per mode with the others fixed).
/// Lower-bounds the enumerate value, hence not a certified upper bound.
inline NetDualNormResult netDualNormAlternate(const Eigen::VectorXcd& xi,
                                              const TensorAtomSet& atoms, int restarts,
                                              Rng rng) {
  const Index n = atoms.base.dimension();
  const Index sz = atoms.base.size();
  const int d = atoms.order;
  NetDualNormResult res;
  std::vector<Eigen::VectorXcd> factors(d);
  for (int r = 0; r < std::max(1, restarts); ++r) {
    std::vector<Index> idx(d);
    for (int l = 0; l < d; ++l) {
      idx[l] = static_cast<Index>(rng.uniformIndex(sz));
      factors[l] = atoms.base.points.col(idx[l]).cast<cplx>();
    }
    double cur = std::abs(rankOnePairing(xi, n, d, factors));
    for (int sweep = 0; sweep < 200; ++sweep) {
      bool improved = false;
      for (int l = 0; l < d; ++l) {
        const Eigen::VectorXcd z = detail::contractAllBut(xi, n, d, l, factors);
        Index bestJ = idx[l];
        double bestVal = cur;
        for (Index j = 0; j < sz; ++j) {
          const double v = std::abs(atoms.base.points.col(j).cast<cplx>().dot(z));
          if (v > bestVal + 1e-15) {
            bestVal = v;
            bestJ = j;
          }
        }
        if (bestJ != idx[l]) {
          idx[l] = bestJ;
          factors[l] = atoms.base.points.col(bestJ).cast<cplx>();
          cur = bestVal;
          improved = true;
        }
      }
      if (!improved) break;
    }
    res.netMax = std::max(res.netMax, cur);
  }
  res.value = TensorAtomSet::expansionFactor * res.netMax;
  res.certified = false;
  return res;
}

struct RoundingStep {
  Index atom = 0;
  double coefficient = 0.0;
};

struct RoundingResult {
  std::vector<RoundingStep> steps;
  double mass = 0.0;          // sum of |coefficients|
  double residualNorm = 0.0;  // reconstruction error
};

/// Expands y in net atoms by iterative rounding: peel the nearest net point
/// from the current residual. The geometric decay of the residual keeps the
/// coefficient mass below 1/(1-eps) <= 1+3eps for unit y.
inline RoundingResult iterativeRounding(const Eigen::VectorXd& y, const SphereNet& net,
                                        double tol = 1e-12, int maxSteps = 300) {
  RoundingResult res;
  Eigen::VectorXd r = y;
  for (int step = 0; step < maxSteps; ++step) {
    const double nr = r.norm();
    if (nr <= tol) break;
    const Index j = net.nearest(r / nr);
    res.steps.push_back({j, nr});
    res.mass += nr;
    r -= nr * net.points.col(j);
  }
  res.residualNorm = r.norm();
  return res;
}

struct TailExperimentResult {
  double threshold = 0.0;
  double rawRate = 0.0;       // P(e * netMax > threshold)
  double deflatedRate = 0.0;  // P(netMax > threshold); netMax lower-bounds the dual norm
  Index draws = 0;
};

/// Empirical exceedance of the Gaussian dual-norm tail threshold
/// sqrt(2(1+3nd(1+ln d)+ln(1/zeta))). The deflated rate counts the
/// certified-from-below event and must stay at or under zeta.
inline TailExperimentResult gaussianDualTailExperiment(const TensorAtomSet& atoms,
                                                       Index draws, double zeta, Rng rng) {
  const Index n = atoms.base.dimension();
  const int d = atoms.order;
  Index N = 1;
  for (int l = 0; l < d; ++l) N *= n;
  TailExperimentResult out;
  out.threshold = gaussianDualNormBound(static_cast<double>(n), d, zeta);
  out.draws = draws;
  Index raw = 0, deflated = 0;
  for (Index t = 0; t < draws; ++t) {
    Eigen::VectorXcd xi(N);
    for (Index i = 0; i < N; ++i) xi[i] = cplx(rng.gaussian(), 0.0);
    const NetDualNormResult r = netDualNormEnumerate(xi, atoms);
    if (r.value > out.threshold) ++raw;
    if (r.netMax > out.threshold) ++deflated;
  }
  out.rawRate = static_cast<double>(raw) / static_cast<double>(draws);
  out.deflatedRate = static_cast<double>(deflated) / static_cast<double>(draws);
  return out;
}

}  // namespace riplab
