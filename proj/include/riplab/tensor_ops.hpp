#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "riplab/rng.hpp"
#include "riplab/signal.hpp"

namespace riplab {

// Tensors of order d over C^n are stored flat with mode 0 fastest:
// index = i_0 + n*(i_1 + n*(i_2 + ...)).

/// Contracts one mode of a flat tensor against conj(y), producing an
/// order-(d-1) tensor over the remaining modes.
inline Eigen::VectorXcd contractMode(const Eigen::VectorXcd& x, Index n, int order,
                                     int mode, const Eigen::VectorXcd& y) {
  if (y.size() != n) throw std::invalid_argument("contractMode: factor length mismatch");
  Index stride = 1;
  for (int i = 0; i < mode; ++i) stride *= n;
  const Index blockSize = stride * n;
  const Index numBlocks = x.size() / blockSize;
  Eigen::VectorXcd out = Eigen::VectorXcd::Zero(x.size() / n);
  for (Index b = 0; b < numBlocks; ++b) {
    for (Index i = 0; i < n; ++i) {
      const cplx w = std::conj(y[i]);
      const Index src = b * blockSize + i * stride;
      const Index dst = b * stride;
      for (Index s = 0; s < stride; ++s) out[dst + s] += w * x[src + s];
    }
  }
  (void)order;
  return out;
}

/// <⊗_l y_l, x> with conjugate-linear first argument.
inline cplx rankOnePairing(const Eigen::VectorXcd& x, Index n, int order,
                           const std::vector<Eigen::VectorXcd>& factors) {
  Eigen::VectorXcd cur = x;
  // Contracting from the highest mode down keeps lower mode indices valid.
  for (int l = order - 1; l >= 0; --l) cur = contractMode(cur, n, l + 1, l, factors[l]);
  return cur[0];
}

/// Flat rank-1 tensor ⊗_l y_l.
inline Eigen::VectorXcd rankOneTensor(Index n, int order,
                                      const std::vector<Eigen::VectorXcd>& factors) {
  Eigen::VectorXcd out = factors[0];
  for (int l = 1; l < order; ++l) {
    Eigen::VectorXcd next(out.size() * n);
    for (Index i = 0; i < n; ++i) next.segment(i * out.size(), out.size()) = factors[l][i] * out;
    out.swap(next);
  }
  return out;
}

struct RankOneFit {
  double value = 0.0;                    // |<⊗y, x>| at the fitted factors
  cplx coefficient{0.0, 0.0};            // <⊗y, x>
  std::vector<Eigen::VectorXcd> factors; // unit factors
};

namespace detail {

// Partial contraction over every mode except `keep`. Contracting from the
// highest mode down leaves lower mode indices valid.
inline Eigen::VectorXcd contractAllBut(const Eigen::VectorXcd& x, Index n, int order,
                                       int keep, const std::vector<Eigen::VectorXcd>& factors) {
  Eigen::VectorXcd cur = x;
  int curOrder = order;
  for (int l = order - 1; l >= 0; --l) {
    if (l == keep) continue;
    cur = contractMode(cur, n, curOrder, l, factors[l]);
    --curOrder;
  }
  return cur;
}

}  // namespace detail

/// Best rank-1 correlation max_{unit y_l} |<⊗y_l, x>| by alternating updates
/// (each step maximizes one factor exactly, so the value is nondecreasing).
/// Restart 0 is deterministic; further restarts draw random unit factors.
inline RankOneFit rankOneMax(const Eigen::VectorXcd& x, Index n, int order,
                             int restarts = 8, int sweeps = 60,
                             std::uint64_t seed = 0x5eed5eedULL) {
  if (order == 1) {
    RankOneFit fit;
    fit.factors = {x.norm() > 0 ? Eigen::VectorXcd(x / x.norm()) : Eigen::VectorXcd::Unit(n, 0).eval()};
    fit.coefficient = fit.factors[0].dot(x);
    fit.value = std::abs(fit.coefficient);
    return fit;
  }
  Rng rng(seed);
  RankOneFit best;
  for (int r = 0; r <= restarts; ++r) {
    std::vector<Eigen::VectorXcd> f(order);
    if (r == 0) {
      // Deterministic start: normalized mode sums.
      for (int l = 0; l < order; ++l) {
        Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(n) / std::sqrt(double(n));
        f[l] = ones;
      }
    } else {
      for (int l = 0; l < order; ++l) {
        Eigen::VectorXcd v(n);
        for (Index i = 0; i < n; ++i) v[i] = rng.complexGaussian();
        const double nv = v.norm();
        f[l] = nv > 0 ? (v / nv).eval() : Eigen::VectorXcd::Unit(n, 0).eval();
      }
    }
    double lastVal = -1.0;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
      double val = 0.0;
      for (int l = 0; l < order; ++l) {
        Eigen::VectorXcd z = detail::contractAllBut(x, n, order, l, f);
        const double nz = z.norm();
        if (nz <= 1e-300) {
          val = 0.0;
          break;
        }
        f[l] = z / nz;
        val = nz;
      }
      if (val <= lastVal + 1e-13 * (1.0 + val)) {
        lastVal = val;
        break;
      }
      lastVal = val;
    }
    if (lastVal > best.value) {
      best.value = lastVal;
      best.factors = f;
      best.coefficient = rankOnePairing(x, n, order, f);
    }
  }
  if (best.factors.empty()) {
    best.factors.assign(order, Eigen::VectorXcd::Unit(n, 0).eval());
    best.coefficient = rankOnePairing(x, n, order, best.factors);
    best.value = std::abs(best.coefficient);
  }
  return best;
}

struct DeflationResult {
  double coefficientMass = 0.0;  // sum |c_i| over extracted rank-1 terms
  double residualEntryL1 = 0.0;  // entrywise l1 of what is left
  double upperBound = 0.0;       // coefficientMass + residualEntryL1
  int terms = 0;
};

/// Greedy rank-1 deflation x = sum c_i ⊗y_i + r. Every extracted term projects
/// the residual, so |r| decreases monotonically; the entrywise l1 of the final
/// residual keeps the total a valid upper bound for the projective norm.
inline DeflationResult greedyDeflation(const Eigen::VectorXcd& x, Index n, int order,
                                       int maxTerms = 0, double tol = 1e-11) {
  if (maxTerms <= 0) maxTerms = static_cast<int>(8 * n * order);
  DeflationResult res;
  Eigen::VectorXcd r = x;
  const double scale = x.norm();
  if (scale == 0.0) return res;
  for (int t = 0; t < maxTerms; ++t) {
    if (r.norm() <= tol * scale) break;
    RankOneFit fit = rankOneMax(r, n, order, 6, 80);
    if (fit.value <= tol * scale) break;
    r -= fit.coefficient * rankOneTensor(n, order, fit.factors);
    res.coefficientMass += std::abs(fit.coefficient);
    ++res.terms;
  }
  res.residualEntryL1 = r.cwiseAbs().sum();
  res.upperBound = res.coefficientMass + res.residualEntryL1;
  return res;
}

}  // namespace riplab
