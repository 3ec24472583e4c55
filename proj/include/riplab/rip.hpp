#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "riplab/measurement.hpp"
#include "riplab/parallel.hpp"
#include "riplab/rng.hpp"
#include "riplab/sparsity.hpp"

namespace riplab {

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Estimate of the restricted isometry constant sup |  ||Ax||^2 - <x,Phi x> |.
/// Exact values enumerate exactly-s-sparse supports (canonical model); the
/// sampling estimators are certified lower bounds only.
struct RipEstimate {
  enum class Kind { Exact, LowerBound };
  enum class Method { Enumeration, MonteCarlo, Ascent };

  double delta = 0.0;
  Kind kind = Kind::LowerBound;
  Method method = Method::MonteCarlo;
  Index samples = 0;  // trials or restarts spent
  std::uint64_t seed = 0;
  bool degenerate = false;
};

/// Reporting threshold max(delta, delta^2) for the restricted isometry bound.
inline double ripThreshold(double delta) { return std::max(delta, delta * delta); }

/// Inverts max(delta, delta^2) <= t.
inline double ripDeltaFromThreshold(double t) { return t <= 1.0 ? t : std::sqrt(t); }

namespace detail {

inline double binomialCount(Index n, Index k) {
  if (k < 0 || k > n) return 0.0;
  return std::exp(std::lgamma(double(n) + 1) - std::lgamma(double(k) + 1) -
                  std::lgamma(double(n - k) + 1));
}

/// delta over a fixed support: || G_SS - I ||_op for the Hermitian Gram block.
class SubsetDeltaEvaluator {
 public:
  explicit SubsetDeltaEvaluator(const Eigen::MatrixXcd& gram, Index s)
      : gram_(gram), s_(s), block_(s, s) {}

  /// Frobenius norm of G_SS - I (an upper bound for the operator norm, used
  /// to skip eigensolves that cannot improve the running max).
  double frobenius(const std::vector<Index>& idx) {
    double f = 0.0;
    for (Index c = 0; c < s_; ++c)
      for (Index r = 0; r < s_; ++r) {
        cplx v = gram_(idx[r], idx[c]);
        if (r == c) v -= 1.0;
        block_(r, c) = v;
        f += std::norm(v);
      }
    return std::sqrt(f);
  }

  /// Exact subset delta; call frobenius(idx) first to fill the block.
  double opNorm() {
    if (s_ == 1) return std::abs(block_(0, 0));
    if (s_ == 2) {
      // Closed-form Hermitian 2x2 eigenvalues of the deviation block.
      const double a = block_(0, 0).real();
      const double d = block_(1, 1).real();
      const double off = std::abs(block_(0, 1));
      const double mid = 0.5 * (a + d);
      const double rad = std::sqrt(0.25 * (a - d) * (a - d) + off * off);
      return std::max(std::abs(mid + rad), std::abs(mid - rad));
    }
    es_.compute(block_, Eigen::EigenvaluesOnly);
    return es_.eigenvalues().cwiseAbs().maxCoeff();
  }

 private:
  const Eigen::MatrixXcd& gram_;
  Index s_;
  Eigen::MatrixXcd block_;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es_;
};

/// Exact enumeration from a precomputed Gram matrix. `startBest` may carry a
/// known lower bound (e.g. the exact delta at a smaller s) to sharpen the
/// Frobenius skip.
inline double exactRipFromGram(const Eigen::MatrixXcd& gram, Index s, double startBest = 0.0) {
  const Index n = gram.rows();
  if (s < 1 || s > n) throw std::invalid_argument("exactRipFromGram: need 1 <= s <= N");
  if (binomialCount(n, s) * double(s) * double(s) * double(s) > 1e9)
    throw BudgetError("exactRipFromGram: combinatorial budget exceeded");
  SubsetDeltaEvaluator eval(gram, s);
  std::vector<Index> idx(s);
  for (Index i = 0; i < s; ++i) idx[i] = i;
  double best = startBest;
  for (bool done = false; !done;) {
    const double f = eval.frobenius(idx);
    if (f > best) best = std::max(best, eval.opNorm());
    // Next combination in lexicographic order.
    Index i = s - 1;
    for (;;) {
      if (idx[i] < n - s + i) {
        ++idx[i];
        for (Index j = i + 1; j < s; ++j) idx[j] = idx[j - 1] + 1;
        break;
      }
      if (i == 0) {
        done = true;
        break;
      }
      --i;
    }
  }
  return best;
}

}  // namespace detail

/// Exact restricted isometry constant of a dense operator over exactly-s-sparse
/// unit vectors: max over |S| = s of || A_S^* A_S - I ||. This is a subset of
/// K_s, hence a certified lower bound for the relaxed-model constant (and the
/// exact value for the canonical model at s = 1).
inline RipEstimate exactCanonicalRip(const Eigen::MatrixXcd& a, Index s) {
  const Eigen::MatrixXcd gram = a.adjoint() * a;
  RipEstimate est;
  est.delta = detail::exactRipFromGram(gram, s);
  est.kind = RipEstimate::Kind::Exact;
  est.method = RipEstimate::Method::Enumeration;
  est.samples = static_cast<Index>(detail::binomialCount(a.cols(), s));
  return est;
}

namespace detail {

/// Uniform interface over group-structured and dense operators.
struct LinearMapView {
  std::function<Eigen::VectorXcd(const SignalVector&)> forward;
  std::function<SignalVector(const Eigen::VectorXcd&)> adjoint;
  Index rows = 0;
  Shape domainShape;
};

inline LinearMapView mapFromOperator(const MeasurementOperator& op) {
  LinearMapView v;
  v.rows = op.m() * op.blockDim();
  v.domainShape = op.group.naturalShape();
  v.forward = [&op](const SignalVector& x) {
    const Eigen::MatrixXcd blocks = applyOperator(op, x);
    return Eigen::VectorXcd(Eigen::Map<const Eigen::VectorXcd>(blocks.data(), blocks.size()));
  };
  v.adjoint = [&op](const Eigen::VectorXcd& y) {
    Eigen::Map<const Eigen::MatrixXcd> blocks(y.data(), op.blockDim(), op.m());
    return applyOperatorAdjoint(op, blocks);
  };
  return v;
}

inline LinearMapView mapFromDense(const Eigen::MatrixXcd& a, Shape domainShape) {
  LinearMapView v;
  v.rows = a.rows();
  v.domainShape = domainShape;
  v.forward = [&a](const SignalVector& x) { return Eigen::VectorXcd(a * x.data); };
  v.adjoint = [&a, domainShape](const Eigen::VectorXcd& y) {
    return SignalVector{Eigen::VectorXcd(a.adjoint() * y), domainShape};
  };
  return v;
}

inline double mapEnergy(const LinearMapView& map, const SignalVector& x) {
  return map.forward(x).squaredNorm();
}

inline double ripObjective(const LinearMapView& map, const SignalVector& x,
                           const Eigen::MatrixXcd* phi) {
  const double quad =
      phi ? std::real(x.data.dot(*phi * x.data)) : x.data.squaredNorm();
  return std::abs(mapEnergy(map, x) - quad);
}

inline RipEstimate monteCarloRipImpl(const LinearMapView& map, const SparsityModel& model,
                                     double s, Index trials, Rng rng,
                                     const Eigen::MatrixXcd* phi) {
  if (trials < 1) throw std::invalid_argument("monteCarloRip: need trials >= 1");
  RipEstimate est;
  est.method = RipEstimate::Method::MonteCarlo;
  est.kind = RipEstimate::Kind::LowerBound;
  est.seed = rng.seed();
  for (Index t = 0; t < trials; ++t) {
    const SparseSample sample = sampleSparse(model, s, rng);
    est.delta = std::max(est.delta, ripObjective(map, sample.vector, phi));
  }
  est.samples = trials;
  return est;
}

/// Model-specific feasibility step: pull the iterate back into K_s (and onto
/// the unit sphere).
inline SignalVector ripFeasible(const SparsityModel& model, double s, const SignalVector& x) {
  Eigen::VectorXcd v = x.data;
  switch (model.kind()) {
    case ModelKind::CanonicalL1: {
      const Index keep = std::min<Index>(v.size(), std::max<Index>(1, static_cast<Index>(s)));
      std::vector<Index> order(v.size());
      for (Index i = 0; i < v.size(); ++i) order[i] = i;
      std::nth_element(order.begin(), order.begin() + keep - 1, order.end(),
                       [&](Index l, Index r) { return std::norm(v[l]) > std::norm(v[r]); });
      Eigen::VectorXcd out = Eigen::VectorXcd::Zero(v.size());
      for (Index i = 0; i < keep; ++i) out[order[i]] = v[order[i]];
      const double nv = out.norm();
      return SignalVector{nv > 0 ? Eigen::VectorXcd(out / nv) : out, x.shape};
    }
    case ModelKind::SchattenBall: {
      const Index n = model.baseDim();
      const Index rank = std::min<Index>(n, std::max<Index>(1, static_cast<Index>(s)));
      Eigen::Map<const Eigen::MatrixXcd> m(v.data(), n, n);
      Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
      Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(n, n);
      for (Index r = 0; r < rank; ++r)
        out += svd.singularValues()[r] * svd.matrixU().col(r) * svd.matrixV().col(r).adjoint();
      const double nv = out.norm();
      if (nv > 0) out /= nv;
      return SignalVector{Eigen::Map<const Eigen::VectorXcd>(out.data(), out.size()), x.shape};
    }
    case ModelKind::TensorHull: {
      const double nx = v.norm();
      if (nx == 0) return x;
      const NormBounds nb = normX(model, x);
      if (nb.upper <= std::sqrt(s) * nx * (1 + 1e-12)) {
        return SignalVector{Eigen::VectorXcd(v / nx), x.shape};
      }
      // Round to the nearest unit rank-1 tensor (always inside K_1).
      const RankOneFit fit = rankOneMax(v, model.baseDim(), model.order(), 4, 60);
      Eigen::VectorXcd out = rankOneTensor(model.baseDim(), model.order(), fit.factors);
      const cplx c = fit.coefficient;
      if (std::abs(c) > 0) out *= c / std::abs(c);
      return SignalVector{std::move(out), x.shape};
    }
    case ModelKind::AtomicPolytope: {
      // Blend toward the dominant atom until the gauge certificate clears.
      const double nx = v.norm();
      if (nx == 0) return x;
      Eigen::VectorXcd unit = v / nx;
      const double target = std::sqrt(s);
      for (int iter = 0; iter < 8; ++iter) {
        const NormBounds nb = normX(model, SignalVector{unit, x.shape});
        if (nb.upper <= target * (1 + 1e-12)) break;
        Index bestAtom = 0;
        double bestCorr = -1.0;
        for (std::size_t j = 0; j < model.atoms().size(); ++j) {
          const double corr = std::abs(model.atoms()[j].dot(unit));
          if (corr > bestCorr) {
            bestCorr = corr;
            bestAtom = static_cast<Index>(j);
          }
        }
        const cplx phase = model.atoms()[bestAtom].dot(unit);
        const cplx rot = std::abs(phase) > 0 ? phase / std::abs(phase) : cplx(1, 0);
        unit = 0.5 * unit + 0.5 * rot * model.atoms()[bestAtom];
        const double nu = unit.norm();
        if (nu > 0) unit /= nu;
      }
      return SignalVector{unit, x.shape};
    }
  }
  return x;
}

inline double operatorNormSqEstimate(const LinearMapView& map, Index n) {
  SignalVector x{Eigen::VectorXcd::Ones(n) / std::sqrt(double(n)), map.domainShape};
  double lambda = 1.0;
  for (int it = 0; it < 30; ++it) {
    const SignalVector y = map.adjoint(map.forward(x));
    const double ny = y.norm();
    if (ny <= 1e-300) break;
    lambda = ny;
    x = SignalVector{Eigen::VectorXcd(y.data / ny), map.domainShape};
  }
  return lambda;
}

inline RipEstimate ascentRipImpl(const LinearMapView& map, const SparsityModel& model, double s,
                                 Index restarts, int steps, Rng rng,
                                 const Eigen::MatrixXcd* phi) {
  RipEstimate est;
  est.method = RipEstimate::Method::Ascent;
  est.kind = RipEstimate::Kind::LowerBound;
  est.seed = rng.seed();
  est.samples = restarts;
  if (restarts < 1) {
    est.degenerate = true;
    return est;
  }
  const double step0 = 1.0 / std::max(1e-12, operatorNormSqEstimate(map, model.dimension()));
  for (Index r = 0; r < restarts; ++r) {
    SignalVector x = sampleSparse(model, s, rng).vector;
    double obj = ripObjective(map, x, phi);
    est.delta = std::max(est.delta, obj);
    for (int it = 0; it < steps; ++it) {
      const Eigen::VectorXcd ax = map.forward(x);
      const double energy = ax.squaredNorm();
      SignalVector grad = map.adjoint(ax);
      const double direction = energy >= 1.0 ? 1.0 : -1.0;
      Eigen::VectorXcd dir = direction * grad.data;
      dir -= x.data.dot(dir) * x.data;  // tangent projection keeps |x| fixed
      const double nd = dir.norm();
      if (nd <= 1e-14) break;
      bool accepted = false;
      double t = step0;
      for (int bt = 0; bt < 30; ++bt, t *= 0.5) {
        SignalVector cand{Eigen::VectorXcd(x.data + t * dir), x.shape};
        cand = ripFeasible(model, s, cand);
        // The polytope pull-back is heuristic; discard steps that leave K_s
        // so the estimate stays a certified lower bound.
        if (model.kind() == ModelKind::AtomicPolytope &&
            normX(model, cand).upper > std::sqrt(s) * (1 + 1e-9))
          continue;
        const double candObj = ripObjective(map, cand, phi);
        if (candObj > obj * (1 + 1e-14) + 1e-15) {
          x = std::move(cand);
          obj = candObj;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    est.delta = std::max(est.delta, obj);
  }
  return est;
}

}  // namespace detail

/// Sampled lower bound: max over `trials` draws from K_s of the RIP deviation
/// |  ||Ax||^2 - <x, Phi x> |, Phi = Id unless injected.
inline RipEstimate monteCarloRip(const MeasurementOperator& op, const SparsityModel& model,
                                 double s, Index trials, Rng rng,
                                 const Eigen::MatrixXcd* phi = nullptr) {
  if (model.dimension() != op.dimension())
    throw std::invalid_argument("monteCarloRip: model/operator dimension mismatch");
  return detail::monteCarloRipImpl(detail::mapFromOperator(op), model, s, trials, rng, phi);
}

inline RipEstimate monteCarloRipDense(const Eigen::MatrixXcd& a, const SparsityModel& model,
                                      double s, Index trials, Rng rng,
                                      const Eigen::MatrixXcd* phi = nullptr) {
  if (model.dimension() != a.cols())
    throw std::invalid_argument("monteCarloRipDense: model/operator dimension mismatch");
  return detail::monteCarloRipImpl(detail::mapFromDense(a, model.shape()), model, s, trials,
                                   rng, phi);
}

/// Projected-ascent lower bound: gradient steps on ||Ax||^2 with backtracking
/// line search (0.5 shrink, initial step 1/||A||^2), followed by a model
/// feasibility step. Restart starting points consume the same sampler stream
/// as monteCarloRip, so equal budgets share draws.
inline RipEstimate ascentRip(const MeasurementOperator& op, const SparsityModel& model, double s,
                             Index restarts, int steps, Rng rng,
                             const Eigen::MatrixXcd* phi = nullptr) {
  if (model.dimension() != op.dimension())
    throw std::invalid_argument("ascentRip: model/operator dimension mismatch");
  return detail::ascentRipImpl(detail::mapFromOperator(op), model, s, restarts, steps, rng, phi);
}

inline RipEstimate ascentRipDense(const Eigen::MatrixXcd& a, const SparsityModel& model, double s,
                                  Index restarts, int steps, Rng rng,
                                  const Eigen::MatrixXcd* phi = nullptr) {
  if (model.dimension() != a.cols())
    throw std::invalid_argument("ascentRipDense: model/operator dimension mismatch");
  return detail::ascentRipImpl(detail::mapFromDense(a, model.shape()), model, s, restarts, steps,
                               rng, phi);
}

/// Real Gaussian operator (1/sqrt(m)) with i.i.d. N(0,1) rows, the baseline
/// the group-structured construction is compared against.
inline Eigen::MatrixXcd drawGaussianDense(Index n, Index m, Rng& rng) {
  Eigen::MatrixXcd a(m, n);
  const double s = 1.0 / std::sqrt(double(m));
  for (Index r = 0; r < m; ++r)
    for (Index c = 0; c < n; ++c) a(r, c) = cplx(s * rng.gaussian(), 0.0);
  return a;
}

struct ScalingConfig {
  enum class Method { ExactCanonical, MonteCarlo, Ascent };
  enum class OperatorKind { GroupStructured, GaussianDense };

  GroupDescriptor group = GroupDescriptor::heisenbergWeyl(1);
  Instrument instrument = Instrument::functionalRow(Eigen::VectorXcd::Ones(1));
  SparsityModel model = SparsityModel::canonicalL1(1);
  OperatorKind operatorKind = OperatorKind::GroupStructured;
  // Redraw a Gaussian instrument per operator draw (the single-eta orbit
  // scheme treats eta as part of the operator randomness).
  bool instrumentPerRedraw = false;
  bool instrumentNormalize = true;
  std::vector<double> sList;
  std::vector<Index> mList;
  Index redraws = 20;
  Index trials = 200;  // per-estimate budget for sampling methods
  int ascentSteps = 25;
  Method method = Method::ExactCanonical;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct ScalingRow {
  double s = 0;
  Index m = 0;
  Index redraws = 0;
  Index trials = 0;
  double median = 0, q25 = 0, q75 = 0;
};

namespace detail {

inline double quantileSorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  const double h = p * double(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double w = h - double(lo);
  return sorted[lo] * (1.0 - w) + sorted[hi] * w;
}

}  // namespace detail

/// Redraw/estimate sweep over (s, m). One operator is drawn per (m, redraw)
/// work item and evaluated at every s, so per-draw monotonicity in s carries
/// over to the reported medians. Work items run in parallel with stream RNGs
/// derived from the master seed; output is thread-count invariant.
inline std::vector<ScalingRow> scalingExperiment(const ScalingConfig& cfg) {
  if (cfg.sList.empty() || cfg.mList.empty() || cfg.redraws < 1)
    throw std::invalid_argument("scalingExperiment: empty grid");
  const std::size_t items = cfg.mList.size() * static_cast<std::size_t>(cfg.redraws);
  // values[(mIdx * |s| + sIdx) * redraws + r]
  std::vector<double> values(items * cfg.sList.size(), 0.0);

  std::vector<double> sSorted = cfg.sList;
  std::sort(sSorted.begin(), sSorted.end());

  parallelForItems(items, cfg.threads, [&](std::size_t item) {
    const std::size_t mIdx = item / cfg.redraws;
    const std::size_t redraw = item % cfg.redraws;
    const Index m = cfg.mList[mIdx];
    Rng drawRng = Rng::stream(cfg.seed, {0xd7a3u, mIdx, redraw});

    Eigen::MatrixXcd dense;
    MeasurementOperator op{cfg.group, cfg.instrument, {}};
    const bool gaussian = cfg.operatorKind == ScalingConfig::OperatorKind::GaussianDense;
    if (gaussian) {
      dense = drawGaussianDense(cfg.model.dimension(), m, drawRng);
    } else {
      Instrument instrument =
          cfg.instrumentPerRedraw
              ? Instrument::gaussianRow(cfg.group.dimension(), drawRng, cfg.instrumentNormalize)
              : cfg.instrument;
      op = drawOperator(cfg.group, std::move(instrument), m, drawRng);
      if (cfg.method == ScalingConfig::Method::ExactCanonical) dense = densifyOperator(op);
    }

    Eigen::MatrixXcd gram;
    if (cfg.method == ScalingConfig::Method::ExactCanonical) gram = dense.adjoint() * dense;

    double prevDelta = 0.0;  // exact delta is nondecreasing in s
    for (double s : sSorted) {
      const std::size_t sIdx = static_cast<std::size_t>(
          std::find(cfg.sList.begin(), cfg.sList.end(), s) - cfg.sList.begin());
      double delta = 0.0;
      Rng estRng = Rng::stream(cfg.seed, {0xe571u, mIdx, redraw, sIdx});
      switch (cfg.method) {
        case ScalingConfig::Method::ExactCanonical:
          delta = detail::exactRipFromGram(gram, static_cast<Index>(s), prevDelta);
          prevDelta = delta;
          break;
        case ScalingConfig::Method::MonteCarlo:
          delta = gaussian
                      ? monteCarloRipDense(dense, cfg.model, s, cfg.trials, estRng).delta
                      : monteCarloRip(op, cfg.model, s, cfg.trials, estRng).delta;
          break;
        case ScalingConfig::Method::Ascent:
          delta = gaussian ? ascentRipDense(dense, cfg.model, s, cfg.trials, cfg.ascentSteps,
                                            estRng)
                                 .delta
                           : ascentRip(op, cfg.model, s, cfg.trials, cfg.ascentSteps, estRng)
                                 .delta;
          break;
      }
      values[(mIdx * cfg.sList.size() + sIdx) * cfg.redraws + redraw] = delta;
    }
  });

  std::vector<ScalingRow> rows;
  for (std::size_t sIdx = 0; sIdx < cfg.sList.size(); ++sIdx) {
    for (std::size_t mIdx = 0; mIdx < cfg.mList.size(); ++mIdx) {
      std::vector<double> cell(cfg.redraws);
      for (Index r = 0; r < cfg.redraws; ++r)
        cell[r] = values[(mIdx * cfg.sList.size() + sIdx) * cfg.redraws + r];
      std::sort(cell.begin(), cell.end());
      ScalingRow row;
      row.s = cfg.sList[sIdx];
      row.m = cfg.mList[mIdx];
      row.redraws = cfg.redraws;
      row.trials = cfg.method == ScalingConfig::Method::ExactCanonical ? 0 : cfg.trials;
      row.median = detail::quantileSorted(cell, 0.5);
      row.q25 = detail::quantileSorted(cell, 0.25);
      row.q75 = detail::quantileSorted(cell, 0.75);
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace riplab
