#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <map>
#include <memory>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "riplab/lp.hpp"
#include "riplab/nets.hpp"
#include "riplab/rng.hpp"
#include "riplab/signal.hpp"
#include "riplab/tensor_ops.hpp"

namespace riplab {

enum class ModelKind { CanonicalL1, AtomicPolytope, SchattenBall, TensorHull };

struct SamplerError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Convex body K and its gauge norm. Four concrete families:
///  - CanonicalL1: K = B_1^N
///  - AtomicPolytope: K = absconv of M atoms in B_2^N (real coefficients)
///  - SchattenBall: K = unit ball of S_q^{n,n}, 1 <= q <= 2
///  - TensorHull: K = absconv of unit rank-1 tensors in (C^n)^{(x)d}
class SparsityModel {
 public:
  static SparsityModel canonicalL1(Index n) {
    if (n < 1) throw std::invalid_argument("canonicalL1: n must be >= 1");
    SparsityModel m;
    m.kind_ = ModelKind::CanonicalL1;
    m.n_ = n;
    return m;
  }

  static SparsityModel atomicPolytope(std::vector<Eigen::VectorXcd> atoms) {
    if (atoms.empty()) throw std::invalid_argument("atomicPolytope: need at least one atom");
    const Index n = atoms.front().size();
    for (const auto& a : atoms) {
      if (a.size() != n) throw std::invalid_argument("atomicPolytope: atom length mismatch");
      if (a.norm() > 1.0 + 1e-9)
        throw std::invalid_argument("atomicPolytope: atoms must lie in the unit l2 ball");
    }
    if (static_cast<double>(atoms.size()) * static_cast<double>(n) > 1e6)
      throw std::invalid_argument("atomicPolytope: M*N exceeds the 1e6 desk-scale limit");
    SparsityModel m;
    m.kind_ = ModelKind::AtomicPolytope;
    m.n_ = n;
    m.atoms_ = std::move(atoms);
    return m;
  }

  static SparsityModel schattenBall(Index n, double q) {
    if (n < 1) throw std::invalid_argument("schattenBall: n must be >= 1");
    if (q < 1.0 || q > 2.0)
      throw std::invalid_argument("schattenBall: q must be in [1,2] so the unit ball embeds in B_2");
    SparsityModel m;
    m.kind_ = ModelKind::SchattenBall;
    m.n_ = n;
    m.q_ = q;
    return m;
  }

  static SparsityModel tensorHull(Index n, int order) {
    if (n < 1 || order < 1) throw std::invalid_argument("tensorHull: invalid parameters");
    SparsityModel m;
    m.kind_ = ModelKind::TensorHull;
    m.n_ = n;
    m.order_ = order;
    return m;
  }

  ModelKind kind() const { return kind_; }
  Index baseDim() const { return n_; }
  int order() const { return order_; }
  double schattenQ() const { return q_; }
  const std::vector<Eigen::VectorXcd>& atoms() const { return atoms_; }

  Shape shape() const {
    switch (kind_) {
      case ModelKind::CanonicalL1:
      case ModelKind::AtomicPolytope:
        return Shape::flat(n_);
      case ModelKind::SchattenBall:
        return Shape::matrix(n_);
      case ModelKind::TensorHull:
        return Shape::tensor(n_, order_);
    }
    return Shape::flat(n_);
  }

  Index dimension() const { return shape().size(); }

 private:
  SparsityModel() = default;
  ModelKind kind_ = ModelKind::CanonicalL1;
  Index n_ = 0;
  int order_ = 1;
  double q_ = 1.0;
  std::vector<Eigen::VectorXcd> atoms_;
};

/// Norm value or a certified [lower, upper] enclosure when the exact value is
/// intractable (tensor hull).
struct NormBounds {
  double lower = 0.0;
  double upper = 0.0;
  bool exact = true;

  static NormBounds exactly(double v) { return {v, v, true}; }
  double value() const {
    if (!exact) throw std::logic_error("NormBounds: value requested from a non-exact enclosure");
    return upper;
  }
};

enum class Ternary { True, False, Indeterminate };

namespace detail {

inline void checkShape(const SparsityModel& model, const SignalVector& x, const char* what) {
  if (x.size() != model.dimension())
    throw std::invalid_argument(std::string(what) + ": signal length does not match the model");
}

inline Eigen::VectorXd singularValues(const SignalVector& x, Index n) {
  Eigen::Map<const Eigen::MatrixXcd> m(x.data.data(), n, n);
  return Eigen::JacobiSVD<Eigen::MatrixXcd>(m).singularValues();
}

inline double schattenNorm(const Eigen::VectorXd& sv, double q) {
  if (std::isinf(q)) return sv.size() ? sv.maxCoeff() : 0.0;
  double s = 0.0;
  for (Index i = 0; i < sv.size(); ++i) s += std::pow(sv[i], q);
  return std::pow(s, 1.0 / q);
}

/// Atomic gauge over real combination coefficients as a standard-form LP:
/// min sum(c+ + c-) s.t. sum_i (c+_i - c-_i) a_i = x. The complex equality
/// splits into real and imaginary rows. Returns +inf when x is outside the
/// real span of the atoms.
inline double polytopeNormLp(const std::vector<Eigen::VectorXcd>& atoms,
                             const Eigen::VectorXcd& x) {
  const Index m = static_cast<Index>(atoms.size());
  const Index n = x.size();
  Eigen::MatrixXd a(2 * n, 2 * m);
  for (Index j = 0; j < m; ++j) {
    a.col(j).head(n) = atoms[j].real();
    a.col(j).tail(n) = atoms[j].imag();
    a.col(m + j) = -a.col(j);
  }
  Eigen::VectorXd b(2 * n);
  b.head(n) = x.real();
  b.tail(n) = x.imag();
  const LpResult r = SimplexLp(a, b, Eigen::VectorXd::Ones(2 * m)).solve();
  return r.feasible ? r.objective : std::numeric_limits<double>::infinity();
}

/// Cached admissible tensor atom set for dual-norm upper bounds; epsilon sits
/// at the top of the admissible window (3 eps = 1/d) to keep the net small.
inline const TensorAtomSet* cachedTensorAtoms(Index n, int order) {
  if (n > 3 || order > 4) return nullptr;  // net route reserved for desk sizes
  static std::mutex mu;
  static std::map<std::pair<Index, int>, std::unique_ptr<TensorAtomSet>> cache;
  std::lock_guard<std::mutex> lock(mu);
  const auto key = std::make_pair(n, order);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second.get();
  try {
    const double eps = 1.0 / (3.0 * order);
    SphereNet net = sphereNet(n, eps, Rng(0x9e7f00d5u + 1315423911u * order + n));
    auto atoms = std::make_unique<TensorAtomSet>(tensorAtoms(std::move(net), order));
    if (atoms->cardinality() > 1e7) {
      cache.emplace(key, nullptr);
      return nullptr;
    }
    return cache.emplace(key, std::move(atoms)).first->second.get();
  } catch (const NetBudgetError&) {
    cache.emplace(key, nullptr);
    return nullptr;
  }
}

inline bool isRealVector(const Eigen::VectorXcd& v) {
  for (Index i = 0; i < v.size(); ++i)
    if (std::abs(v[i].imag()) > 1e-14 * (1.0 + std::abs(v[i].real()))) return false;
  return true;
}

}  // namespace detail

/// Dual norm ||eta||_{X*} = sup_{x in K} |<eta, x>|.
inline NormBounds dualNorm(const SparsityModel& model, const SignalVector& eta) {
  detail::checkShape(model, eta, "dualNorm");
  switch (model.kind()) {
    case ModelKind::CanonicalL1:
      return NormBounds::exactly(eta.data.cwiseAbs().maxCoeff());
    case ModelKind::AtomicPolytope: {
      double best = 0.0;
      for (const auto& a : model.atoms()) best = std::max(best, std::abs(a.dot(eta.data)));
      return NormBounds::exactly(best);
    }
    case ModelKind::SchattenBall: {
      const double q = model.schattenQ();
      const double qPrime = q == 1.0 ? std::numeric_limits<double>::infinity() : q / (q - 1.0);
      return NormBounds::exactly(
          detail::schattenNorm(detail::singularValues(eta, model.baseDim()), qPrime));
    }
    case ModelKind::TensorHull: {
      const Index n = model.baseDim();
      const int d = model.order();
      NormBounds b;
      b.exact = false;
      b.lower = rankOneMax(eta.data, n, d, 12, 80).value;
      b.upper = eta.norm();  // |<tensor, eta>| <= ||eta||_2 for unit rank-1 atoms
      if (const TensorAtomSet* atoms = detail::cachedTensorAtoms(n, d)) {
        const double complexExpansion =
            detail::isRealVector(eta.data) ? 1.0 : std::pow(2.0, 0.5 * d);
        try {
          const NetDualNormResult r = netDualNormEnumerate(eta.data, *atoms);
          b.upper = std::min(b.upper, complexExpansion * r.value);
        } catch (const NetBudgetError&) {
        }
      }
      if (b.upper < b.lower) b.upper = b.lower;  // guard fp jitter
      b.exact = (b.upper - b.lower) <= 1e-9 * (1.0 + b.upper);
      return b;
    }
  }
  throw std::logic_error("dualNorm: unreachable");
}

/// Gauge norm ||x||_X (Minkowski functional of K).
inline NormBounds normX(const SparsityModel& model, const SignalVector& x) {
  detail::checkShape(model, x, "normX");
  switch (model.kind()) {
    case ModelKind::CanonicalL1:
      return NormBounds::exactly(x.data.cwiseAbs().sum());
    case ModelKind::AtomicPolytope:
      return NormBounds::exactly(detail::polytopeNormLp(model.atoms(), x.data));
    case ModelKind::SchattenBall:
      return NormBounds::exactly(detail::schattenNorm(
          detail::singularValues(x, model.baseDim()), model.schattenQ()));
    case ModelKind::TensorHull: {
      const double scale = x.norm();
      if (scale == 0.0) return NormBounds::exactly(0.0);
      const Index n = model.baseDim();
      const int d = model.order();
      const SignalVector unit{Eigen::VectorXcd(x.data / scale), x.shape};
      NormBounds b;
      b.exact = false;
      const DeflationResult defl = greedyDeflation(unit.data, n, d);
      b.upper = scale * defl.upperBound;
      // Dual pairing with eta = x gives pi(x) >= ||x||_2^2 / inj(x).
      const double injUpper = dualNorm(model, unit).upper;
      b.lower = injUpper > 0 ? scale / injUpper : scale;
      if (b.upper < b.lower) b.upper = b.lower;
      b.exact = (b.upper - b.lower) <= 1e-9 * (1.0 + b.upper);
      return b;
    }
  }
  throw std::logic_error("normX: unreachable");
}

/// (K,s)-sparsity test ||x||_X <= sqrt(s) ||x||_H. Tensor-hull answers may be
/// indeterminate when the enclosure straddles the threshold. The zero vector
/// is sparse at every level.
inline Ternary isSparse(const SparsityModel& model, const SignalVector& x, double s) {
  if (s <= 0.0) throw std::invalid_argument("isSparse: s must be positive");
  const NormBounds nb = normX(model, x);
  const double threshold = std::sqrt(s) * x.norm();
  if (nb.exact) return nb.value() <= threshold ? Ternary::True : Ternary::False;
  if (nb.upper <= threshold) return Ternary::True;
  if (nb.lower > threshold) return Ternary::False;
  return Ternary::Indeterminate;
}

/// Unit-norm element of K_s with a membership certificate
/// (sum |combination coefficients| / pre-normalization l2 norm <= sqrt(s)).
struct SparseSample {
  SignalVector vector;
  double certificate = 0.0;
};

/// Rejection sampler over K_s: draw a few atoms of the model, combine, and
/// accept when the certificate clears sqrt(s).
inline SparseSample sampleSparse(const SparsityModel& model, double s, Rng& rng,
                                 int maxRetries = 1000) {
  if (s < 1.0) throw std::invalid_argument("sampleSparse: s must be >= 1");
  const double rootS = std::sqrt(s) * (1.0 + 1e-12);
  const Index n = model.baseDim();

  for (int attempt = 0; attempt < maxRetries; ++attempt) {
    Eigen::VectorXcd v;
    double coeffL1 = 0.0;
    switch (model.kind()) {
      case ModelKind::CanonicalL1: {
        const Index k = std::min<Index>(n, std::max<Index>(1, static_cast<Index>(s)));
        v = Eigen::VectorXcd::Zero(n);
        for (Index picked = 0; picked < k;) {
          const Index j = static_cast<Index>(rng.uniformIndex(n));
          if (v[j] != cplx(0, 0)) continue;
          cplx c = rng.complexGaussian();
          if (std::abs(c) < 1e-9) c = cplx(1.0, 0.0);
          v[j] = c;
          coeffL1 += std::abs(c);
          ++picked;
        }
        break;
      }
      case ModelKind::AtomicPolytope: {
        const Index m = static_cast<Index>(model.atoms().size());
        const Index k = std::min<Index>(m, std::max<Index>(1, static_cast<Index>(std::ceil(s))));
        v = Eigen::VectorXcd::Zero(n);
        for (Index t = 0; t < k; ++t) {
          const Index j = static_cast<Index>(rng.uniformIndex(m));
          const double c = rng.gaussian();
          v += c * model.atoms()[j];
          coeffL1 += std::abs(c);
        }
        break;
      }
      case ModelKind::SchattenBall: {
        const Index r = std::min<Index>(n, std::max<Index>(1, static_cast<Index>(s)));
        Eigen::MatrixXcd gu(n, r), gv(n, r);
        for (Index i = 0; i < n; ++i)
          for (Index j = 0; j < r; ++j) {
            gu(i, j) = rng.complexGaussian();
            gv(i, j) = rng.complexGaussian();
          }
        const Eigen::MatrixXcd qu =
            Eigen::HouseholderQR<Eigen::MatrixXcd>(gu).householderQ() *
            Eigen::MatrixXcd::Identity(n, r);
        const Eigen::MatrixXcd qv =
            Eigen::HouseholderQR<Eigen::MatrixXcd>(gv).householderQ() *
            Eigen::MatrixXcd::Identity(n, r);
        Eigen::MatrixXcd mat = Eigen::MatrixXcd::Zero(n, n);
        for (Index t = 0; t < r; ++t) {
          cplx c = rng.complexGaussian();
          if (std::abs(c) < 1e-9) c = cplx(1.0, 0.0);
          mat += c * qu.col(t) * qv.col(t).adjoint();
          coeffL1 += std::abs(c);
        }
        v = Eigen::Map<const Eigen::VectorXcd>(mat.data(), mat.size());
        break;
      }
      case ModelKind::TensorHull: {
        const int d = model.order();
        const Index k = std::max<Index>(1, static_cast<Index>(s));
        v = Eigen::VectorXcd::Zero(model.dimension());
        for (Index t = 0; t < k; ++t) {
          std::vector<Eigen::VectorXcd> factors(d);
          for (int l = 0; l < d; ++l) {
            Eigen::VectorXcd f(n);
            for (Index i = 0; i < n; ++i) f[i] = rng.complexGaussian();
            const double nf = f.norm();
            factors[l] = nf > 0 ? (f / nf).eval() : Eigen::VectorXcd::Unit(n, 0).eval();
          }
          cplx c = rng.complexGaussian();
          if (std::abs(c) < 1e-9) c = cplx(1.0, 0.0);
          v += c * rankOneTensor(n, d, factors);
          coeffL1 += std::abs(c);
        }
        break;
      }
    }
    const double nv = v.norm();
    if (nv < 1e-12) continue;
    const double certificate = coeffL1 / nv;
    if (certificate <= rootS)
      return {SignalVector{Eigen::VectorXcd(v / nv), model.shape()}, certificate};
  }
  throw SamplerError("sampleSparse: rejection budget exhausted (s too small for the draw size)");
}

}  // namespace riplab
