#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "riplab/groups.hpp"
#include "riplab/rng.hpp"
#include "riplab/signal.hpp"
#include "riplab/sparsity.hpp"

namespace riplab {

enum class InstrumentKind { FunctionalRow, BlockMap, GaussianRow };

/// Measurement instrument u : H -> l_2^blockDim. Construction rescales so
/// that tr(u^*u) = N (for a functional row, ||eta||_2 = sqrt(N)); the
/// `rescaled` flag records that the input was off-normalization. Pass
/// normalize = false to keep an intentionally unnormalized instrument.
class Instrument {
 public:
  static Instrument functionalRow(Eigen::VectorXcd eta, bool normalize = true) {
    Instrument u;
    u.kind_ = InstrumentKind::FunctionalRow;
    u.eta_ = std::move(eta);
    if (normalize) u.normalizeTrace();
    return u;
  }

  /// Row of recorded i.i.d. standard normal entries.
  static Instrument gaussianRow(Index n, Rng& rng, bool normalize = true) {
    Eigen::VectorXcd eta(n);
    for (Index i = 0; i < n; ++i) eta[i] = cplx(rng.gaussian(), 0.0);
    Instrument u = functionalRow(std::move(eta), normalize);
    u.kind_ = InstrumentKind::GaussianRow;
    return u;
  }

  static Instrument blockMap(Eigen::MatrixXcd map, bool normalize = true) {
    if (map.rows() < 1 || map.cols() < 1)
      throw std::invalid_argument("blockMap: empty measurement map");
    Instrument u;
    u.kind_ = InstrumentKind::BlockMap;
    u.map_ = std::move(map);
    if (normalize) u.normalizeTrace();
    return u;
  }

  InstrumentKind kind() const { return kind_; }
  bool isFunctional() const { return kind_ != InstrumentKind::BlockMap; }
  bool wasRescaled() const { return rescaled_; }

  Index dimension() const { return isFunctional() ? eta_.size() : map_.cols(); }
  Index blockDim() const { return isFunctional() ? 1 : map_.rows(); }

  const Eigen::VectorXcd& eta() const {
    if (!isFunctional()) throw std::logic_error("Instrument: eta on a block map");
    return eta_;
  }

  /// u(x).
  Eigen::VectorXcd apply(const Eigen::VectorXcd& x) const {
    if (x.size() != dimension()) throw std::invalid_argument("Instrument: dimension mismatch");
    if (isFunctional()) {
      Eigen::VectorXcd out(1);
      out[0] = eta_.dot(x);
      return out;
    }
    return map_ * x;
  }

  /// u^*(y) for a block of measurements y.
  Eigen::VectorXcd applyAdjoint(const Eigen::VectorXcd& y) const {
    if (y.size() != blockDim()) throw std::invalid_argument("Instrument: block mismatch");
    if (isFunctional()) return eta_ * y[0];
    return map_.adjoint() * y;
  }

  /// Dense blockDim x N matrix of u.
  Eigen::MatrixXcd denseMap() const {
    if (isFunctional()) return eta_.adjoint();
    return map_;
  }

  /// u^* u as an N x N matrix.
  Eigen::MatrixXcd gram() const {
    if (isFunctional()) return eta_ * eta_.adjoint();
    return map_.adjoint() * map_;
  }

  double traceGram() const {
    return isFunctional() ? eta_.squaredNorm() : map_.squaredNorm();
  }

 private:
  Instrument() = default;

  void normalizeTrace() {
    const double n = static_cast<double>(dimension());
    const double tr = traceGram();
    if (tr <= 0.0) throw std::invalid_argument("Instrument: zero map cannot be normalized");
    if (std::abs(tr - n) > 1e-9 * n) {
      const double f = std::sqrt(n / tr);
      if (isFunctional())
        eta_ *= f;
      else
        map_ *= f;
      rescaled_ = true;
    }
  }

  InstrumentKind kind_ = InstrumentKind::FunctionalRow;
  Eigen::VectorXcd eta_;
  Eigen::MatrixXcd map_;
  bool rescaled_ = false;
};

/// Sampled group-structured operator A = (1/sqrt(m)) (u sigma(g_j))_{j<m}.
/// Elements are recorded so a run can be replayed exactly.
struct MeasurementOperator {
  GroupDescriptor group;
  Instrument instrument;
  std::vector<GroupElement> elements;

  Index m() const { return static_cast<Index>(elements.size()); }
  double scale() const { return 1.0 / std::sqrt(static_cast<double>(m())); }
  Index dimension() const { return group.dimension(); }
  Index blockDim() const { return instrument.blockDim(); }
};

inline MeasurementOperator operatorFromElements(GroupDescriptor group, Instrument instrument,
                                                std::vector<GroupElement> elements) {
  if (instrument.dimension() != group.dimension())
    throw std::invalid_argument("operatorFromElements: instrument/group dimension mismatch");
  if (elements.empty()) throw std::invalid_argument("operatorFromElements: need m >= 1");
  for (const auto& e : elements) detail::checkElement(group, e);
  return {std::move(group), std::move(instrument), std::move(elements)};
}

inline MeasurementOperator drawOperator(const GroupDescriptor& group, Instrument instrument,
                                        Index m, Rng& rng) {
  if (m < 1) throw std::invalid_argument("drawOperator: need m >= 1");
  std::vector<GroupElement> elements;
  elements.reserve(m);
  for (Index j = 0; j < m; ++j) elements.push_back(sampleHaar(group, rng));
  return operatorFromElements(group, std::move(instrument), std::move(elements));
}

/// A x as blockDim x m blocks (column j is the j-th measurement block).
inline Eigen::MatrixXcd applyOperator(const MeasurementOperator& op, const SignalVector& x) {
  if (x.size() != op.dimension())
    throw std::invalid_argument("applyOperator: signal dimension mismatch");
  Eigen::MatrixXcd out(op.blockDim(), op.m());
  const double s = op.scale();
  for (Index j = 0; j < op.m(); ++j)
    out.col(j) = s * op.instrument.apply(apply(op.group, op.elements[j], x).data);
  return out;
}

/// ||A x||^2.
inline double measuredEnergy(const MeasurementOperator& op, const SignalVector& x) {
  return applyOperator(op, x).squaredNorm();
}

/// A^* y for blocks y (blockDim x m).
inline SignalVector applyOperatorAdjoint(const MeasurementOperator& op,
                                         const Eigen::MatrixXcd& blocks) {
  if (blocks.rows() != op.blockDim() || blocks.cols() != op.m())
    throw std::invalid_argument("applyOperatorAdjoint: block shape mismatch");
  const Shape shape = op.group.naturalShape();
  Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(op.dimension());
  for (Index j = 0; j < op.m(); ++j) {
    const Eigen::VectorXcd lifted = op.instrument.applyAdjoint(blocks.col(j));
    acc += adjointApply(op.group, op.elements[j], SignalVector{lifted, shape}).data;
  }
  return SignalVector{Eigen::VectorXcd(op.scale() * acc), shape};
}

/// Dense (m * blockDim) x N matrix of A, rows grouped by measurement block.
inline Eigen::MatrixXcd densifyOperator(const MeasurementOperator& op) {
  const Index n = op.dimension();
  const Index d = op.blockDim();
  Eigen::MatrixXcd a(op.m() * d, n);
  const Shape shape = op.group.naturalShape();
  for (Index k = 0; k < n; ++k) {
    const Eigen::MatrixXcd col = applyOperator(op, SignalVector::basis(n, k, shape));
    for (Index j = 0; j < op.m(); ++j) a.block(j * d, k, d, 1) = col.col(j);
  }
  return a;
}

/// Incoherence ||u : X -> l_2^blockDim||. Group invariance of K makes the
/// value independent of the sampled element. Schatten and tensor models are
/// supported for functional rows, where the norm is the model dual norm of
/// eta; the tensor value is a certified enclosure rather than exact.
inline NormBounds incoherence(const SparsityModel& model, const Instrument& instrument,
                              const GroupDescriptor& group) {
  if (instrument.dimension() != group.dimension() ||
      model.dimension() != group.dimension())
    throw std::invalid_argument("incoherence: dimension mismatch");
  switch (model.kind()) {
    case ModelKind::CanonicalL1: {
      const Eigen::MatrixXcd u = instrument.denseMap();
      double best = 0.0;
      for (Index j = 0; j < u.cols(); ++j) best = std::max(best, u.col(j).norm());
      return NormBounds::exactly(best);
    }
    case ModelKind::AtomicPolytope: {
      double best = 0.0;
      for (const auto& a : model.atoms())
        best = std::max(best, instrument.apply(a).norm());
      return NormBounds::exactly(best);
    }
    case ModelKind::SchattenBall:
    case ModelKind::TensorHull: {
      if (!instrument.isFunctional())
        throw std::invalid_argument(
            "incoherence: Schatten/tensor models require a functional-row instrument");
      return dualNorm(model, SignalVector{instrument.eta(), model.shape()});
    }
  }
  throw std::logic_error("incoherence: unreachable");
}

/// Square-function incoherence for a functional row on the Schatten model:
/// || (eta^* eta)^{1/2} ||_{q'} + || (eta eta^*)^{1/2} ||_{q'}.
inline double schattenSquareIncoherence(const Instrument& instrument, Index n, double qPrime) {
  if (!instrument.isFunctional())
    throw std::invalid_argument("schattenSquareIncoherence: needs a functional row");
  if (instrument.dimension() != n * n)
    throw std::invalid_argument("schattenSquareIncoherence: eta is not an n x n matrix");
  Eigen::Map<const Eigen::MatrixXcd> eta(instrument.eta().data(), n, n);
  const Eigen::VectorXd sv = Eigen::JacobiSVD<Eigen::MatrixXcd>(eta).singularValues();
  // Both square functions have the same singular values for a single row.
  return 2.0 * detail::schattenNorm(sv, qPrime);
}

struct CovarianceResult {
  Eigen::MatrixXcd phi;
  double deviationFromIdentity = 0.0;  // ||phi - Id||_op
  double operatorNorm = 0.0;           // ||phi||_op
};

namespace detail {

inline CovarianceResult covarianceFromPhi(Eigen::MatrixXcd phi) {
  CovarianceResult r;
  const Eigen::MatrixXcd herm = 0.5 * (phi + phi.adjoint());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(herm);
  r.operatorNorm = es.eigenvalues().cwiseAbs().maxCoeff();
  r.deviationFromIdentity =
      (es.eigenvalues().array() - 1.0).abs().maxCoeff();
  r.phi = std::move(phi);
  return r;
}

}  // namespace detail

/// Exact covariance Phi = avg_g sigma(g)^* u^* u sigma(g) with the distance
/// to the identity; equals Id whenever the instrument is trace-normalized
/// and the representation is isotropic.
inline CovarianceResult covariance(const GroupDescriptor& group, const Instrument& instrument) {
  if (instrument.dimension() != group.dimension())
    throw std::invalid_argument("covariance: dimension mismatch");
  return detail::covarianceFromPhi(conjugationAverage(group, instrument.gram()));
}

/// Monte Carlo covariance over `trials` Haar draws.
inline CovarianceResult covarianceMC(const GroupDescriptor& group, const Instrument& instrument,
                                     Index trials, Rng& rng) {
  if (instrument.dimension() != group.dimension())
    throw std::invalid_argument("covarianceMC: dimension mismatch");
  return detail::covarianceFromPhi(
      conjugationAverageMC(group, instrument.gram(), trials, rng));
}

}  // namespace riplab
