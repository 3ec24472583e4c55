#pragma once

#include <Eigen/Dense>
#include <bit>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "riplab/rng.hpp"
#include "riplab/signal.hpp"

namespace riplab {

enum class GroupKind { HeisenbergWeyl, SignShift, PauliTensor, Product, TwoSided };

/// Element index data, variant-matched to the descriptor:
///   HeisenbergWeyl: (a, b) = (modulation l, shift k) in Z_N^2
///   SignShift:      a = shift k, signs = eps in {-1,1}^N
///   PauliTensor:    (a, b) = (z bits, x bits) in Z_2^k each
///   Product/TwoSided: parts = factor elements
struct GroupElement {
  std::int64_t a = 0;
  std::int64_t b = 0;
  std::vector<std::int8_t> signs;
  std::vector<GroupElement> parts;
};

/// A finite group together with an isotropic affine unitary representation.
///
/// Every shipped representation acts by monomial matrices (one nonzero unit
/// modulus entry per column), so actions cost O(N) and exact conjugation
/// averages cost O(N^2) per group element.
class GroupDescriptor {
 public:
  static GroupDescriptor heisenbergWeyl(Index n) {
    if (n < 1) throw std::invalid_argument("heisenbergWeyl: N must be >= 1");
    GroupDescriptor d;
    d.kind_ = GroupKind::HeisenbergWeyl;
    d.n_ = n;
    return d;
  }

  static GroupDescriptor signShift(Index n) {
    if (n < 1) throw std::invalid_argument("signShift: N must be >= 1");
    GroupDescriptor d;
    d.kind_ = GroupKind::SignShift;
    d.n_ = n;
    return d;
  }

  /// Pauli words on k qubits: Z_2^{2k} -> U(2^k).
  static GroupDescriptor pauliTensor(int qubits) {
    if (qubits < 1 || qubits > 30) throw std::invalid_argument("pauliTensor: 1 <= qubits <= 30");
    GroupDescriptor d;
    d.kind_ = GroupKind::PauliTensor;
    d.n_ = qubits;
    return d;
  }

  /// Tensor product action: factor l acts on tensor mode l.
  static GroupDescriptor product(std::vector<GroupDescriptor> factors) {
    if (factors.empty()) throw std::invalid_argument("product: need at least one factor");
    GroupDescriptor d;
    d.kind_ = GroupKind::Product;
    d.factors_ = std::move(factors);
    return d;
  }

  /// Two-sided matrix action of a base group on C^{n x n}:
  /// (g, g') sends X to sigma(g) X sigma(g')^*.
  static GroupDescriptor twoSided(GroupDescriptor base) {
    GroupDescriptor d;
    d.kind_ = GroupKind::TwoSided;
    d.factors_.push_back(std::move(base));
    return d;
  }

  GroupKind kind() const { return kind_; }
  const std::vector<GroupDescriptor>& factors() const { return factors_; }
  const GroupDescriptor& base() const { return factors_.front(); }
  Index param() const { return n_; }
  int qubits() const { return static_cast<int>(n_); }

  Index dimension() const {
    switch (kind_) {
      case GroupKind::HeisenbergWeyl:
      case GroupKind::SignShift:
        return n_;
      case GroupKind::PauliTensor:
        return Index(1) << n_;
      case GroupKind::Product: {
        Index p = 1;
        for (const auto& f : factors_) p *= f.dimension();
        return p;
      }
      case GroupKind::TwoSided:
        return base().dimension() * base().dimension();
    }
    return 0;
  }

  double order() const {
    switch (kind_) {
      case GroupKind::HeisenbergWeyl:
        return double(n_) * double(n_);
      case GroupKind::SignShift:
        return std::ldexp(double(n_), static_cast<int>(n_));  // 2^N * N
      case GroupKind::PauliTensor:
        return std::ldexp(1.0, 2 * static_cast<int>(n_));  // 4^k
      case GroupKind::Product: {
        double p = 1;
        for (const auto& f : factors_) p *= f.order();
        return p;
      }
      case GroupKind::TwoSided:
        return base().order() * base().order();
    }
    return 0;
  }

  Shape naturalShape() const {
    switch (kind_) {
      case GroupKind::HeisenbergWeyl:
      case GroupKind::SignShift:
      case GroupKind::PauliTensor:
        return Shape::flat(dimension());
      case GroupKind::Product: {
        const Index n0 = factors_.front().dimension();
        for (const auto& f : factors_)
          if (f.dimension() != n0) return Shape::flat(dimension());
        return Shape::tensor(n0, static_cast<int>(factors_.size()));
      }
      case GroupKind::TwoSided:
        return Shape::matrix(base().dimension());
    }
    return Shape::flat(dimension());
  }

 private:
  GroupDescriptor() = default;
  GroupKind kind_ = GroupKind::HeisenbergWeyl;
  Index n_ = 1;  // HW/SignShift: N, Pauli: qubit count
  std::vector<GroupDescriptor> factors_;
};

namespace detail {

inline void checkElement(const GroupDescriptor& g, const GroupElement& e) {
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
      if (e.a < 0 || e.a >= g.param() || e.b < 0 || e.b >= g.param())
        throw std::invalid_argument("GroupElement: Heisenberg-Weyl index out of range");
      return;
    case GroupKind::SignShift:
      if (e.a < 0 || e.a >= g.param() || static_cast<Index>(e.signs.size()) != g.param())
        throw std::invalid_argument("GroupElement: sign-shift data out of range");
      return;
    case GroupKind::PauliTensor: {
      const std::int64_t lim = std::int64_t(1) << g.qubits();
      if (e.a < 0 || e.a >= lim || e.b < 0 || e.b >= lim)
        throw std::invalid_argument("GroupElement: Pauli bitstring out of range");
      return;
    }
    case GroupKind::Product:
    case GroupKind::TwoSided: {
      const std::size_t want = g.kind() == GroupKind::Product ? g.factors().size() : 2;
      if (e.parts.size() != want)
        throw std::invalid_argument("GroupElement: wrong number of components");
      for (std::size_t i = 0; i < want; ++i)
        checkElement(g.kind() == GroupKind::Product ? g.factors()[i] : g.base(), e.parts[i]);
      return;
    }
  }
}

// One-dimensional leaf actions on a contiguous buffer of length n.
inline void applyLeaf(const GroupDescriptor& g, const GroupElement& e,
                      const cplx* in, cplx* out, bool adjoint) {
  const Index n = g.dimension();
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      const std::int64_t l = e.a, k = e.b;
      constexpr double twoPi = 6.283185307179586476925286766559;
      if (!adjoint) {
        for (Index r = 0; r < n; ++r) {
          const std::int64_t ph = (l * r) % n;
          out[r] = std::polar(1.0, twoPi * double(ph) / double(n)) * in[(r - k % n + n) % n];
        }
      } else {
        for (Index r = 0; r < n; ++r) {
          const std::int64_t ph = (l * ((r + k) % n)) % n;
          out[r] = std::polar(1.0, -twoPi * double(ph) / double(n)) * in[(r + k) % n];
        }
      }
      return;
    }
    case GroupKind::SignShift: {
      const std::int64_t k = e.a;
      if (!adjoint) {
        for (Index r = 0; r < n; ++r)
          out[r] = double(e.signs[r]) * in[(r - k % n + n) % n];
      } else {
        for (Index r = 0; r < n; ++r)
          out[r] = double(e.signs[(r + k) % n]) * in[(r + k) % n];
      }
      return;
    }
    case GroupKind::PauliTensor: {
      const std::uint64_t z = static_cast<std::uint64_t>(e.a);
      const std::uint64_t x = static_cast<std::uint64_t>(e.b);
      const double global = adjoint && (std::popcount(z & x) & 1) ? -1.0 : 1.0;
      for (Index r = 0; r < n; ++r) {
        const double s = (std::popcount(z & static_cast<std::uint64_t>(r)) & 1) ? -1.0 : 1.0;
        out[r] = global * s * in[static_cast<std::uint64_t>(r) ^ x];
      }
      return;
    }
    default:
      throw std::logic_error("applyLeaf: not a leaf group");
  }
}

// Applies a leaf action along one mode of a flat array.
inline void applyAlongMode(const GroupDescriptor& leaf, const GroupElement& e,
                           Eigen::VectorXcd& v, Index stride, bool adjoint) {
  const Index n = leaf.dimension();
  const Index blockSize = stride * n;
  const Index numBlocks = v.size() / blockSize;
  std::vector<cplx> inBuf(n), outBuf(n);
  for (Index b = 0; b < numBlocks; ++b) {
    for (Index s = 0; s < stride; ++s) {
      const Index off = b * blockSize + s;
      for (Index i = 0; i < n; ++i) inBuf[i] = v[off + i * stride];
      applyLeaf(leaf, e, inBuf.data(), outBuf.data(), adjoint);
      for (Index i = 0; i < n; ++i) v[off + i * stride] = outBuf[i];
    }
  }
}

inline void applyRec(const GroupDescriptor& g, const GroupElement& e, Eigen::VectorXcd& v,
                     bool adjoint);

// Right matrix action X -> X sigma^* (or X sigma for the adjoint): the rows
// of X transform by the conjugated action.
inline void applyRight(const GroupDescriptor& base, const GroupElement& e,
                       Eigen::VectorXcd& v, bool adjoint) {
  const Index n = base.dimension();
  std::vector<cplx> inBuf(n), outBuf(n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) inBuf[c] = std::conj(v[r + n * c]);
    applyLeaf(base, e, inBuf.data(), outBuf.data(), adjoint);
    for (Index c = 0; c < n; ++c) v[r + n * c] = std::conj(outBuf[c]);
  }
}

inline void applyRec(const GroupDescriptor& g, const GroupElement& e, Eigen::VectorXcd& v,
                     bool adjoint) {
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
    case GroupKind::SignShift:
    case GroupKind::PauliTensor:
      applyAlongMode(g, e, v, 1, adjoint);
      return;
    case GroupKind::Product: {
      Index stride = 1;
      for (std::size_t f = 0; f < g.factors().size(); ++f) {
        const GroupDescriptor& leaf = g.factors()[f];
        if (leaf.kind() == GroupKind::Product || leaf.kind() == GroupKind::TwoSided)
          throw std::invalid_argument("apply: nested composite factors are not supported");
        applyAlongMode(leaf, e.parts[f], v, stride, adjoint);
        stride *= leaf.dimension();
      }
      return;
    }
    case GroupKind::TwoSided: {
      const GroupDescriptor& b = g.base();
      if (b.kind() == GroupKind::Product || b.kind() == GroupKind::TwoSided)
        throw std::invalid_argument("apply: nested composite base is not supported");
      // X -> sigma(g1) X sigma(g2)^*; the adjoint is sigma(g1)^* X sigma(g2).
      applyAlongMode(b, e.parts[0], v, 1, adjoint);
      applyRight(b, e.parts[1], v, adjoint);
      return;
    }
  }
}

}  // namespace detail

inline GroupElement identityElement(const GroupDescriptor& g) {
  GroupElement e;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
    case GroupKind::PauliTensor:
      return e;
    case GroupKind::SignShift:
      e.signs.assign(g.param(), 1);
      return e;
    case GroupKind::Product:
      for (const auto& f : g.factors()) e.parts.push_back(identityElement(f));
      return e;
    case GroupKind::TwoSided:
      e.parts = {identityElement(g.base()), identityElement(g.base())};
      return e;
  }
  return e;
}

inline GroupElement sampleHaar(const GroupDescriptor& g, Rng& rng) {
  GroupElement e;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
      e.a = static_cast<std::int64_t>(rng.uniformIndex(g.param()));
      e.b = static_cast<std::int64_t>(rng.uniformIndex(g.param()));
      return e;
    case GroupKind::SignShift:
      e.a = static_cast<std::int64_t>(rng.uniformIndex(g.param()));
      e.signs.resize(g.param());
      for (auto& s : e.signs) s = (rng.nextU64() & 1u) ? 1 : -1;
      return e;
    case GroupKind::PauliTensor: {
      const std::uint64_t lim = std::uint64_t(1) << g.qubits();
      e.a = static_cast<std::int64_t>(rng.uniformIndex(lim));
      e.b = static_cast<std::int64_t>(rng.uniformIndex(lim));
      return e;
    }
    case GroupKind::Product:
      for (const auto& f : g.factors()) e.parts.push_back(sampleHaar(f, rng));
      return e;
    case GroupKind::TwoSided:
      e.parts = {sampleHaar(g.base(), rng), sampleHaar(g.base(), rng)};
      return e;
  }
  return e;
}

/// sigma(g) x, computed in O(N) per leaf action; no dense matrix is formed.
inline SignalVector apply(const GroupDescriptor& g, const GroupElement& e,
                          const SignalVector& x) {
  detail::checkElement(g, e);
  if (x.size() != g.dimension())
    throw std::invalid_argument("apply: signal length does not match the group dimension");
  SignalVector y = x;
  detail::applyRec(g, e, y.data, false);
  return y;
}

/// sigma(g)^* x.
inline SignalVector adjointApply(const GroupDescriptor& g, const GroupElement& e,
                                 const SignalVector& x) {
  detail::checkElement(g, e);
  if (x.size() != g.dimension())
    throw std::invalid_argument("adjointApply: signal length does not match the group dimension");
  SignalVector y = x;
  detail::applyRec(g, e, y.data, true);
  return y;
}

/// Composition with explicit phase tracking:
/// sigma(g) sigma(h) = phase * sigma(gh), |phase| = 1.
inline std::pair<GroupElement, cplx> compose(const GroupDescriptor& g, const GroupElement& lhs,
                                             const GroupElement& rhs) {
  detail::checkElement(g, lhs);
  detail::checkElement(g, rhs);
  GroupElement out;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      const Index n = g.param();
      out.a = (lhs.a + rhs.a) % n;
      out.b = (lhs.b + rhs.b) % n;
      constexpr double twoPi = 6.283185307179586476925286766559;
      const std::int64_t ph = (rhs.a * lhs.b) % n;  // Lambda^l Sh^k relations
      return {out, std::polar(1.0, -twoPi * double(ph) / double(n))};
    }
    case GroupKind::SignShift: {
      const Index n = g.param();
      out.a = (lhs.a + rhs.a) % n;
      out.signs.resize(n);
      for (Index r = 0; r < n; ++r)
        out.signs[r] = static_cast<std::int8_t>(lhs.signs[r] *
                                                rhs.signs[(r - lhs.a % n + n) % n]);
      return {out, cplx(1.0, 0.0)};
    }
    case GroupKind::PauliTensor: {
      out.a = lhs.a ^ rhs.a;
      out.b = lhs.b ^ rhs.b;
      const bool flip = std::popcount(static_cast<std::uint64_t>(rhs.a) &
                                      static_cast<std::uint64_t>(lhs.b)) &
                        1;
      return {out, cplx(flip ? -1.0 : 1.0, 0.0)};
    }
    case GroupKind::Product: {
      cplx phase(1.0, 0.0);
      for (std::size_t f = 0; f < g.factors().size(); ++f) {
        auto [part, ph] = compose(g.factors()[f], lhs.parts[f], rhs.parts[f]);
        out.parts.push_back(std::move(part));
        phase *= ph;
      }
      return {out, phase};
    }
    case GroupKind::TwoSided: {
      auto [left, phL] = compose(g.base(), lhs.parts[0], rhs.parts[0]);
      auto [right, phR] = compose(g.base(), lhs.parts[1], rhs.parts[1]);
      out.parts = {std::move(left), std::move(right)};
      return {out, phL * std::conj(phR)};
    }
  }
  throw std::logic_error("compose: unreachable");
}

inline GroupElement inverseElement(const GroupDescriptor& g, const GroupElement& e) {
  GroupElement out;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      const Index n = g.param();
      out.a = (n - e.a) % n;
      out.b = (n - e.b) % n;
      return out;
    }
    case GroupKind::SignShift: {
      const Index n = g.param();
      out.a = (n - e.a) % n;
      out.signs.resize(n);
      for (Index r = 0; r < n; ++r) out.signs[r] = e.signs[(r + e.a) % n];
      return out;
    }
    case GroupKind::PauliTensor:
      return e;  // self-inverse up to phase
    case GroupKind::Product:
      for (std::size_t f = 0; f < g.factors().size(); ++f)
        out.parts.push_back(inverseElement(g.factors()[f], e.parts[f]));
      return out;
    case GroupKind::TwoSided:
      out.parts = {inverseElement(g.base(), e.parts[0]), inverseElement(g.base(), e.parts[1])};
      return out;
  }
  return out;
}

/// Dense sigma(g) built column-by-column from the fast action.
inline Eigen::MatrixXcd densify(const GroupDescriptor& g, const GroupElement& e) {
  const Index n = g.dimension();
  Eigen::MatrixXcd m(n, n);
  const Shape shape = g.naturalShape();
  for (Index j = 0; j < n; ++j) m.col(j) = apply(g, e, SignalVector::basis(n, j, shape)).data;
  return m;
}

namespace detail {

// sigma(g) as a monomial map: column j carries phase[j] at row perm[j].
struct Monomial {
  std::vector<Index> perm;
  Eigen::VectorXcd phase;
};

inline Monomial leafMonomial(const GroupDescriptor& g, const GroupElement& e) {
  const Index n = g.dimension();
  Monomial m;
  m.perm.resize(n);
  m.phase.resize(n);
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      constexpr double twoPi = 6.283185307179586476925286766559;
      for (Index j = 0; j < n; ++j) {
        const Index row = (j + e.b) % n;
        m.perm[j] = row;
        m.phase[j] = std::polar(1.0, twoPi * double((e.a * row) % n) / double(n));
      }
      return m;
    }
    case GroupKind::SignShift: {
      for (Index j = 0; j < n; ++j) {
        const Index row = (j + e.a) % n;
        m.perm[j] = row;
        m.phase[j] = double(e.signs[row]);
      }
      return m;
    }
    case GroupKind::PauliTensor: {
      const std::uint64_t z = static_cast<std::uint64_t>(e.a);
      const std::uint64_t x = static_cast<std::uint64_t>(e.b);
      for (Index j = 0; j < n; ++j) {
        const std::uint64_t row = static_cast<std::uint64_t>(j) ^ x;
        m.perm[j] = static_cast<Index>(row);
        m.phase[j] = (std::popcount(z & row) & 1) ? -1.0 : 1.0;
      }
      return m;
    }
    default:
      throw std::logic_error("leafMonomial: not a leaf group");
  }
}

// Embeds a factor monomial acting on one mode into the full space.
// conjugated = true encodes the right matrix action X -> X sigma^*.
inline Monomial embedMonomial(const Monomial& leaf, Index stride, Index total,
                              bool conjugated) {
  const Index n = static_cast<Index>(leaf.perm.size());
  Monomial m;
  m.perm.resize(total);
  m.phase.resize(total);
  for (Index j = 0; j < total; ++j) {
    const Index digit = (j / stride) % n;
    const Index rest = j - digit * stride;
    m.perm[j] = rest + leaf.perm[digit] * stride;
    m.phase[j] = conjugated ? std::conj(leaf.phase[digit]) : leaf.phase[digit];
  }
  return m;
}

// avg += sigma^* T sigma for a monomial sigma:
// (sigma^* T sigma)_{i,j} = conj(phase_i) phase_j T_{perm_i, perm_j}.
inline void accumulateConjugation(Eigen::MatrixXcd& avg, const Monomial& m,
                                  const Eigen::MatrixXcd& t) {
  const Index n = avg.rows();
  for (Index j = 0; j < n; ++j) {
    const Index pj = m.perm[j];
    const cplx fj = m.phase[j];
    for (Index i = 0; i < n; ++i)
      avg(i, j) += std::conj(m.phase[i]) * fj * t(m.perm[i], pj);
  }
}

// Exact E_eps D_eps T D_eps along one mode: entries survive only when the
// mode digits agree, then the shift average follows over the same mode.
inline Eigen::MatrixXcd signShiftModeAverage(const Eigen::MatrixXcd& t, Index stride,
                                             Index n) {
  const Index total = t.rows();
  auto digit = [&](Index idx) { return (idx / stride) % n; };
  Eigen::MatrixXcd masked = Eigen::MatrixXcd::Zero(total, total);
  for (Index j = 0; j < total; ++j)
    for (Index i = 0; i < total; ++i)
      if (digit(i) == digit(j)) masked(i, j) = t(i, j);
  // Shift average: conjugate by Sh^k on the mode and take the mean over k.
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(total, total);
  auto shiftIdx = [&](Index idx, Index k) {
    const Index d = digit(idx);
    return idx + ((d + k) % n - d) * stride;
  };
  for (Index k = 0; k < n; ++k)
    for (Index j = 0; j < total; ++j)
      for (Index i = 0; i < total; ++i)
        avg(i, j) += masked(shiftIdx(i, k), shiftIdx(j, k));
  return avg / double(n);
}

inline void enumerateLeaf(const GroupDescriptor& g,
                          const std::function<void(const Monomial&)>& fn) {
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      const Index n = g.param();
      GroupElement e;
      for (e.a = 0; e.a < n; ++e.a)
        for (e.b = 0; e.b < n; ++e.b) fn(leafMonomial(g, e));
      return;
    }
    case GroupKind::PauliTensor: {
      const std::int64_t lim = std::int64_t(1) << g.qubits();
      GroupElement e;
      for (e.a = 0; e.a < lim; ++e.a)
        for (e.b = 0; e.b < lim; ++e.b) fn(leafMonomial(g, e));
      return;
    }
    default:
      throw std::invalid_argument("enumerateLeaf: group is not exactly enumerable");
  }
}

// Exact one-factor conjugation average along a mode.
inline Eigen::MatrixXcd factorModeAverage(const GroupDescriptor& leaf,
                                          const Eigen::MatrixXcd& t, Index stride,
                                          Index total, bool conjugated) {
  if (leaf.kind() == GroupKind::SignShift) {
    // Real representation: the conjugated right action averages identically.
    return signShiftModeAverage(t, stride, leaf.dimension());
  }
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(total, total);
  double count = 0;
  enumerateLeaf(leaf, [&](const Monomial& m) {
    accumulateConjugation(avg, embedMonomial(m, stride, total, conjugated), t);
    count += 1;
  });
  return avg / count;
}

}  // namespace detail

/// Exact group average of the conjugation action, avg_g sigma(g)^* T sigma(g).
/// Sign averages are carried out analytically (diagonal projection), so the
/// sign-shift group is exact at any N; composite groups average factor by
/// factor because independent conjugations commute.
inline Eigen::MatrixXcd conjugationAverage(const GroupDescriptor& g, const Eigen::MatrixXcd& t) {
  const Index n = g.dimension();
  if (t.rows() != n || t.cols() != n)
    throw std::invalid_argument("conjugationAverage: probe size mismatch");
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
    case GroupKind::PauliTensor: {
      if (g.order() > 1e6)
        throw std::invalid_argument("conjugationAverage: group too large for exact mode");
      Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(n, n);
      double count = 0;
      detail::enumerateLeaf(g, [&](const detail::Monomial& m) {
        detail::accumulateConjugation(avg, m, t);
        count += 1;
      });
      return avg / count;
    }
    case GroupKind::SignShift:
      return detail::signShiftModeAverage(t, 1, n);
    case GroupKind::Product: {
      Eigen::MatrixXcd cur = t;
      Index stride = 1;
      for (const auto& leaf : g.factors()) {
        if (leaf.kind() == GroupKind::Product || leaf.kind() == GroupKind::TwoSided)
          throw std::invalid_argument("conjugationAverage: nested composite factors unsupported");
        if (leaf.kind() != GroupKind::SignShift && leaf.order() > 1e6)
          throw std::invalid_argument("conjugationAverage: factor too large for exact mode");
        cur = detail::factorModeAverage(leaf, cur, stride, n, false);
        stride *= leaf.dimension();
      }
      return cur;
    }
    case GroupKind::TwoSided: {
      const GroupDescriptor& b = g.base();
      if (b.kind() == GroupKind::Product || b.kind() == GroupKind::TwoSided)
        throw std::invalid_argument("conjugationAverage: nested composite base unsupported");
      if (b.kind() != GroupKind::SignShift && b.order() > 1e6)
        throw std::invalid_argument("conjugationAverage: base too large for exact mode");
      const Index side = b.dimension();
      Eigen::MatrixXcd cur = detail::factorModeAverage(b, t, 1, n, false);
      return detail::factorModeAverage(b, cur, side, n, true);
    }
  }
  throw std::logic_error("conjugationAverage: unreachable");
}

/// Monte Carlo estimate of the conjugation average over `trials` Haar draws.
inline Eigen::MatrixXcd conjugationAverageMC(const GroupDescriptor& g, const Eigen::MatrixXcd& t,
                                             Index trials, Rng& rng) {
  const Index n = g.dimension();
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd work(n, n);
  const Shape shape = g.naturalShape();
  for (Index k = 0; k < trials; ++k) {
    const GroupElement e = sampleHaar(g, rng);
    // Columns of sigma^* T sigma via the fast action.
    for (Index j = 0; j < n; ++j) {
      const SignalVector col = apply(g, e, SignalVector::basis(n, j, shape));
      const Eigen::VectorXcd tcol = t * col.data;
      work.col(j) = adjointApply(g, e, SignalVector{tcol, shape}).data;
    }
    avg += work;
  }
  return avg / double(trials);
}

/// Frobenius deviation of the exact conjugation average from (tr T / N) Id.
inline double verifyIsotropy(const GroupDescriptor& g, const Eigen::MatrixXcd& t) {
  const Index n = g.dimension();
  const Eigen::MatrixXcd avg = conjugationAverage(g, t);
  const Eigen::MatrixXcd target =
      (t.trace() / double(n)) * Eigen::MatrixXcd::Identity(n, n);
  return (avg - target).norm();
}

inline double verifyIsotropyMC(const GroupDescriptor& g, const Eigen::MatrixXcd& t,
                               Index trials, Rng& rng) {
  const Index n = g.dimension();
  const Eigen::MatrixXcd avg = conjugationAverageMC(g, t, trials, rng);
  const Eigen::MatrixXcd target =
      (t.trace() / double(n)) * Eigen::MatrixXcd::Identity(n, n);
  return (avg - target).norm();
}

/// Generating set (enough to span the commutant equations).
inline std::vector<GroupElement> generators(const GroupDescriptor& g) {
  std::vector<GroupElement> gens;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl: {
      GroupElement mod, shift;
      mod.a = 1 % g.param();
      shift.b = 1 % g.param();
      gens.push_back(mod);
      gens.push_back(shift);
      return gens;
    }
    case GroupKind::SignShift: {
      GroupElement shift = identityElement(g), flip = identityElement(g);
      shift.a = 1 % g.param();
      flip.signs[0] = -1;
      gens.push_back(shift);
      gens.push_back(flip);
      return gens;
    }
    case GroupKind::PauliTensor: {
      for (int q = 0; q < g.qubits(); ++q) {
        GroupElement z, x;
        z.a = std::int64_t(1) << q;
        x.b = std::int64_t(1) << q;
        gens.push_back(z);
        gens.push_back(x);
      }
      return gens;
    }
    case GroupKind::Product: {
      for (std::size_t f = 0; f < g.factors().size(); ++f) {
        for (const auto& fg : generators(g.factors()[f])) {
          GroupElement e = identityElement(g);
          e.parts[f] = fg;
          gens.push_back(std::move(e));
        }
      }
      return gens;
    }
    case GroupKind::TwoSided: {
      for (int side = 0; side < 2; ++side) {
        for (const auto& fg : generators(g.base())) {
          GroupElement e = identityElement(g);
          e.parts[side] = fg;
          gens.push_back(std::move(e));
        }
      }
      return gens;
    }
  }
  return gens;
}

/// Dimension of {T : sigma(g) T = T sigma(g) for all generators}; 1 means the
/// representation has a trivial commutant (enough symmetries, condition ii).
inline Index commutantDimension(const GroupDescriptor& g) {
  const Index n = g.dimension();
  if (n > 16) throw std::invalid_argument("commutantDimension: brute force limited to N <= 16");
  const auto gens = generators(g);
  Eigen::MatrixXcd system =
      Eigen::MatrixXcd::Zero(static_cast<Index>(gens.size()) * n * n, n * n);
  Index row0 = 0;
  for (const auto& e : gens) {
    const Eigen::MatrixXcd s = densify(g, e);
    // vec(S T - T S) = (I (x) S - S^T (x) I) vec(T), column-major vec.
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) {
        const Index r = row0 + i + j * n;
        for (Index k = 0; k < n; ++k) {
          system(r, k + j * n) += s(i, k);       // (I (x) S)
          system(r, i + k * n) -= s(k, j);       // (S^T (x) I)
        }
      }
    row0 += n * n;
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(system);
  const auto& sv = svd.singularValues();
  const double tol = 1e-8 * (sv.size() ? sv[0] : 1.0);
  Index nullity = 0;
  for (Index i = 0; i < sv.size(); ++i)
    if (sv[i] <= tol) ++nullity;
  nullity += n * n - sv.size();  // rank-deficient tall systems
  return nullity;
}

}  // namespace riplab
