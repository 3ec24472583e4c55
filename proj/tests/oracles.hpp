// Independent oracle implementations used by the test suites. Everything here
// is written from the defining formulas, separately from the library code
// paths it checks.
#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "riplab/groups.hpp"
#include "riplab/signal.hpp"

namespace oracle {

using riplab::cplx;
using riplab::Index;

// Unnormalized character sum X(l) = sum_t exp(+2 pi i l t / N) x_t.
inline Eigen::VectorXcd characterTransform(const Eigen::VectorXcd& x) {
  const Index n = x.size();
  Eigen::VectorXcd out(n);
  constexpr double twoPi = 6.283185307179586476925286766559;
  for (Index l = 0; l < n; ++l) {
    cplx acc(0, 0);
    for (Index t = 0; t < n; ++t)
      acc += std::polar(1.0, twoPi * double((l * t) % n) / double(n)) * x[t];
    out[l] = acc;
  }
  return out;
}

inline Eigen::MatrixXcd matrixPower(Eigen::MatrixXcd base, std::int64_t e) {
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Identity(base.rows(), base.cols());
  for (std::int64_t i = 0; i < e; ++i) acc = base * acc;
  return acc;
}

// Dense Heisenberg-Weyl matrix built from explicit Lambda and Sh powers.
inline Eigen::MatrixXcd denseHeisenbergWeyl(Index n, std::int64_t l, std::int64_t k) {
  constexpr double twoPi = 6.283185307179586476925286766559;
  Eigen::MatrixXcd lambda = Eigen::MatrixXcd::Zero(n, n);
  for (Index r = 0; r < n; ++r) lambda(r, r) = std::polar(1.0, twoPi * double(r) / double(n));
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(n, n);
  for (Index r = 0; r < n; ++r) shift((r + 1) % n, r) = 1.0;  // Sh e_r = e_{r+1}
  return matrixPower(lambda, l) * matrixPower(shift, k);
}

inline Eigen::MatrixXcd denseSignShift(Index n, const std::vector<std::int8_t>& signs,
                                       std::int64_t k) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (Index r = 0; r < n; ++r) d(r, r) = double(signs[r]);
  Eigen::MatrixXcd shift = Eigen::MatrixXcd::Zero(n, n);
  for (Index r = 0; r < n; ++r) shift((r + 1) % n, r) = 1.0;
  return d * matrixPower(shift, k);
}

// Dense Pauli word from explicit 2x2 Kronecker factors; qubit q owns bit q,
// matching the fast index convention (bit q of the row index).
inline Eigen::MatrixXcd densePauliWord(int qubits, std::uint64_t z, std::uint64_t x) {
  Eigen::Matrix2cd zMat, xMat, id;
  id << 1, 0, 0, 1;
  zMat << 1, 0, 0, -1;
  xMat << 0, 1, 1, 0;
  Eigen::MatrixXcd acc = Eigen::MatrixXcd::Ones(1, 1);
  for (int q = 0; q < qubits; ++q) {
    Eigen::Matrix2cd f = id;
    if ((z >> q) & 1) f = zMat;
    if ((x >> q) & 1) f = ((z >> q) & 1) ? Eigen::Matrix2cd(zMat * xMat) : xMat;
    // kron(f, acc): qubit q varies with stride 2^q (mode q is faster).
    Eigen::MatrixXcd next(acc.rows() * 2, acc.cols() * 2);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) next.block(i * acc.rows(), j * acc.cols(), acc.rows(), acc.cols()) = f(i, j) * acc;
    acc = next;
  }
  return acc;
}

// Dense tensor-product matrix M[i,j] = prod_l f_l[i_l, j_l], mode 0 fastest.
inline Eigen::MatrixXcd denseModeProduct(const std::vector<Eigen::MatrixXcd>& factors) {
  Index total = 1;
  for (const auto& f : factors) total *= f.rows();
  Eigen::MatrixXcd m(total, total);
  for (Index i = 0; i < total; ++i)
    for (Index j = 0; j < total; ++j) {
      cplx v(1, 0);
      Index ii = i, jj = j;
      for (const auto& f : factors) {
        const Index n = f.rows();
        v *= f(ii % n, jj % n);
        ii /= n;
        jj /= n;
      }
      m(i, j) = v;
    }
  return m;
}

// Dense two-sided action X -> S1 X S2^* as a matrix on column-major vec(X).
inline Eigen::MatrixXcd denseTwoSided(const Eigen::MatrixXcd& s1, const Eigen::MatrixXcd& s2) {
  const Index n = s1.rows();
  Eigen::MatrixXcd m(n * n, n * n);
  for (Index c2 = 0; c2 < n; ++c2)
    for (Index r2 = 0; r2 < n; ++r2)
      for (Index c1 = 0; c1 < n; ++c1)
        for (Index r1 = 0; r1 < n; ++r1)
          m(r1 + n * c1, r2 + n * c2) = s1(r1, r2) * std::conj(s2(c1, c2));
  return m;
}

// Dense matrix of any shipped group element, assembled independently of the
// library's fast-action code.
inline Eigen::MatrixXcd denseGroupMatrix(const riplab::GroupDescriptor& g,
                                         const riplab::GroupElement& e) {
  using riplab::GroupKind;
  switch (g.kind()) {
    case GroupKind::HeisenbergWeyl:
      return denseHeisenbergWeyl(g.param(), e.a, e.b);
    case GroupKind::SignShift:
      return denseSignShift(g.param(), e.signs, e.a);
    case GroupKind::PauliTensor:
      return densePauliWord(g.qubits(), static_cast<std::uint64_t>(e.a),
                            static_cast<std::uint64_t>(e.b));
    case GroupKind::Product: {
      std::vector<Eigen::MatrixXcd> fs;
      for (std::size_t i = 0; i < g.factors().size(); ++i)
        fs.push_back(denseGroupMatrix(g.factors()[i], e.parts[i]));
      return denseModeProduct(fs);
    }
    case GroupKind::TwoSided:
      return denseTwoSided(denseGroupMatrix(g.base(), e.parts[0]),
                           denseGroupMatrix(g.base(), e.parts[1]));
  }
  throw std::logic_error("denseGroupMatrix: unreachable");
}

// Hermitian 2x2 eigenvalues from the closed form.
inline std::pair<double, double> hermitian2x2Eigs(cplx a00, cplx a01, cplx a11) {
  const double a = a00.real(), d = a11.real();
  const double mid = 0.5 * (a + d);
  const double rad = std::sqrt(0.25 * (a - d) * (a - d) + std::norm(a01));
  return {mid - rad, mid + rad};
}

// Brute-force eigenvalue sweep for the exact RIP constant at s in {1, 2}.
inline double bruteForceRip(const Eigen::MatrixXcd& a, int s) {
  const Index n = a.cols();
  double best = 0.0;
  if (s == 1) {
    for (Index j = 0; j < n; ++j)
      best = std::max(best, std::abs(a.col(j).squaredNorm() - 1.0));
    return best;
  }
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j) {
      const cplx g00 = a.col(i).dot(a.col(i));
      const cplx g01 = a.col(i).dot(a.col(j));
      const cplx g11 = a.col(j).dot(a.col(j));
      const auto [lo, hi] = hermitian2x2Eigs(g00, g01, g11);
      best = std::max({best, std::abs(lo - 1.0), std::abs(hi - 1.0)});
    }
  return best;
}

inline Eigen::MatrixXcd randomComplexMatrix(Index n, riplab::Rng& rng) {
  Eigen::MatrixXcd t(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index i = 0; i < n; ++i) t(i, j) = rng.complexGaussian();
  return t;
}

inline Eigen::VectorXcd randomComplexVector(Index n, riplab::Rng& rng) {
  Eigen::VectorXcd v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.complexGaussian();
  return v;
}

}  // namespace oracle
