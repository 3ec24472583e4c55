#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <stdexcept>

namespace riplab {

using cplx = std::complex<double>;
using Index = Eigen::Index;

/// Shape hint for a coordinate vector in C^N: flat, square matrix (N = n^2)
/// or d-fold tensor (N = n^d).
struct Shape {
  enum class Kind { Flat, Matrix, Tensor };

  Kind kind = Kind::Flat;
  Index n = 0;    // flat length, matrix side or tensor mode size
  int order = 1;  // tensor order

  static Shape flat(Index n) { return {Kind::Flat, n, 1}; }
  static Shape matrix(Index n) { return {Kind::Matrix, n, 2}; }
  static Shape tensor(Index n, int order) {
    if (order < 1) throw std::invalid_argument("Shape: tensor order must be >= 1");
    return {Kind::Tensor, n, order};
  }

  Index size() const {
    switch (kind) {
      case Kind::Flat:
        return n;
      case Kind::Matrix:
        return n * n;
      case Kind::Tensor: {
        Index s = 1;
        for (int i = 0; i < order; ++i) s *= n;
        return s;
      }
    }
    return 0;
  }

  bool operator==(const Shape& o) const {
    return kind == o.kind && n == o.n && (kind != Kind::Tensor || order == o.order);
  }
};

/// Complex coordinate vector with a shape hint. Matrix view is column-major.
struct SignalVector {
  Eigen::VectorXcd data;
  Shape shape;

  SignalVector() = default;
  SignalVector(Eigen::VectorXcd v, Shape s) : data(std::move(v)), shape(s) {
    if (data.size() != shape.size())
      throw std::invalid_argument("SignalVector: data length does not match shape");
  }
  explicit SignalVector(Eigen::VectorXcd v) {
    shape = Shape::flat(v.size());
    data = std::move(v);
  }

  Index size() const { return data.size(); }
  double norm() const { return data.norm(); }

  Eigen::Map<const Eigen::MatrixXcd> matrixView() const {
    if (shape.kind != Shape::Kind::Matrix)
      throw std::invalid_argument("SignalVector: not matrix-shaped");
    return {data.data(), shape.n, shape.n};
  }

  static SignalVector basis(Index n, Index j, Shape s) {
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(n);
    v[j] = 1.0;
    return {std::move(v), s};
  }
  static SignalVector basis(Index n, Index j) { return basis(n, j, Shape::flat(n)); }
  static SignalVector zero(Shape s) {
    return {Eigen::VectorXcd::Zero(s.size()), s};
  }
};

inline cplx dot(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) {
  return a.dot(b);  // conjugate-linear in the first argument
}

/// Reshapes an n x n complex matrix into a matrix-shaped signal.
inline SignalVector fromMatrix(const Eigen::MatrixXcd& m) {
  if (m.rows() != m.cols()) throw std::invalid_argument("fromMatrix: matrix must be square");
  Eigen::VectorXcd v = Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
  return {std::move(v), Shape::matrix(m.rows())};
}

}  // namespace riplab
