#pragma once

#include <Eigen/Dense>
#include <limits>
#include <stdexcept>
#include <vector>

namespace riplab::detail {

/// Result of a standard-form linear program min c'x s.t. Ax = b, x >= 0.
struct LpResult {
  bool feasible = false;
  double objective = std::numeric_limits<double>::infinity();
  Eigen::VectorXd solution;
};

/// Dense two-phase simplex with Bland's rule. Intended for small instances
/// (a few hundred rows/columns); no attempt at sparsity or scaling.
class SimplexLp {
 public:
  SimplexLp(Eigen::MatrixXd a, Eigen::VectorXd b, Eigen::VectorXd c)
      : a_(std::move(a)), b_(std::move(b)), c_(std::move(c)) {
    if (a_.rows() != b_.size() || a_.cols() != c_.size())
      throw std::invalid_argument("SimplexLp: inconsistent dimensions");
  }

  LpResult solve() {
    const Eigen::Index m = a_.rows();
    const Eigen::Index n = a_.cols();

    // Make b nonnegative so the artificial basis is feasible.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (b_[i] < 0.0) {
        a_.row(i) = -a_.row(i);
        b_[i] = -b_[i];
      }
    }

    // Phase 1 tableau: columns [x | artificials], objective = sum of artificials.
    Eigen::MatrixXd t(m + 1, n + m + 1);
    t.setZero();
    t.block(0, 0, m, n) = a_;
    t.block(0, n, m, m) = Eigen::MatrixXd::Identity(m, m);
    t.col(n + m).head(m) = b_;
    std::vector<Eigen::Index> basis(m);
    for (Eigen::Index i = 0; i < m; ++i) basis[i] = n + i;
    // Reduced costs for phase 1: z row = -sum of constraint rows over x part.
    for (Eigen::Index j = 0; j < n + m + 1; ++j) {
      double s = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) s += t(i, j);
      t(m, j) = (j >= n && j < n + m) ? 0.0 : -s;
    }

    if (!iterate(t, basis, n + m)) throw std::runtime_error("SimplexLp: phase 1 unbounded");
    LpResult res;
    if (t(m, n + m) < -kFeasTol) return res;  // artificials stuck > 0: infeasible

    // Drive any remaining artificial variables out of the basis.
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < n) continue;
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (std::abs(t(i, j)) > kPivTol) {
          enter = j;
          break;
        }
      }
      if (enter >= 0) pivot(t, basis, i, enter);
      // Otherwise the row is redundant; the artificial stays at value zero.
    }

    // Phase 2: replace the objective row by the true costs.
    t.row(m).setZero();
    for (Eigen::Index j = 0; j < n; ++j) t(m, j) = c_[j];
    for (Eigen::Index i = 0; i < m; ++i) {
      if (basis[i] < n) t.row(m) -= c_[basis[i]] * t.row(i);
    }
    // Forbid re-entering artificial columns.
    for (Eigen::Index j = n; j < n + m; ++j) t(m, j) = 1.0;

    if (!iterate(t, basis, n)) throw std::runtime_error("SimplexLp: objective unbounded");

    res.feasible = true;
    res.solution = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < m; ++i)
      if (basis[i] < n) res.solution[basis[i]] = t(i, n + m);
    res.objective = c_.dot(res.solution);
    return res;
  }

 private:
  static constexpr double kFeasTol = 1e-9;
  static constexpr double kPivTol = 1e-11;

  // Bland's rule: smallest eligible column, then smallest-index tie break on
  // the ratio test. Slow but cycle-free.
  static bool iterate(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis,
                      Eigen::Index nCols) {
    const Eigen::Index m = t.rows() - 1;
    const Eigen::Index rhs = t.cols() - 1;
    for (long iter = 0; iter < 100000; ++iter) {
      Eigen::Index enter = -1;
      for (Eigen::Index j = 0; j < nCols; ++j) {
        if (t(m, j) < -kFeasTol) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;  // optimal
      Eigen::Index leave = -1;
      double bestRatio = 0.0;
      for (Eigen::Index i = 0; i < m; ++i) {
        if (t(i, enter) > kPivTol) {
          const double ratio = t(i, rhs) / t(i, enter);
          if (leave < 0 || ratio < bestRatio - 1e-15 ||
              (ratio < bestRatio + 1e-15 && basis[i] < basis[leave])) {
            leave = i;
            bestRatio = ratio;
          }
        }
      }
      if (leave < 0) return false;  // unbounded
      pivot(t, basis, leave, enter);
    }
    throw std::runtime_error("SimplexLp: iteration budget exceeded");
  }

  static void pivot(Eigen::MatrixXd& t, std::vector<Eigen::Index>& basis,
                    Eigen::Index row, Eigen::Index col) {
    t.row(row) /= t(row, col);
    for (Eigen::Index i = 0; i < t.rows(); ++i) {
      if (i == row) continue;
      const double f = t(i, col);
      if (f != 0.0) t.row(i) -= f * t.row(row);
    }
    basis[row] = col;
  }

  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::VectorXd c_;
};

}  // namespace riplab::detail
