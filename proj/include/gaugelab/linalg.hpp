#pragma once

#include "gaugelab/core.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>

namespace gaugelab {

// Singular values at or below this are roundoff for the O(1)-scaled operators used here.
inline constexpr double rank_floor = 1e-12;

// Rank threshold: max(rel * largest singular value, absolute floor).
inline Index numerical_rank(const Vec& sv, double rel, double floor = rank_floor) {
  if (sv.size() == 0 || sv[0] == 0.0) return 0;
  const double cut = std::max(rel * sv[0], floor);
  Index r = 0;
  while (r < sv.size() && sv[r] > cut) ++r;
  return r;
}

struct SVD {
  Vec sv;
  Mat U;
  Mat V;
};

// BDCSVD in Eigen 3.4.0 can fail an internal index assertion on nearly deflated input, so moderate sizes use
// one-sided Jacobi.
inline SVD svd(const Mat& m, unsigned options = 0) {
  SVD r;
  const auto take = [&](const auto& s) {
    r.sv = s.singularValues();
    if (options & (Eigen::ComputeThinU | Eigen::ComputeFullU)) r.U = s.matrixU();
    if (options & (Eigen::ComputeThinV | Eigen::ComputeFullV)) r.V = s.matrixV();
  };
  if (std::min(m.rows(), m.cols()) <= 600) take(Eigen::JacobiSVD<Mat>(m, options));
  else take(Eigen::BDCSVD<Mat>(m, options));
  return r;
}

inline Vec singular_values(const Mat& m) {
  if (m.rows() == 0 || m.cols() == 0) return Vec();
  return svd(m).sv;
}

// Orthonormal basis of a linear subspace of R^ambient.
class Subspace {
 public:
  Subspace() = default;
  Subspace(Index ambient, Mat basis) : ambient_(ambient), basis_(std::move(basis)) {
    if (basis_.cols() == 0) basis_.resize(ambient_, 0);
  }

  static Subspace zero(Index n) { return Subspace(n, Mat(n, 0)); }
  static Subspace full(Index n) { return Subspace(n, Mat::Identity(n, n)); }

  // Column space of `vectors`.
  static Subspace span(const Mat& vectors, double rel = 1e-10) {
    const Index n = vectors.rows();
    if (vectors.cols() == 0) return zero(n);
    const SVD s = svd(vectors, Eigen::ComputeThinU);
    const Index r = numerical_rank(s.sv, rel);
    return Subspace(n, s.U.leftCols(r));
  }

  // Null space of m (as a subspace of R^{m.cols()}).
  static Subspace kernel(const Mat& m, double rel = 1e-10) {
    const Index n = m.cols();
    if (m.rows() == 0) return full(n);
    if (n == 0) return zero(0);
    const SVD s = svd(m, Eigen::ComputeFullV);
    const Index r = numerical_rank(s.sv, rel);
    return Subspace(n, s.V.rightCols(n - r));
  }

  Index ambient() const { return ambient_; }
  Index dim() const { return basis_.cols(); }
  const Mat& basis() const { return basis_; }

  Vec project(const Vec& v) const { return basis_ * (basis_.transpose() * v); }
  Mat project(const Mat& v) const { return basis_ * (basis_.transpose() * v); }
  double distance(const Vec& v) const { return (v - project(v)).norm(); }

  // Orthogonal complement in R^ambient.
  Subspace complement() const {
    if (dim() == 0) return full(ambient_);
    return kernel(basis_.transpose());
  }

  Subspace intersect(const Subspace& o, double rel = 1e-10) const {
    // x = B a = C b  <=>  [B -C] (a;b) = 0
    if (dim() == 0 || o.dim() == 0) return zero(ambient_);
    Mat m(ambient_, dim() + o.dim());
    m << basis_, -o.basis_;
    Subspace k = kernel(m, rel);
    return span(basis_ * k.basis().topRows(dim()), rel);
  }

  Subspace sum(const Subspace& o, double rel = 1e-10) const {
    Mat m(ambient_, dim() + o.dim());
    m << basis_, o.basis_;
    return span(m, rel);
  }

  // Largest principal-angle sine from this into o: ||(I - P_o) B||.
  double excess_over(const Subspace& o) const {
    if (dim() == 0) return 0.0;
    Mat r = basis_ - o.project(basis_);
    return singular_values(r)[0];
  }

  // Containment residual of a set of column vectors (max relative distance).
  double contains_residual(const Mat& vectors) const {
    double worst = 0.0;
    for (Index j = 0; j < vectors.cols(); ++j) {
      const double n = vectors.col(j).norm();
      if (n == 0.0) continue;
      worst = std::max(worst, distance(vectors.col(j)) / n);
    }
    return worst;
  }

 private:
  Index ambient_ = 0;
  Mat basis_;
};

// Cosines of principal angles sorted descending.
inline Vec principal_cosines(const Subspace& a, const Subspace& b) {
  if (a.dim() == 0 || b.dim() == 0) return Vec();
  return singular_values(a.basis().transpose() * b.basis());
}

// Symmetric gap: sine of the largest principal angle; 1 when dimensions differ.
inline double subspace_gap(const Subspace& a, const Subspace& b) {
  if (a.dim() != b.dim()) return 1.0;
  return std::max(a.excess_over(b), b.excess_over(a));
}

// Maximal |<u,v>| over unit u in a, v in b (0 means orthogonal).
inline double max_overlap(const Subspace& a, const Subspace& b) {
  Vec c = principal_cosines(a, b);
  return c.size() ? c[0] : 0.0;
}

inline Mat dense(const SpMat& s) { return Mat(s); }

}  // namespace gaugelab
