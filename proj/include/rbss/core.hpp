// Dense linear-algebra primitives and robust statistics shared by the solvers.
#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace rbss {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using Index = Eigen::Index;

// Entrywise soft threshold with one threshold per row:
//   out(i,j) = sign(M(i,j)) * max(0, |M(i,j)| - thresholds(i)).
template <typename Derived>
Mat soft_threshold(const Eigen::MatrixBase<Derived>& M, const Vec& thresholds) {
  if (thresholds.size() != M.rows())
    throw std::invalid_argument("soft_threshold: thresholds length must equal row count");
  if ((thresholds.array() < 0).any())
    throw std::invalid_argument("soft_threshold: thresholds must be non-negative");
  Mat out(M.rows(), M.cols());
  for (Index i = 0; i < M.rows(); ++i) {
    const double lam = thresholds(i);
    for (Index j = 0; j < M.cols(); ++j) {
      const double x = M(i, j);
      const double mag = std::abs(x) - lam;
      out(i, j) = mag > 0 ? (x < 0 ? -mag : mag) : 0.0;
    }
  }
  return out;
}

// Scalar-threshold overload, applied to every entry.
template <typename Derived>
Mat soft_threshold(const Eigen::MatrixBase<Derived>& M, double threshold) {
  return soft_threshold(M, Vec::Constant(M.rows(), threshold));
}

// Moore-Penrose pseudo-inverse via SVD. Singular values below
// rel_tol * s_max are truncated to zero, which keeps the inverse
// well-defined on rank-deficient inputs.
template <typename Derived>
Mat pseudo_inverse(const Eigen::MatrixBase<Derived>& M, double rel_tol = 1e-10) {
  if (rel_tol <= 0 || rel_tol >= 1)
    throw std::invalid_argument("pseudo_inverse: rel_tol must lie in (0, 1)");
  Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("pseudo_inverse: SVD failed to converge");
  const Vec& s = svd.singularValues();
  const double cutoff = s.size() > 0 ? rel_tol * s(0) : 0.0;
  Vec s_inv = Vec::Zero(s.size());
  for (Index i = 0; i < s.size(); ++i)
    if (s(i) > cutoff) s_inv(i) = 1.0 / s(i);
  return svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
}

inline double median_inplace(std::vector<double>& v) {
  const size_t n = v.size();
  auto mid = v.begin() + n / 2;
  std::nth_element(v.begin(), mid, v.end());
  if (n % 2 == 1) return *mid;
  const double hi = *mid;
  const double lo = *std::max_element(v.begin(), mid);
  return 0.5 * (lo + hi);
}

// MAD-based scale estimate: 1.4826 * median(|v - median(v)|).
// The constant makes the estimator consistent for the Gaussian sigma.
inline double mad_sigma(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mad_sigma: empty input");
  std::vector<double> work = values;
  const double med = median_inplace(work);
  for (double& x : work) x = std::abs(x - med);
  return 1.4826 * median_inplace(work);
}

template <typename Derived>
double mad_sigma(const Eigen::MatrixBase<Derived>& M) {
  std::vector<double> flat(M.size());
  Index k = 0;
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) flat[k++] = M(i, j);
  return mad_sigma(flat);
}

// Per-column l1 norms, one entry per sample.
template <typename Derived>
Vec column_l1_norms(const Eigen::MatrixBase<Derived>& M) {
  Vec norms = Vec::Zero(M.cols());
  for (Index j = 0; j < M.cols(); ++j)
    for (Index i = 0; i < M.rows(); ++i) norms(j) += std::abs(M(i, j));
  return norms;
}

}  // namespace rbss
