#include "rbss/metrics.hpp"

#include <cmath>
#include <limits>

namespace rbss {

std::vector<Index> solve_assignment(const Mat& cost) {
  const Index n = cost.rows();
  if (cost.cols() != n || n < 1)
    throw std::invalid_argument("solve_assignment: cost matrix must be square");
  constexpr double kInf = std::numeric_limits<double>::infinity();

  // Hungarian algorithm with potentials, 1-based internal indexing.
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<Index> p(n + 1, 0), way(n + 1, 0);
  for (Index i = 1; i <= n; ++i) {
    p[0] = i;
    Index j0 = 0;
    std::vector<double> minv(n + 1, kInf);
    std::vector<bool> used(n + 1, false);
    do {
      used[j0] = true;
      const Index i0 = p[j0];
      double delta = kInf;
      Index j1 = 0;
      for (Index j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (Index j = 0; j <= n; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const Index j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  std::vector<Index> assignment(n, 0);
  for (Index j = 1; j <= n; ++j) assignment[p[j] - 1] = j - 1;
  return assignment;
}

Alignment align_columns(const Mat& A_est, const Mat& A_true) {
  if (A_est.rows() != A_true.rows() || A_est.cols() != A_true.cols())
    throw std::invalid_argument("align_columns: shape mismatch");
  const Index n = A_true.cols();
  const Mat corr = A_est.transpose() * A_true;  // corr(p, j) = <est_p, true_j>

  // Maximize total |correlation| == minimize its negation.
  const std::vector<Index> row_to_col = solve_assignment(-corr.cwiseAbs());

  Alignment alignment;
  alignment.permutation.resize(n);
  alignment.signs.resize(n);
  for (Index p = 0; p < n; ++p) {
    const Index j = row_to_col[p];
    alignment.permutation[j] = p;
    alignment.signs[j] = corr(p, j) < 0 ? -1 : 1;
  }
  return alignment;
}

double delta_A(const Mat& A_est, const Mat& A_true) {
  const Alignment alignment = align_columns(A_est, A_true);
  const Index n = A_true.cols();
  Mat A_aligned(A_est.rows(), n);
  for (Index j = 0; j < n; ++j)
    A_aligned.col(j) = alignment.signs[j] * A_est.col(alignment.permutation[j]);

  Eigen::BDCSVD<Mat> svd(A_aligned, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Vec& s = svd.singularValues();
  if (s(s.size() - 1) <= 1e-10 * s(0))
    return std::numeric_limits<double>::infinity();

  Vec s_inv = s.array().inverse();
  const Mat pinv = svd.matrixV() * s_inv.asDiagonal() * svd.matrixU().transpose();
  const Mat deviation = pinv * A_true - Mat::Identity(n, n);
  return deviation.cwiseAbs().sum() / static_cast<double>(n * n);
}

}  // namespace rbss
