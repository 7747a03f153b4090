#include "rbss/pcp.hpp"

#include <algorithm>
#include <cmath>

namespace rbss {

void PcpParams::validate() const {
  if (tol <= 0) throw std::invalid_argument("PcpParams: tol must be > 0");
  if (rho <= 1) throw std::invalid_argument("PcpParams: rho must be > 1");
  if (max_iters < 1) throw std::invalid_argument("PcpParams: max_iters must be >= 1");
}

Mat singular_value_threshold(const Mat& M, double tau) {
  if (tau < 0) throw std::invalid_argument("singular_value_threshold: tau must be >= 0");
  Eigen::BDCSVD<Mat> svd(M, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success)
    throw std::runtime_error("singular_value_threshold: SVD failed to converge");
  Vec s = (svd.singularValues().array() - tau).max(0.0);
  return svd.matrixU() * s.asDiagonal() * svd.matrixV().transpose();
}

PcpResult pcp(const Mat& X, const PcpParams& params) {
  params.validate();
  PcpResult result;
  const double x_norm = X.norm();
  if (x_norm == 0) {
    result.L = Mat::Zero(X.rows(), X.cols());
    result.O_hat = Mat::Zero(X.rows(), X.cols());
    result.converged = true;
    return result;
  }

  const double lambda =
      params.lambda_pcp > 0
          ? params.lambda_pcp
          : 1.0 / std::sqrt(static_cast<double>(std::max(X.rows(), X.cols())));
  const double spectral_norm = Eigen::BDCSVD<Mat>(X).singularValues()(0);
  double mu = params.mu0 > 0 ? params.mu0 : 1.25 / spectral_norm;
  // Unbounded growth freezes the iterates before the split settles.
  const double mu_max = 1e7 * mu;

  Mat L = Mat::Zero(X.rows(), X.cols());
  Mat O = Mat::Zero(X.rows(), X.cols());
  // Dual warm start: Y = X / J(X) with J(X) = max(||X||_2, ||X||_inf / lambda).
  const double dual_scale = std::max(spectral_norm, X.cwiseAbs().maxCoeff() / lambda);
  Mat Y = X / dual_scale;

  for (int it = 0; it < params.max_iters; ++it) {
    L = singular_value_threshold(X - O + Y / mu, 1.0 / mu);
    O = soft_threshold(X - L + Y / mu, lambda / mu);
    const Mat residual = X - L - O;
    Y += mu * residual;
    mu = std::min(mu * params.rho, mu_max);
    result.iterations = it + 1;
    result.rel_residual = residual.norm() / x_norm;
    if (result.rel_residual <= params.tol) {
      result.converged = true;
      break;
    }
  }
  result.L = std::move(L);
  result.O_hat = std::move(O);
  return result;
}

SeparationResult pcp_gmca(const Mat& X, Index n, const SolverParams& params,
                          const PcpParams& pcp_params) {
  const PcpResult decomposition = pcp(X, pcp_params);
  SeparationResult result = gmca(decomposition.L, n, params);
  result.O_est = decomposition.O_hat;
  result.residual_norm = (X - result.A_est * result.S_est - result.O_est).norm();
  return result;
}

}  // namespace rbss
