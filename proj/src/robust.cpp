#include "rbss/robust.hpp"

#include <cmath>

#include "rbss/datagen.hpp"

namespace rbss {

std::pair<Mat, double> init_outliers(const Mat& X, double sigma) {
  if (sigma < 0) throw std::invalid_argument("init_outliers: sigma must be >= 0");
  std::vector<double> large;
  for (Index j = 0; j < X.cols(); ++j)
    for (Index i = 0; i < X.rows(); ++i) {
      const double mag = std::abs(X(i, j));
      if (mag > 3.0 * sigma) large.push_back(mag);
    }
  if (large.empty()) return {Mat::Zero(X.rows(), X.cols()), 3.0 * sigma};
  const double alpha0 = median_inplace(large);
  return {soft_threshold(X, alpha0), alpha0};
}

double compute_eps(const Mat& S_est, bool* fallback_used) {
  std::vector<double> nonzero;
  for (Index j = 0; j < S_est.cols(); ++j)
    for (Index i = 0; i < S_est.rows(); ++i)
      if (S_est(i, j) != 0) nonzero.push_back(std::abs(S_est(i, j)));
  if (nonzero.empty()) {
    if (fallback_used) *fallback_used = true;
    const double max_abs = S_est.size() > 0 ? S_est.cwiseAbs().maxCoeff() : 0.0;
    return 1e-6 * (1.0 + max_abs);
  }
  if (fallback_used) *fallback_used = false;
  return median_inplace(nonzero) / 10.0;
}

Vec compute_weights(const Mat& O_est, double eps) {
  if (eps <= 0) throw std::invalid_argument("compute_weights: eps must be > 0");
  return (eps + column_l1_norms(O_est).array()).inverse();
}

Mat update_outliers(const Mat& X, const Mat& A_est, const Mat& S_est, double alpha) {
  if (alpha < 0) throw std::invalid_argument("update_outliers: alpha must be >= 0");
  // Materialized first: entrywise access to a nested product expression
  // re-evaluates the whole GEMM per coefficient.
  const Mat residual = X - A_est * S_est;
  return soft_threshold(residual, alpha);
}

SeparationResult rgmca(const Mat& X, Index n, const SolverParams& params,
                       const RobustOptions& options) {
  params.validate();
  if (X.rows() < n || n < 1)
    throw std::invalid_argument("rgmca: require m >= n >= 1");

  Rng rng(params.rng_seed);
  SeparationResult result;

  double sigma_hat = estimate_noise_sigma(X);
  Mat O;
  double alpha0;
  if (options.freeze_outliers) {
    O = Mat::Zero(X.rows(), X.cols());
    alpha0 = params.final_threshold_multiplier * sigma_hat;
  } else {
    std::tie(O, alpha0) = init_outliers(X, sigma_hat);
  }

  Mat A = gen_mixing(X.rows(), n, rng);
  sigma_hat = estimate_noise_sigma(X - O);
  const double mult = params.final_threshold_multiplier;

  // lambda0 is fixed once from the initial projection; the inner schedule
  // restarts from it every outer iteration.
  const Vec lambda0 = initial_thresholds(X - O, A, mult * sigma_hat, params.pinv_tol);

  const Mat P0 = pseudo_inverse(A, params.pinv_tol) * (X - O);
  Mat S = soft_threshold(P0, lambda0);
  double eps = compute_eps(S, &result.eps_fallback_used);
  Vec W = options.identity_weights ? Vec::Ones(X.cols()) : compute_weights(O, eps);

  const int K = params.outer_iters;
  double final_sigma = sigma_hat;
  for (int k = 0; k < K; ++k) {
    ThresholdSchedule schedule;
    schedule.initial = lambda0;
    schedule.floor = mult * sigma_hat;
    schedule.steps = params.inner_iters;
    schedule.exponential = params.exponential_schedule;

    gmca_pass(X - O, schedule, W, params.pinv_tol, A, S, rng,
              &result.degenerate_updates);

    if (!options.freeze_outliers) {
      const double frac = K == 1 ? 1.0 : static_cast<double>(k) / (K - 1);
      const double floor = mult * sigma_hat;
      const double alpha = std::max(floor, (1.0 - frac) * alpha0 + frac * floor);
      O = update_outliers(X, A, S, alpha);
      final_sigma = sigma_hat;
      bool fallback = false;
      eps = compute_eps(S, &fallback);
      result.eps_fallback_used = result.eps_fallback_used || fallback;
      if (!options.identity_weights) W = compute_weights(O, eps);
      sigma_hat = estimate_noise_sigma(X - O);
    }
  }

  result.A_est = A;
  result.S_est = S;
  result.O_est = O;
  result.outer_iterations = K;
  result.inner_iterations = params.inner_iters;
  result.residual_norm = (X - A * S - O).norm();
  result.sigma_hat = final_sigma;
  return result;
}

SeparationResult nrgmca(const Mat& X, Index n, const SolverParams& params) {
  RobustOptions options;
  options.identity_weights = true;
  return rgmca(X, n, params, options);
}

}  // namespace rbss
