// NrGMCA and rGMCA: joint estimation of sources, mixing matrix and a sparse
// outlier term, with a per-sample weighting scheme down-weighting corrupted
// columns in the mixing update.
#pragma once

#include <utility>

#include "rbss/gmca.hpp"
#include "rbss/model.hpp"

namespace rbss {

// Initial outlier estimate: soft threshold of X at
// alpha0 = median of { |X_ij| : |X_ij| > 3 sigma }.
// Falls back to (zero matrix, 3 sigma) when nothing exceeds 3 sigma.
std::pair<Mat, double> init_outliers(const Mat& X, double sigma);

// eps = median of the nonzero magnitudes of S_est, divided by 10.
// All-zero S_est falls back to 1e-6 * (1 + max|S_est|).
double compute_eps(const Mat& S_est, bool* fallback_used = nullptr);

// w_i = 1 / (eps + ||O column i||_1), one weight per sample.
Vec compute_weights(const Mat& O_est, double eps);

// O = soft_threshold(X - A_est * S_est, alpha), entrywise scalar threshold.
Mat update_outliers(const Mat& X, const Mat& A_est, const Mat& S_est, double alpha);

// Internal knobs used for structural regression against gmca; the public
// solvers below fix them.
struct RobustOptions {
  bool identity_weights = false;    // keep W = I throughout
  bool freeze_outliers = false;     // keep the outlier estimate at zero
};

SeparationResult rgmca(const Mat& X, Index n, const SolverParams& params,
                       const RobustOptions& options = {});

// Same loop structure as rgmca with all sample weights fixed to one.
SeparationResult nrgmca(const Mat& X, Index n, const SolverParams& params);

}  // namespace rbss
