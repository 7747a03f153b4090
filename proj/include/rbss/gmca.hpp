// Baseline GMCA: alternating projected least squares with a decreasing
// soft-threshold schedule.
#pragma once

#include <optional>

#include "rbss/core.hpp"
#include "rbss/model.hpp"
#include "rbss/rng.hpp"

namespace rbss {

// Per-source thresholds interpolated from `initial` down to `floor`,
// reaching the floor exactly at the last step.
struct ThresholdSchedule {
  Vec initial;
  double floor = 0.0;
  int steps = 1;
  bool exponential = false;

  Vec value_at(int step) const;
};

// MAD of the flattened observations, used as the Gaussian sigma estimate.
double estimate_noise_sigma(const Mat& X);

// S = soft_threshold(pinv(A) * X_eff, thresholds).
Mat update_sources(const Mat& X_eff, const Mat& A_cur, const Vec& thresholds,
                   double pinv_tol);

// Weighted least-squares mixing update with unit-column renormalization.
// Zero rows of S_cur keep the previous column of A; zero columns after the
// update are replaced by a fresh random unit vector. All-zero S_cur returns
// A_prev unchanged and reports a degenerate update.
Mat update_mixing(const Mat& X_eff, const Mat& S_cur,
                  const std::optional<Vec>& weights, double pinv_tol,
                  const Mat& A_prev, Rng& rng, int* degenerate_events = nullptr);

// Initial per-source thresholds: top-1% order statistic of |pinv(A)*X_eff|
// per projected source row, clamped to >= floor.
Vec initial_thresholds(const Mat& X_eff, const Mat& A_cur, double floor,
                       double pinv_tol = 1e-10);

SeparationResult gmca(const Mat& X, Index n, const SolverParams& params);

// One inner GMCA pass on X_eff: J alternations of source and mixing updates
// following the schedule. Shared by gmca and the robust solvers.
void gmca_pass(const Mat& X_eff, const ThresholdSchedule& schedule,
               const std::optional<Vec>& weights, double pinv_tol, Mat& A,
               Mat& S, Rng& rng, int* degenerate_events);

}  // namespace rbss
