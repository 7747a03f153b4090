// Problem and result value types shared by all solvers, plus scene I/O.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "rbss/core.hpp"

namespace rbss {

// Ground-truth bundle: X = A*S + O + N assembled exactly from its parts.
struct MixingScene {
  Mat X;  // m x t observations
  Mat A;  // m x n mixing, unit-l2 columns
  Mat S;  // n x t sources
  Mat O;  // m x t outliers
  Mat N;  // m x t Gaussian noise
  double sigma = 0.0;

  Index m() const { return X.rows(); }
  Index n() const { return A.cols(); }
  Index t() const { return X.cols(); }
};

// Estimated factors with convergence diagnostics. O_est is all-zero for
// algorithms that do not model outliers, so one type serves every solver.
struct SeparationResult {
  Mat A_est;
  Mat S_est;
  Mat O_est;
  int outer_iterations = 0;
  int inner_iterations = 0;
  double residual_norm = 0.0;
  double sigma_hat = 0.0;  // noise scale used for the final thresholds
  int degenerate_updates = 0;  // zero-row / all-zero source events
  bool eps_fallback_used = false;
};

struct SolverParams {
  int outer_iters = 10;                     // K
  int inner_iters = 300;                    // J
  double final_threshold_multiplier = 3.0;  // floor = multiplier * sigma_hat
  std::uint64_t rng_seed = 0;
  double pinv_tol = 1e-10;
  bool exponential_schedule = false;  // linear decrease by default

  void validate() const;
};

MixingScene assemble_scene(const Mat& A, const Mat& S, const Mat& O,
                           const Mat& N, double sigma);

// Directory layout: one CSV per matrix (first line "rows,cols", then full
// precision row-major values) plus sigma.csv. Replayable across runs.
void save_scene(const MixingScene& scene, const std::filesystem::path& dir);
MixingScene load_scene(const std::filesystem::path& dir);

void save_matrix_csv(const Mat& M, const std::filesystem::path& file);
Mat load_matrix_csv(const std::filesystem::path& file);

}  // namespace rbss
