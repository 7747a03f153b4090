// Mixing-matrix error criterion delta_A with permutation/sign alignment,
// and the success-probability threshold.
#pragma once

#include <vector>

#include "rbss/core.hpp"

namespace rbss {

// Permutation pi and signs resolving the BSS column ambiguity:
// column pi[j] of A_est matches column j of A_true with sign signs[j].
struct Alignment {
  std::vector<Index> permutation;
  std::vector<int> signs;
};

// Optimal assignment on the absolute-correlation matrix, maximizing
// sum_j |<A_est_{pi(j)}, A_true_j>|.
Alignment align_columns(const Mat& A_est, const Mat& A_true);

// delta_A = sum |pinv(A_aligned) * A_true - I| / n^2 after alignment.
// Rank-deficient estimates return +infinity, counted as failure.
double delta_A(const Mat& A_est, const Mat& A_true);

inline constexpr double kSuccessThreshold = 5e-3;

inline bool success(double delta) { return delta < kSuccessThreshold; }

// Minimum-cost assignment on a square cost matrix (Hungarian algorithm);
// returns the column assigned to each row.
std::vector<Index> solve_assignment(const Mat& cost);

}  // namespace rbss
