// Principal Component Pursuit via inexact augmented Lagrangian, plus the
// PCP+GMCA two-step pipeline used as a comparison baseline.
#pragma once

#include "rbss/gmca.hpp"
#include "rbss/model.hpp"

namespace rbss {

struct PcpParams {
  double lambda_pcp = 0.0;  // <= 0 means the default 1/sqrt(max(m, t))
  double tol = 1e-7;        // relative residual stopping criterion
  int max_iters = 500;
  double mu0 = 0.0;         // <= 0 means the default 1.25 / ||X||_2
  double rho = 1.2;         // penalty growth factor

  void validate() const;
};

struct PcpResult {
  Mat L;       // low-rank part
  Mat O_hat;   // sparse part
  int iterations = 0;
  bool converged = false;
  double rel_residual = 0.0;  // ||X - L - O||_F / ||X||_F at exit
};

// Proximal operator of the nuclear norm: shrink every singular value by tau.
Mat singular_value_threshold(const Mat& M, double tau);

// min ||L||_* + lambda ||O||_1  s.t.  L + O = X.
PcpResult pcp(const Mat& X, const PcpParams& params = {});

// Outliers estimated with PCP and discarded, then plain GMCA on L.
SeparationResult pcp_gmca(const Mat& X, Index n, const SolverParams& params,
                          const PcpParams& pcp_params = {});

}  // namespace rbss
