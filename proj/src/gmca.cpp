#include "rbss/gmca.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "rbss/datagen.hpp"

namespace rbss {

Vec ThresholdSchedule::value_at(int step) const {
  if (step < 0 || step >= steps)
    throw std::invalid_argument("ThresholdSchedule: step out of range");
  if (steps == 1) return Vec::Constant(initial.size(), floor);
  const double frac = static_cast<double>(step) / static_cast<double>(steps - 1);
  Vec out(initial.size());
  for (Index r = 0; r < initial.size(); ++r) {
    const double hi = std::max(initial(r), floor);
    if (step == steps - 1) {
      out(r) = floor;
    } else if (exponential) {
      out(r) = floor > 0 ? hi * std::pow(floor / hi, frac)
                         : hi * std::pow(1e-12, frac);
    } else {
      out(r) = hi + frac * (floor - hi);
    }
  }
  return out;
}

double estimate_noise_sigma(const Mat& X) {
  if (X.size() == 0) throw std::invalid_argument("estimate_noise_sigma: empty input");
  return mad_sigma(X);
}

Mat update_sources(const Mat& X_eff, const Mat& A_cur, const Vec& thresholds,
                   double pinv_tol) {
  if (A_cur.rows() != X_eff.rows())
    throw std::invalid_argument("update_sources: A and X row counts differ");
  if (thresholds.size() != A_cur.cols())
    throw std::invalid_argument("update_sources: one threshold per source required");
  // Materialized first: entrywise access to a nested product expression
  // re-evaluates the whole GEMM per coefficient.
  const Mat P = pseudo_inverse(A_cur, pinv_tol) * X_eff;
  return soft_threshold(P, thresholds);
}

Mat update_mixing(const Mat& X_eff, const Mat& S_cur,
                  const std::optional<Vec>& weights, double pinv_tol,
                  const Mat& A_prev, Rng& rng, int* degenerate_events) {
  const Index n = S_cur.rows();
  if (A_prev.cols() != n || A_prev.rows() != X_eff.rows() || S_cur.cols() != X_eff.cols())
    throw std::invalid_argument("update_mixing: non-conformable shapes");
  if (weights && (weights->size() != S_cur.cols() || (weights->array() <= 0).any()))
    throw std::invalid_argument("update_mixing: weights must be positive, one per sample");

  std::vector<Index> active;
  active.reserve(n);
  for (Index r = 0; r < n; ++r)
    if ((S_cur.row(r).array() != 0).any()) active.push_back(r);

  Mat A = A_prev;
  if (active.empty()) {
    if (degenerate_events) ++*degenerate_events;
    return A;
  }
  if (static_cast<Index>(active.size()) < n && degenerate_events)
    ++*degenerate_events;

  Mat S_active(static_cast<Index>(active.size()), S_cur.cols());
  for (Index k = 0; k < S_active.rows(); ++k) S_active.row(k) = S_cur.row(active[k]);

  Mat A_active;
  if (weights) {
    const auto D = weights->asDiagonal();
    A_active = (X_eff * D) * pseudo_inverse(S_active * D, pinv_tol);
  } else {
    A_active = X_eff * pseudo_inverse(S_active, pinv_tol);
  }
  for (Index k = 0; k < S_active.rows(); ++k) A.col(active[k]) = A_active.col(k);

  for (Index j = 0; j < n; ++j) {
    double norm = A.col(j).norm();
    while (norm == 0) {
      for (Index i = 0; i < A.rows(); ++i) A(i, j) = rng.normal();
      norm = A.col(j).norm();
      if (degenerate_events) ++*degenerate_events;
    }
    A.col(j) /= norm;
  }
  return A;
}

namespace {

// Smallest retained support at the start of a pass: the top 1% of samples
// (at least two) per projected source.
Index initial_support(Index t) {
  Index q = std::max<Index>(2, static_cast<Index>(std::ceil(0.01 * static_cast<double>(t))));
  return std::min(q, t);
}

// q-th largest |entry| of row r of P.
double row_order_stat(const Mat& P, Index r, Index q, std::vector<double>& buf) {
  const Index t = P.cols();
  buf.resize(static_cast<size_t>(t));
  for (Index j = 0; j < t; ++j) buf[static_cast<size_t>(j)] = std::abs(P(r, j));
  std::nth_element(buf.begin(), buf.begin() + (q - 1), buf.end(), std::greater<double>());
  return buf[static_cast<size_t>(q - 1)];
}

// Two mixing columns latching onto the same source stall the whole
// separation; redraw the second of any near-parallel pair.
constexpr double kMaxColumnCoherence = 0.95;

void rerandomize_coherent_columns(Mat& A, Rng& rng, int* degenerate_events) {
  for (Index c1 = 0; c1 < A.cols(); ++c1)
    for (Index c2 = c1 + 1; c2 < A.cols(); ++c2)
      if (std::abs(A.col(c1).dot(A.col(c2))) > kMaxColumnCoherence) {
        double norm = 0;
        while (norm == 0) {
          for (Index i = 0; i < A.rows(); ++i) A(i, c2) = rng.normal();
          norm = A.col(c2).norm();
        }
        A.col(c2) /= norm;
        if (degenerate_events) ++*degenerate_events;
      }
}

}  // namespace

Vec initial_thresholds(const Mat& X_eff, const Mat& A_cur, double floor,
                       double pinv_tol) {
  const Mat P = pseudo_inverse(A_cur, pinv_tol) * X_eff;
  const Index q = initial_support(P.cols());
  Vec out(P.rows());
  std::vector<double> buf;
  for (Index r = 0; r < P.rows(); ++r)
    out(r) = std::max(row_order_stat(P, r, q, buf), floor);
  return out;
}

void gmca_pass(const Mat& X_eff, const ThresholdSchedule& schedule,
               const std::optional<Vec>& weights, double pinv_tol, Mat& A,
               Mat& S, Rng& rng, int* degenerate_events) {
  const Index t = X_eff.cols();
  const Index n = A.cols();
  const Index q0 = initial_support(t);
  std::vector<double> buf;
  for (int j = 0; j < schedule.steps; ++j) {
    // Thresholds are refreshed from the current projection each step and
    // mapped onto the decreasing schedule as a growing retained support:
    // from the top 1% of samples per source down to the 3-sigma floor.
    const Mat P = pseudo_inverse(A, pinv_tol) * X_eff;
    const double frac =
        schedule.steps == 1
            ? 1.0
            : static_cast<double>(j) / static_cast<double>(schedule.steps - 1);
    Index q;
    if (schedule.exponential) {
      q = static_cast<Index>(std::llround(
          q0 * std::pow(static_cast<double>(t) / static_cast<double>(q0), frac)));
    } else {
      q = q0 + static_cast<Index>(std::llround(frac * static_cast<double>(t - q0)));
    }
    q = std::min(std::max(q, q0), t);
    Vec lam(n);
    for (Index r = 0; r < n; ++r)
      lam(r) = std::max(row_order_stat(P, r, q, buf), schedule.floor);
    S = soft_threshold(P, lam);
    A = update_mixing(X_eff, S, weights, pinv_tol, A, rng, degenerate_events);
    rerandomize_coherent_columns(A, rng, degenerate_events);
  }
  // Final refresh keeps the returned sources consistent with the returned
  // mixing matrix at the floor threshold.
  S = update_sources(X_eff, A, Vec::Constant(n, schedule.floor), pinv_tol);
}

SeparationResult gmca(const Mat& X, Index n, const SolverParams& params) {
  params.validate();
  if (X.rows() < n || n < 1)
    throw std::invalid_argument("gmca: require m >= n >= 1");

  Rng rng(params.rng_seed);
  Mat A = gen_mixing(X.rows(), n, rng);

  const double sigma_hat = estimate_noise_sigma(X);
  const double floor = params.final_threshold_multiplier * sigma_hat;

  ThresholdSchedule schedule;
  schedule.initial = initial_thresholds(X, A, floor, params.pinv_tol);
  schedule.floor = floor;
  schedule.steps = params.inner_iters;
  schedule.exponential = params.exponential_schedule;

  SeparationResult result;
  Mat S = Mat::Zero(n, X.cols());
  gmca_pass(X, schedule, std::nullopt, params.pinv_tol, A, S, rng,
            &result.degenerate_updates);

  result.A_est = A;
  result.S_est = S;
  result.O_est = Mat::Zero(X.rows(), X.cols());
  result.outer_iterations = 1;
  result.inner_iterations = params.inner_iters;
  result.residual_norm = (X - A * S).norm();
  result.sigma_hat = sigma_hat;
  return result;
}

}  // namespace rbss
