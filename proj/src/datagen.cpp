#include "rbss/datagen.hpp"

#include <cmath>
#include <unordered_set>

namespace rbss {

namespace {

Mat bernoulli_gaussian(Index n, Index t, double activation, Rng& rng) {
  Mat S = Mat::Zero(n, t);
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < t; ++j)
      if (rng.uniform01() < activation) S(i, j) = rng.normal();
  return S;
}

void rescale_to_peak(Mat& S, double peak) {
  const double max_abs = S.cwiseAbs().maxCoeff();
  S *= peak / max_abs;
}

}  // namespace

Mat gen_sources(Index n, Index t, const SourceSpec& spec, Rng& rng) {
  if (n < 1 || t < 1) throw std::invalid_argument("gen_sources: dimensions must be >= 1");
  if (spec.activation < 0 || spec.activation > 1)
    throw std::invalid_argument("gen_sources: activation must lie in [0, 1]");
  if (spec.peak <= 0) throw std::invalid_argument("gen_sources: peak must be > 0");
  for (int attempt = 0; attempt < 10; ++attempt) {
    Mat S = bernoulli_gaussian(n, t, spec.activation, rng);
    if (S.cwiseAbs().maxCoeff() > 0) {
      rescale_to_peak(S, spec.peak);
      return S;
    }
  }
  throw std::runtime_error("gen_sources: degenerate all-zero draw after 10 attempts");
}

Mat gen_mixing(Index m, Index n, Rng& rng) {
  if (m < n || n < 1) throw std::invalid_argument("gen_mixing: require m >= n >= 1");
  for (;;) {
    Mat A(m, n);
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < m; ++i) A(i, j) = rng.normal();
    bool ok = true;
    for (Index j = 0; j < n && ok; ++j) {
      const double norm = A.col(j).norm();
      if (norm == 0) ok = false;
      else A.col(j) /= norm;
    }
    if (!ok) continue;
    // Rank check guards pathological seeded draws; full rank a.s.
    Eigen::ColPivHouseholderQR<Mat> qr(A);
    if (qr.rank() == n) return A;
  }
}

Mat gen_outliers(Index m, Index t, const OutlierSpec& spec, Rng& rng) {
  if (spec.amplitude_std < 0)
    throw std::invalid_argument("gen_outliers: amplitude_std must be >= 0");
  if (spec.n_scattered < 0 || spec.n_corrupted_columns < 0 ||
      spec.n_corrupted_columns > t ||
      spec.n_scattered > m * (t - spec.n_corrupted_columns))
    throw std::invalid_argument("gen_outliers: spec exceeds matrix capacity");

  Mat O = Mat::Zero(m, t);

  // Distinct corrupted columns via Floyd's sampling.
  std::unordered_set<Index> columns;
  for (Index k = t - spec.n_corrupted_columns; k < t; ++k) {
    Index c = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k) + 1));
    if (!columns.insert(c).second) columns.insert(k);
  }
  for (Index c : columns)
    for (Index i = 0; i < m; ++i) O(i, c) = spec.amplitude_std * rng.normal();

  // Scattered entries land outside corrupted columns so the total support
  // count is exact.
  std::vector<Index> free_cols;
  free_cols.reserve(t - spec.n_corrupted_columns);
  for (Index c = 0; c < t; ++c)
    if (!columns.count(c)) free_cols.push_back(c);

  const Index n_free = static_cast<Index>(free_cols.size()) * m;
  std::unordered_set<Index> positions;
  for (Index k = n_free - spec.n_scattered; k < n_free; ++k) {
    Index p = static_cast<Index>(rng.below(static_cast<std::uint64_t>(k) + 1));
    if (!positions.insert(p).second) positions.insert(k);
  }
  for (Index p : positions) {
    const Index i = p % m;
    const Index c = free_cols[static_cast<size_t>(p / m)];
    O(i, c) = spec.amplitude_std * rng.normal();
  }
  return O;
}

Mat gen_noise(Index m, Index t, double sigma, Rng& rng) {
  if (sigma < 0) throw std::invalid_argument("gen_noise: sigma must be >= 0");
  Mat N(m, t);
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < t; ++j) N(i, j) = sigma * rng.normal();
  return N;
}

Vec laplacian_kernel(double fwhm) {
  if (fwhm <= 0) throw std::invalid_argument("laplacian_kernel: fwhm must be > 0");
  const double rate = 2.0 * std::log(2.0) / fwhm;
  Index half = 0;
  while (std::exp(-rate * static_cast<double>(half + 1)) >= 1e-6) ++half;
  Vec kernel(2 * half + 1);
  for (Index k = -half; k <= half; ++k)
    kernel(k + half) = std::exp(-rate * std::abs(static_cast<double>(k)));
  kernel /= kernel.sum();
  return kernel;
}

Mat gen_spectra_like(Index n, Index t, const SourceSpec& spec, double kernel_fwhm, Rng& rng) {
  if (n < 1 || t < 1) throw std::invalid_argument("gen_spectra_like: dimensions must be >= 1");
  const Vec kernel = laplacian_kernel(kernel_fwhm);
  const Index half = (kernel.size() - 1) / 2;
  for (int attempt = 0; attempt < 10; ++attempt) {
    Mat spikes = bernoulli_gaussian(n, t, spec.activation, rng);
    if (spikes.cwiseAbs().maxCoeff() == 0) continue;
    Mat S = Mat::Zero(n, t);
    for (Index i = 0; i < n; ++i)
      for (Index j = 0; j < t; ++j) {
        const double spike = spikes(i, j);
        if (spike == 0) continue;
        const Index lo = std::max<Index>(0, j - half);
        const Index hi = std::min<Index>(t - 1, j + half);
        for (Index c = lo; c <= hi; ++c) S(i, c) += spike * kernel(c - j + half);
      }
    rescale_to_peak(S, spec.peak);
    return S;
  }
  throw std::runtime_error("gen_spectra_like: degenerate all-zero draw after 10 attempts");
}

}  // namespace rbss
