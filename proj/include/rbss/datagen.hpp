// Seeded synthetic generation of sources, mixing matrices, outliers and noise.
#pragma once

#include "rbss/core.hpp"
#include "rbss/rng.hpp"

namespace rbss {

struct SourceSpec {
  double activation = 0.05;  // Bernoulli activation probability
  double peak = 100.0;       // target largest-entry magnitude
};

struct OutlierSpec {
  Index n_scattered = 0;          // entries at uniform-random positions
  Index n_corrupted_columns = 0;  // columns corrupted in every observation
  double amplitude_std = 0.0;
};

// Bernoulli-Gaussian sources rescaled so max|entry| == spec.peak.
Mat gen_sources(Index n, Index t, const SourceSpec& spec, Rng& rng);

// Standard-normal mixing matrix with unit-l2 columns, full column rank.
Mat gen_mixing(Index m, Index n, Rng& rng);

// Exactly n_corrupted_columns fully corrupted columns plus n_scattered
// Gaussian entries at distinct positions outside those columns.
Mat gen_outliers(Index m, Index t, const OutlierSpec& spec, Rng& rng);

Mat gen_noise(Index m, Index t, double sigma, Rng& rng);

// Spike trains convolved per row with a two-sided exponential kernel of the
// given full width at half maximum, then rescaled to spec.peak.
Mat gen_spectra_like(Index n, Index t, const SourceSpec& spec, double kernel_fwhm, Rng& rng);

// Kernel weights exp(-|k| * 2 ln2 / fwhm), truncated below 1e-6 and
// l1-normalized. Exposed for direct checks.
Vec laplacian_kernel(double fwhm);

}  // namespace rbss
