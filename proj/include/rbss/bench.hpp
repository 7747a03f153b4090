// Monte-Carlo experiment harness: seeded sweeps over outlier amplitude,
// corruption fraction or observation count, with CSV persistence.
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "rbss/datagen.hpp"
#include "rbss/model.hpp"
#include "rbss/pcp.hpp"

namespace rbss {

enum class Algorithm { gmca, nrgmca, rgmca, pcp_gmca };

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

enum class SweepParameter { outlier_std, corruption_fraction, n_observations };

std::string to_string(SweepParameter parameter);
SweepParameter sweep_parameter_from_string(const std::string& name);

enum class SourceKind { bernoulli_gaussian, spectra };
enum class TimingMode { wall, none };  // `none` keeps the records CSV byte-reproducible

struct ExperimentConfig {
  Index m = 16, n = 8, t = 1024;
  SourceSpec source_spec;
  SourceKind source_kind = SourceKind::bernoulli_gaussian;
  double kernel_fwhm = 2.0;
  OutlierSpec outlier_spec;
  // When >= 0 and m is swept, the scattered count is recomputed as
  // round(scattered_fraction * m * t).
  double scattered_fraction = -1.0;
  double sigma = 0.1;
  SweepParameter sweep_parameter = SweepParameter::outlier_std;
  std::vector<double> sweep_values;
  int n_trials = 80;
  std::uint64_t base_seed = 0;
  std::vector<Algorithm> algorithms;
  SolverParams solver;
  PcpParams pcp;
  // Used when pcp.lambda_pcp is unset: lambda = multiplier / sqrt(max(m, t)).
  // The default is tuned on the amplitude preset, where the universal 1.0
  // lets the sparse term swallow the spiky source contribution.
  double pcp_lambda_multiplier = 4.0;
  int threads = 1;
  TimingMode timing = TimingMode::wall;

  void validate() const;
};

struct TrialRecord {
  Algorithm algorithm;
  SweepParameter sweep_parameter;
  double sweep_value = 0.0;
  int trial = 0;
  std::uint64_t seed = 0;
  double delta = 0.0;  // +inf sentinel on failed trials
  bool succeeded = false;
  double wall_time_s = 0.0;
  bool converged = true;
};

struct SummaryRow {
  std::string algorithm;
  double sweep_value = 0.0;
  double median_delta = 0.0;
  double success_rate = 0.0;
  int n_trials = 0;
};

// Scene for one (sweep value, trial) cell; every algorithm in the sweep sees
// the identical scene. Exposed for replaying individual trials.
MixingScene make_trial_scene(const ExperimentConfig& config, int sweep_index, int trial);

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config);

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records);

// Paper-setup presets: "amplitude", "count", "observations".
ExperimentConfig preset_experiment(const std::string& name);

// Plain-text config with [section] key = value lines; unknown keys are
// errors. Missing fields keep the amplitude-preset defaults.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::filesystem::path& file);

std::string records_to_csv(const std::vector<TrialRecord>& records);
std::vector<TrialRecord> records_from_csv(const std::string& text);
std::string summary_to_csv(const std::vector<SummaryRow>& rows);

}  // namespace rbss
