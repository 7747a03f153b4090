#include "rbss/bench.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <sstream>

#include "rbss/gmca.hpp"
#include "rbss/metrics.hpp"
#include "rbss/robust.hpp"

namespace rbss {

std::string to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::gmca: return "gmca";
    case Algorithm::nrgmca: return "nrgmca";
    case Algorithm::rgmca: return "rgmca";
    case Algorithm::pcp_gmca: return "pcp_gmca";
  }
  throw std::invalid_argument("unknown algorithm");
}

Algorithm algorithm_from_string(const std::string& name) {
  if (name == "gmca") return Algorithm::gmca;
  if (name == "nrgmca") return Algorithm::nrgmca;
  if (name == "rgmca") return Algorithm::rgmca;
  if (name == "pcp_gmca") return Algorithm::pcp_gmca;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string to_string(SweepParameter parameter) {
  switch (parameter) {
    case SweepParameter::outlier_std: return "outlier_std";
    case SweepParameter::corruption_fraction: return "corruption_fraction";
    case SweepParameter::n_observations: return "n_observations";
  }
  throw std::invalid_argument("unknown sweep parameter");
}

SweepParameter sweep_parameter_from_string(const std::string& name) {
  if (name == "outlier_std") return SweepParameter::outlier_std;
  if (name == "corruption_fraction") return SweepParameter::corruption_fraction;
  if (name == "n_observations") return SweepParameter::n_observations;
  throw std::invalid_argument("unknown sweep parameter: " + name);
}

void ExperimentConfig::validate() const {
  if (m < n || n < 1 || t <= m)
    throw std::invalid_argument("config: require t > m >= n >= 1");
  if (n_trials < 1) throw std::invalid_argument("config: trials must be >= 1");
  if (sweep_values.empty()) throw std::invalid_argument("config: sweep values must be non-empty");
  if (algorithms.empty()) throw std::invalid_argument("config: algorithm list must be non-empty");
  if (threads < 1) throw std::invalid_argument("config: threads must be >= 1");
  if (pcp_lambda_multiplier <= 0)
    throw std::invalid_argument("config: pcp lambda multiplier must be > 0");
  solver.validate();
  pcp.validate();
}

namespace {

struct SweptSetup {
  Index m;
  OutlierSpec outliers;
};

SweptSetup apply_sweep(const ExperimentConfig& config, double value) {
  SweptSetup setup{config.m, config.outlier_spec};
  switch (config.sweep_parameter) {
    case SweepParameter::outlier_std:
      setup.outliers.amplitude_std = value;
      break;
    case SweepParameter::corruption_fraction: {
      // Entries split half scattered / half corrupted columns, with the
      // scattered count tied to the column count so both halves are exact.
      const Index columns = static_cast<Index>(std::llround(value * static_cast<double>(config.t) / 2.0));
      setup.outliers.n_corrupted_columns = columns;
      setup.outliers.n_scattered = setup.m * columns;
      break;
    }
    case SweepParameter::n_observations: {
      setup.m = static_cast<Index>(std::llround(value));
      if (config.scattered_fraction >= 0)
        setup.outliers.n_scattered = static_cast<Index>(std::llround(
            config.scattered_fraction * static_cast<double>(setup.m) * static_cast<double>(config.t)));
      break;
    }
  }
  return setup;
}

}  // namespace

MixingScene make_trial_scene(const ExperimentConfig& config, int sweep_index, int trial) {
  const SweptSetup setup = apply_sweep(config, config.sweep_values[static_cast<size_t>(sweep_index)]);
  Rng rng(derive_seed(config.base_seed, static_cast<std::uint64_t>(sweep_index) + 1,
                      static_cast<std::uint64_t>(trial) + 1));
  const Mat S = config.source_kind == SourceKind::spectra
                    ? gen_spectra_like(config.n, config.t, config.source_spec, config.kernel_fwhm, rng)
                    : gen_sources(config.n, config.t, config.source_spec, rng);
  const Mat A = gen_mixing(setup.m, config.n, rng);
  const Mat O = gen_outliers(setup.m, config.t, setup.outliers, rng);
  const Mat N = gen_noise(setup.m, config.t, config.sigma, rng);
  return assemble_scene(A, S, O, N, config.sigma);
}

namespace {

TrialRecord run_trial(const ExperimentConfig& config, int sweep_index, int trial,
                      Algorithm algorithm) {
  TrialRecord record;
  record.algorithm = algorithm;
  record.sweep_parameter = config.sweep_parameter;
  record.sweep_value = config.sweep_values[static_cast<size_t>(sweep_index)];
  record.trial = trial;
  record.seed = derive_seed(config.base_seed, static_cast<std::uint64_t>(sweep_index) + 1,
                            static_cast<std::uint64_t>(trial) + 1);

  const auto start = std::chrono::steady_clock::now();
  try {
    const MixingScene scene = make_trial_scene(config, sweep_index, trial);
    SolverParams solver = config.solver;
    solver.rng_seed = derive_seed(record.seed, 0xA1);  // shared by all algorithms
    SeparationResult result;
    switch (algorithm) {
      case Algorithm::gmca: result = gmca(scene.X, config.n, solver); break;
      case Algorithm::nrgmca: result = nrgmca(scene.X, config.n, solver); break;
      case Algorithm::rgmca: result = rgmca(scene.X, config.n, solver); break;
      case Algorithm::pcp_gmca: {
        PcpParams pcp_params = config.pcp;
        if (pcp_params.lambda_pcp <= 0)
          pcp_params.lambda_pcp =
              config.pcp_lambda_multiplier /
              std::sqrt(static_cast<double>(std::max(scene.X.rows(), scene.X.cols())));
        const PcpResult decomposition = pcp(scene.X, pcp_params);
        result = gmca(decomposition.L, config.n, solver);
        result.O_est = decomposition.O_hat;
        record.converged = decomposition.converged;
        break;
      }
    }
    record.delta = delta_A(result.A_est, scene.A);
    record.succeeded = success(record.delta);
  } catch (const std::exception&) {
    // A failed trial is recorded as the failure sentinel, never fatal.
    record.delta = std::numeric_limits<double>::infinity();
    record.succeeded = false;
    record.converged = false;
  }
  if (config.timing == TimingMode::wall) {
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return record;
}

}  // namespace

std::vector<TrialRecord> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const size_t n_values = config.sweep_values.size();
  const size_t n_algorithms = config.algorithms.size();
  const size_t total = n_values * static_cast<size_t>(config.n_trials) * n_algorithms;
  std::vector<TrialRecord> records(total);

  auto cell = [&](size_t flat) {
    const size_t per_value = static_cast<size_t>(config.n_trials) * n_algorithms;
    const int sweep_index = static_cast<int>(flat / per_value);
    const int trial = static_cast<int>((flat % per_value) / n_algorithms);
    const Algorithm algorithm = config.algorithms[flat % n_algorithms];
    records[flat] = run_trial(config, sweep_index, trial, algorithm);
  };

  if (config.threads <= 1) {
    for (size_t flat = 0; flat < total; ++flat) cell(flat);
  } else {
    // Records land at fixed indices, so execution order never changes output.
    std::atomic<size_t> next{0};
    auto worker = [&] {
      for (size_t flat = next.fetch_add(1); flat < total; flat = next.fetch_add(1)) cell(flat);
    };
    std::vector<std::future<void>> pool;
    for (int i = 0; i < config.threads; ++i)
      pool.push_back(std::async(std::launch::async, worker));
    for (auto& f : pool) f.get();
  }
  return records;
}

std::vector<SummaryRow> summarize(const std::vector<TrialRecord>& records) {
  if (records.empty()) throw std::invalid_argument("summarize: no records");
  std::vector<std::pair<std::string, double>> order;
  std::map<std::pair<std::string, double>, std::vector<const TrialRecord*>> groups;
  for (const TrialRecord& record : records) {
    const auto key = std::make_pair(to_string(record.algorithm), record.sweep_value);
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&record);
  }

  std::vector<SummaryRow> rows;
  rows.reserve(order.size());
  for (const auto& key : order) {
    const auto& group = groups.at(key);
    std::vector<double> deltas;
    int successes = 0;
    for (const TrialRecord* record : group) {
      deltas.push_back(record->delta);  // inf sentinels sort last
      successes += record->succeeded ? 1 : 0;
    }
    std::sort(deltas.begin(), deltas.end());
    const size_t n = deltas.size();
    const double median = n % 2 == 1 ? deltas[n / 2]
                                     : 0.5 * (deltas[n / 2 - 1] + deltas[n / 2]);
    rows.push_back({key.first, key.second, median,
                    static_cast<double>(successes) / static_cast<double>(n),
                    static_cast<int>(n)});
  }
  return rows;
}

ExperimentConfig preset_experiment(const std::string& name) {
  ExperimentConfig config;
  config.m = 16;
  config.n = 8;
  config.t = 1024;
  config.source_spec = {0.05, 100.0};
  config.sigma = 0.1;
  config.n_trials = 80;
  config.algorithms = {Algorithm::gmca, Algorithm::nrgmca, Algorithm::rgmca,
                       Algorithm::pcp_gmca};
  if (name == "amplitude") {
    config.outlier_spec = {160, 10, 100.0};
    config.sweep_parameter = SweepParameter::outlier_std;
    config.sweep_values = {5, 10, 25, 50, 100, 200, 400};
  } else if (name == "count") {
    config.outlier_spec = {0, 0, 100.0};
    config.sweep_parameter = SweepParameter::corruption_fraction;
    config.sweep_values = {0.0, 0.01, 0.02, 0.05, 0.10};
  } else if (name == "observations") {
    config.n = 4;
    config.source_kind = SourceKind::spectra;
    config.kernel_fwhm = 2.0;
    config.outlier_spec = {0, 20, 1000.0};
    config.scattered_fraction = 0.01;
    config.sweep_parameter = SweepParameter::n_observations;
    config.sweep_values = {4, 5, 6, 8, 10, 12, 16};
  } else {
    throw std::invalid_argument("unknown preset: " + name);
  }
  return config;
}

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> items;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) items.push_back(item);
  }
  return items;
}

double parse_double(const std::string& value, const std::string& key) {
  try {
    size_t pos = 0;
    const double parsed = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad numeric value for " + key + ": " + value);
  }
}

long parse_long(const std::string& value, const std::string& key) {
  try {
    size_t pos = 0;
    const long parsed = std::stol(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return parsed;
  } catch (const std::exception&) {
    throw std::invalid_argument("config: bad integer value for " + key + ": " + value);
  }
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config = preset_experiment("amplitude");
  std::istringstream in(text);
  std::string line, section;
  int line_no = 0;
  bool sweep_values_set = false;
  while (std::getline(in, line)) {
    ++line_no;
    const auto comment = line.find('#');
    if (comment != std::string::npos) line.erase(comment);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw std::invalid_argument("config: malformed section at line " + std::to_string(line_no));
      section = trim(line.substr(1, line.size() - 2));
      if (section != "experiment" && section != "source" && section != "outliers" &&
          section != "sweep" && section != "run" && section != "solver" && section != "pcp")
        throw std::invalid_argument("config: unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config: expected key = value at line " + std::to_string(line_no));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const std::string qualified = section + "." + key;

    if (qualified == "experiment.preset") {
      if (sweep_values_set)
        throw std::invalid_argument("config: preset must come before other keys");
      config = preset_experiment(value);
    } else if (qualified == "experiment.m") {
      config.m = parse_long(value, qualified);
    } else if (qualified == "experiment.n") {
      config.n = parse_long(value, qualified);
    } else if (qualified == "experiment.t") {
      config.t = parse_long(value, qualified);
    } else if (qualified == "experiment.sigma") {
      config.sigma = parse_double(value, qualified);
    } else if (qualified == "source.activation") {
      config.source_spec.activation = parse_double(value, qualified);
    } else if (qualified == "source.peak") {
      config.source_spec.peak = parse_double(value, qualified);
    } else if (qualified == "source.kind") {
      if (value == "bernoulli_gaussian") config.source_kind = SourceKind::bernoulli_gaussian;
      else if (value == "spectra") config.source_kind = SourceKind::spectra;
      else throw std::invalid_argument("config: unknown source kind: " + value);
    } else if (qualified == "source.kernel_fwhm") {
      config.kernel_fwhm = parse_double(value, qualified);
    } else if (qualified == "outliers.scattered") {
      config.outlier_spec.n_scattered = parse_long(value, qualified);
    } else if (qualified == "outliers.corrupted_columns") {
      config.outlier_spec.n_corrupted_columns = parse_long(value, qualified);
    } else if (qualified == "outliers.amplitude_std") {
      config.outlier_spec.amplitude_std = parse_double(value, qualified);
    } else if (qualified == "outliers.scattered_fraction") {
      config.scattered_fraction = parse_double(value, qualified);
    } else if (qualified == "sweep.parameter") {
      config.sweep_parameter = sweep_parameter_from_string(value);
    } else if (qualified == "sweep.values") {
      config.sweep_values.clear();
      for (const std::string& item : split_list(value))
        config.sweep_values.push_back(parse_double(item, qualified));
      sweep_values_set = true;
    } else if (qualified == "run.trials") {
      config.n_trials = static_cast<int>(parse_long(value, qualified));
    } else if (qualified == "run.base_seed") {
      config.base_seed = static_cast<std::uint64_t>(std::stoull(value));
    } else if (qualified == "run.algorithms") {
      config.algorithms.clear();
      for (const std::string& item : split_list(value))
        config.algorithms.push_back(algorithm_from_string(item));
    } else if (qualified == "run.threads") {
      config.threads = static_cast<int>(parse_long(value, qualified));
    } else if (qualified == "run.timing") {
      if (value == "wall") config.timing = TimingMode::wall;
      else if (value == "none") config.timing = TimingMode::none;
      else throw std::invalid_argument("config: unknown timing mode: " + value);
    } else if (qualified == "solver.outer_iters") {
      config.solver.outer_iters = static_cast<int>(parse_long(value, qualified));
    } else if (qualified == "solver.inner_iters") {
      config.solver.inner_iters = static_cast<int>(parse_long(value, qualified));
    } else if (qualified == "solver.final_threshold_multiplier") {
      config.solver.final_threshold_multiplier = parse_double(value, qualified);
    } else if (qualified == "solver.pinv_tol") {
      config.solver.pinv_tol = parse_double(value, qualified);
    } else if (qualified == "solver.schedule") {
      if (value == "linear") config.solver.exponential_schedule = false;
      else if (value == "exponential") config.solver.exponential_schedule = true;
      else throw std::invalid_argument("config: unknown schedule: " + value);
    } else if (qualified == "pcp.lambda") {
      config.pcp.lambda_pcp = parse_double(value, qualified);
    } else if (qualified == "pcp.lambda_multiplier") {
      config.pcp_lambda_multiplier = parse_double(value, qualified);
    } else if (qualified == "pcp.tol") {
      config.pcp.tol = parse_double(value, qualified);
    } else if (qualified == "pcp.max_iters") {
      config.pcp.max_iters = static_cast<int>(parse_long(value, qualified));
    } else if (qualified == "pcp.mu0") {
      config.pcp.mu0 = parse_double(value, qualified);
    } else if (qualified == "pcp.rho") {
      config.pcp.rho = parse_double(value, qualified);
    } else {
      throw std::invalid_argument("config: unknown key: " + qualified);
    }
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open config: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

std::string format_double(double value) {
  if (std::isinf(value)) return "inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return buf;
}

}  // namespace

std::string records_to_csv(const std::vector<TrialRecord>& records) {
  std::ostringstream out;
  out << "algorithm,sweep_param,sweep_value,trial,seed,delta_A,success,wall_time_s,converged\n";
  char time_buf[40];
  for (const TrialRecord& record : records) {
    std::snprintf(time_buf, sizeof time_buf, "%.6f", record.wall_time_s);
    out << to_string(record.algorithm) << ',' << to_string(record.sweep_parameter) << ','
        << format_double(record.sweep_value) << ',' << record.trial << ',' << record.seed << ','
        << format_double(record.delta) << ',' << (record.succeeded ? 1 : 0) << ','
        << time_buf << ',' << (record.converged ? 1 : 0) << "\n";
  }
  return out.str();
}

std::vector<TrialRecord> records_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("records CSV: empty input");
  if (trim(line) != "algorithm,sweep_param,sweep_value,trial,seed,delta_A,success,wall_time_s,converged")
    throw std::invalid_argument("records CSV: unexpected header");
  std::vector<TrialRecord> records;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_list(line);
    if (fields.size() != 9) throw std::invalid_argument("records CSV: bad row: " + line);
    TrialRecord record;
    record.algorithm = algorithm_from_string(fields[0]);
    record.sweep_parameter = sweep_parameter_from_string(fields[1]);
    record.sweep_value = parse_double(fields[2], "sweep_value");
    record.trial = static_cast<int>(parse_long(fields[3], "trial"));
    record.seed = std::stoull(fields[4]);
    record.delta = fields[5] == "inf" ? std::numeric_limits<double>::infinity()
                                      : parse_double(fields[5], "delta_A");
    record.succeeded = parse_long(fields[6], "success") != 0;
    record.wall_time_s = parse_double(fields[7], "wall_time_s");
    record.converged = parse_long(fields[8], "converged") != 0;
    records.push_back(record);
  }
  return records;
}

std::string summary_to_csv(const std::vector<SummaryRow>& rows) {
  std::ostringstream out;
  out << "algorithm,sweep_value,median_delta_A,success_rate,n_trials\n";
  for (const SummaryRow& row : rows) {
    out << row.algorithm << ',' << format_double(row.sweep_value) << ','
        << format_double(row.median_delta) << ',' << format_double(row.success_rate) << ','
        << row.n_trials << "\n";
  }
  return out.str();
}

}  // namespace rbss
