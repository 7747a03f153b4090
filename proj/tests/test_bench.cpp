#include <doctest.h>

#include "test_util.hpp"

#include <set>

#include "rbss/bench.hpp"

using namespace rbss;

namespace {

// Small, fast configuration for harness-level tests.
ExperimentConfig desk_config() {
  ExperimentConfig config = preset_experiment("amplitude");
  config.m = 8;
  config.n = 4;
  config.t = 128;
  config.outlier_spec = {10, 2, 100.0};
  config.solver.outer_iters = 2;
  config.solver.inner_iters = 10;
  config.n_trials = 2;
  config.timing = TimingMode::none;
  return config;
}

}  // namespace

TEST_CASE("run_sweep cardinality contracts") {
  ExperimentConfig config = desk_config();
  config.sweep_values = {100.0};
  config.n_trials = 1;
  config.algorithms = {Algorithm::gmca};
  CHECK(run_sweep(config).size() == 1);

  config.sweep_values = {10.0, 100.0, 400.0};
  config.n_trials = 5;
  config.algorithms = {Algorithm::gmca, Algorithm::rgmca};
  const auto records = run_sweep(config);
  CHECK(records.size() == 30);
  std::set<std::tuple<std::string, double, int>> keys;
  for (const TrialRecord& record : records)
    keys.insert({to_string(record.algorithm), record.sweep_value, record.trial});
  CHECK(keys.size() == 30);
}

TEST_CASE("run_sweep output is byte-identical across repeats") {
  ExperimentConfig config = desk_config();
  config.sweep_values = {50.0, 200.0};
  config.algorithms = {Algorithm::gmca, Algorithm::rgmca};
  const std::string first = records_to_csv(run_sweep(config));
  const std::string second = records_to_csv(run_sweep(config));
  CHECK(first == second);
}

TEST_CASE("paired scenes: every algorithm sees identical observations") {
  const ExperimentConfig config = desk_config();
  const MixingScene a = make_trial_scene(config, 0, 1);
  const MixingScene b = make_trial_scene(config, 0, 1);
  CHECK(testutil::bitwise_equal(a.X, b.X));
  const MixingScene other_trial = make_trial_scene(config, 0, 0);
  CHECK(!testutil::bitwise_equal(a.X, other_trial.X));
}

TEST_CASE("summarize median and success rate") {
  std::vector<TrialRecord> records(3);
  const double deltas[] = {0.001, 0.002, 0.1};
  for (int i = 0; i < 3; ++i) {
    records[i].algorithm = Algorithm::gmca;
    records[i].sweep_value = 1.0;
    records[i].trial = i;
    records[i].delta = deltas[i];
    records[i].succeeded = deltas[i] < 5e-3;
  }
  const auto rows = summarize(records);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0].median_delta == doctest::Approx(0.002));
  CHECK(rows[0].success_rate == doctest::Approx(2.0 / 3.0));
  CHECK(rows[0].n_trials == 3);
}

TEST_CASE("summarize with all-failure sentinels") {
  std::vector<TrialRecord> records(2);
  for (auto& record : records) {
    record.algorithm = Algorithm::rgmca;
    record.delta = std::numeric_limits<double>::infinity();
  }
  const auto rows = summarize(records);
  CHECK(std::isinf(rows[0].median_delta));
  CHECK(rows[0].success_rate == 0.0);
}

TEST_CASE("summarize matches a full-sort oracle on many records") {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> dist(0.0, 0.02);
  std::vector<TrialRecord> records(80);
  std::vector<double> deltas;
  int successes = 0;
  for (int i = 0; i < 80; ++i) {
    records[i].algorithm = Algorithm::nrgmca;
    records[i].sweep_value = 2.0;
    records[i].trial = i;
    records[i].delta = dist(gen);
    records[i].succeeded = records[i].delta < 5e-3;
    deltas.push_back(records[i].delta);
    successes += records[i].succeeded;
  }
  std::sort(deltas.begin(), deltas.end());
  const auto rows = summarize(records);
  CHECK(rows[0].median_delta == doctest::Approx(0.5 * (deltas[39] + deltas[40])));
  CHECK(rows[0].success_rate == doctest::Approx(successes / 80.0));
}

TEST_CASE("presets carry the documented experiment values") {
  const ExperimentConfig amplitude = preset_experiment("amplitude");
  CHECK(amplitude.m == 16);
  CHECK(amplitude.n == 8);
  CHECK(amplitude.t == 1024);
  CHECK(amplitude.outlier_spec.n_scattered == 160);
  CHECK(amplitude.outlier_spec.n_corrupted_columns == 10);
  CHECK(amplitude.n_trials == 80);

  const ExperimentConfig observations = preset_experiment("observations");
  CHECK(observations.n == 4);
  CHECK(observations.outlier_spec.n_corrupted_columns == 20);
  CHECK(observations.outlier_spec.amplitude_std == 1000.0);
  CHECK(observations.sigma == 0.1);
  CHECK(observations.source_kind == SourceKind::spectra);

  CHECK_THROWS_AS(preset_experiment("nope"), std::invalid_argument);
}

TEST_CASE("count preset ties scattered entries to corrupted columns") {
  ExperimentConfig config = preset_experiment("count");
  config.n_trials = 1;
  config.sweep_values = {0.02};
  // 2% of 16x1024 entries: 10 columns and 16*10 scattered entries.
  const MixingScene scene = make_trial_scene(config, 0, 0);
  const Index nonzeros = (scene.O.array() != 0).count();
  CHECK(nonzeros == 16 * 10 + 160);
}

TEST_CASE("config parsing roundtrip and unknown-key rejection") {
  const std::string text = R"(
[experiment]
m = 8
n = 4
t = 256
sigma = 0.05
[sweep]
parameter = corruption_fraction
values = 0.0, 0.02
[run]
trials = 3
base_seed = 17
algorithms = gmca, rgmca
timing = none
[solver]
inner_iters = 12
)";
  const ExperimentConfig config = parse_config(text);
  CHECK(config.m == 8);
  CHECK(config.sigma == 0.05);
  CHECK(config.sweep_parameter == SweepParameter::corruption_fraction);
  CHECK(config.sweep_values == std::vector<double>{0.0, 0.02});
  CHECK(config.n_trials == 3);
  CHECK(config.base_seed == 17);
  CHECK(config.algorithms.size() == 2);
  CHECK(config.solver.inner_iters == 12);
  CHECK(config.timing == TimingMode::none);

  CHECK_THROWS_AS(parse_config("[experiment]\nbogus = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[nope]\nm = 1\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_config("[experiment]\nm == 1x\n"), std::invalid_argument);
}

TEST_CASE("records CSV round-trips including the inf sentinel") {
  std::vector<TrialRecord> records(2);
  records[0].algorithm = Algorithm::pcp_gmca;
  records[0].sweep_value = 400.0;
  records[0].trial = 7;
  records[0].seed = 123456789;
  records[0].delta = 0.00123456789;
  records[0].succeeded = true;
  records[1].algorithm = Algorithm::gmca;
  records[1].delta = std::numeric_limits<double>::infinity();
  records[1].converged = false;

  const std::string csv = records_to_csv(records);
  const auto parsed = records_from_csv(csv);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].algorithm == Algorithm::pcp_gmca);
  CHECK(parsed[0].delta == records[0].delta);
  CHECK(parsed[0].seed == records[0].seed);
  CHECK(std::isinf(parsed[1].delta));
  CHECK_FALSE(parsed[1].converged);
}

TEST_CASE("trial failures are recorded, not fatal") {
  ExperimentConfig config = desk_config();
  config.sweep_values = {1.0};
  config.n_trials = 1;
  config.algorithms = {Algorithm::gmca};
  config.source_spec.activation = 0.0;  // degenerate sources fail generation
  const auto records = run_sweep(config);
  REQUIRE(records.size() == 1);
  CHECK(std::isinf(records[0].delta));
  CHECK_FALSE(records[0].succeeded);
}
