// Command-line front end: scene generation, single solves, Monte-Carlo
// sweeps and records summarization.
#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>

#include "rbss/bench.hpp"
#include "rbss/metrics.hpp"
#include "rbss/robust.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalidConfig = 1;
constexpr int kExitIoError = 2;

void write_text(const std::filesystem::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw std::runtime_error("cannot open for writing: " + file.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + file.string());
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw std::runtime_error("cannot open for reading: " + file.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Robust sparse blind source separation toolkit"};
  app.require_subcommand(1);

  // generate: emit a synthetic scene directory.
  auto* generate = app.add_subcommand("generate", "Generate a synthetic scene to disk");
  struct {
    long m = 16, n = 8, t = 1024;
    double activation = 0.05, peak = 100.0;
    long scattered = 160, columns = 10;
    double outlier_std = 100.0, sigma = 0.1;
    bool spectra = false;
    double fwhm = 2.0;
    std::uint64_t seed = 0;
    std::string out;
  } gen;
  generate->add_option("--m", gen.m, "Observations");
  generate->add_option("--n", gen.n, "Sources");
  generate->add_option("--t", gen.t, "Samples");
  generate->add_option("--activation", gen.activation, "Bernoulli activation probability");
  generate->add_option("--peak", gen.peak, "Largest source magnitude");
  generate->add_option("--scattered", gen.scattered, "Scattered outlier entries");
  generate->add_option("--columns", gen.columns, "Entirely corrupted columns");
  generate->add_option("--outlier-std", gen.outlier_std, "Outlier amplitude std");
  generate->add_option("--sigma", gen.sigma, "Gaussian noise std");
  generate->add_flag("--spectra", gen.spectra, "Laplacian-kernel spectra-like sources");
  generate->add_option("--fwhm", gen.fwhm, "Kernel width at half maximum");
  generate->add_option("--seed", gen.seed, "RNG seed");
  generate->add_option("--out", gen.out, "Output scene directory")->required();

  // run: solve one scene and print delta_A.
  auto* run = app.add_subcommand("run", "Run one solver on a scene directory");
  struct {
    std::string scene;
    std::string algorithm = "rgmca";
    long outer = 10, inner = 100;
    std::uint64_t seed = 0;
  } single;
  run->add_option("--scene", single.scene, "Scene directory")->required();
  run->add_option("--algorithm", single.algorithm, "gmca | nrgmca | rgmca | pcp_gmca");
  run->add_option("--outer-iters", single.outer, "Outer iterations K");
  run->add_option("--inner-iters", single.inner, "Inner iterations J");
  run->add_option("--seed", single.seed, "Solver RNG seed");

  // bench: preset or config-file sweep.
  auto* bench = app.add_subcommand("bench", "Run a Monte-Carlo sweep");
  struct {
    std::string preset;
    std::string config;
    std::string out = "records.csv";
    long trials = -1;
    long threads = -1;
    std::uint64_t seed = 0;
    bool seed_set = false;
  } sweep;
  bench->add_option("--preset", sweep.preset, "amplitude | count | observations");
  bench->add_option("--config", sweep.config, "Config file (overrides preset)");
  bench->add_option("--out", sweep.out, "Records CSV output path");
  bench->add_option("--trials", sweep.trials, "Override trial count");
  bench->add_option("--threads", sweep.threads, "Override worker thread count");
  bench->add_option("--seed", sweep.seed, "Override base seed")
      ->each([&](const std::string&) { sweep.seed_set = true; });

  // summarize: records CSV -> summary CSV.
  auto* summarize_cmd = app.add_subcommand("summarize", "Summarize a records CSV");
  struct {
    std::string in;
    std::string out = "summary.csv";
  } sum;
  summarize_cmd->add_option("--in", sum.in, "Records CSV path")->required();
  summarize_cmd->add_option("--out", sum.out, "Summary CSV output path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*generate) {
      rbss::Rng rng(gen.seed);
      const rbss::SourceSpec source_spec{gen.activation, gen.peak};
      const rbss::Mat S =
          gen.spectra
              ? rbss::gen_spectra_like(gen.n, gen.t, source_spec, gen.fwhm, rng)
              : rbss::gen_sources(gen.n, gen.t, source_spec, rng);
      const rbss::Mat A = rbss::gen_mixing(gen.m, gen.n, rng);
      const rbss::OutlierSpec outlier_spec{gen.scattered, gen.columns, gen.outlier_std};
      const rbss::Mat O = rbss::gen_outliers(gen.m, gen.t, outlier_spec, rng);
      const rbss::Mat N = rbss::gen_noise(gen.m, gen.t, gen.sigma, rng);
      rbss::save_scene(rbss::assemble_scene(A, S, O, N, gen.sigma), gen.out);
      std::cout << "scene written to " << gen.out << "\n";
    } else if (*run) {
      const rbss::MixingScene scene = rbss::load_scene(single.scene);
      rbss::SolverParams params;
      params.outer_iters = static_cast<int>(single.outer);
      params.inner_iters = static_cast<int>(single.inner);
      params.rng_seed = single.seed;
      const rbss::Algorithm algorithm = rbss::algorithm_from_string(single.algorithm);
      rbss::SeparationResult result;
      switch (algorithm) {
        case rbss::Algorithm::gmca: result = rbss::gmca(scene.X, scene.n(), params); break;
        case rbss::Algorithm::nrgmca: result = rbss::nrgmca(scene.X, scene.n(), params); break;
        case rbss::Algorithm::rgmca: result = rbss::rgmca(scene.X, scene.n(), params); break;
        case rbss::Algorithm::pcp_gmca:
          result = rbss::pcp_gmca(scene.X, scene.n(), params);
          break;
      }
      const double delta = rbss::delta_A(result.A_est, scene.A);
      std::printf("delta_A = %.6g (%s)\n", delta,
                  rbss::success(delta) ? "success" : "failure");
    } else if (*bench) {
      rbss::ExperimentConfig config;
      if (!sweep.config.empty()) {
        config = rbss::load_config(sweep.config);
      } else if (!sweep.preset.empty()) {
        config = rbss::preset_experiment(sweep.preset);
      } else {
        std::cerr << "bench: either --preset or --config is required\n";
        return kExitInvalidConfig;
      }
      if (sweep.trials > 0) config.n_trials = static_cast<int>(sweep.trials);
      if (sweep.threads > 0) config.threads = static_cast<int>(sweep.threads);
      if (sweep.seed_set) config.base_seed = sweep.seed;
      const std::vector<rbss::TrialRecord> records = rbss::run_sweep(config);
      write_text(sweep.out, rbss::records_to_csv(records));
      std::cout << records.size() << " records written to " << sweep.out << "\n";
    } else if (*summarize_cmd) {
      const auto records = rbss::records_from_csv(read_text(sum.in));
      write_text(sum.out, rbss::summary_to_csv(rbss::summarize(records)));
      std::cout << "summary written to " << sum.out << "\n";
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalidConfig;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIoError;
  }
  return kExitOk;
}
