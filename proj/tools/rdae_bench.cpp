// rdae_bench: dataset generation, training, sweeps, reports and acceptance.

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rdae/acceptance.hpp"
#include "rdae/bench.hpp"
#include "rdae/errors.hpp"
#include "rdae/metrics.hpp"

namespace fs = std::filesystem;
using namespace rdae;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitAcceptance = 3;

struct CommonFlags {
  std::string config;
  std::string out;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int jobs = 0;
};

ExperimentConfig resolve(const CommonFlags& f) {
  ExperimentConfig cfg;
  if (!f.config.empty()) cfg = load_config(f.config);
  if (!f.out.empty()) cfg.output_dir = f.out;
  if (f.seed_set) {
    cfg.seeds = {f.seed};
    cfg.dataset.seed = f.seed;
  }
  if (f.jobs > 0) cfg.jobs = f.jobs;
  cfg.validate();
  return cfg;
}

std::string stem_for(const ExperimentConfig& cfg) {
  return std::string(to_string(cfg.dataset.kind)) + "_" + std::string(to_string(cfg.dataset.channel.wall_class));
}

int cmd_generate(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  if (cfg.manifest) throw InvalidConfig("generate: config names an existing manifest");
  const DatasetPair pair = generate_dataset(cfg.dataset);
  fs::create_directories(cfg.output_dir);
  const fs::path manifest = save_dataset(pair, cfg.output_dir / stem_for(cfg), cfg.dataset.hash());
  std::printf("wrote %s (P=%ld, Q=%ld, config hash %016llx)\n", manifest.string().c_str(),
              static_cast<long>(pair.clean.pixels()), static_cast<long>(pair.clean.count()),
              static_cast<unsigned long long>(cfg.dataset.hash()));
  return 0;
}

int cmd_train(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  const GridPoint point = expand_grid(cfg).front();
  const DatasetPair data = dataset_for(cfg, point);
  const Split split = split_columns(data.clean.count(), cfg.split, substream(point.seed, 0x5b117));
  const ImageStack train_clean = shuffle_labels(data.clean.select(split.train), point.mismatch_pct / 100.0,
                                                substream(point.seed, 0x3a7c4), cfg.mismatch_mode);
  const Eigen::MatrixXd train_corrupt = data.corrupt.select(split.train).data;
  const Eigen::MatrixXd test_clean = data.clean.select(split.test).data;
  const Eigen::MatrixXd test_corrupt = data.corrupt.select(split.test).data;
  fs::create_directories(cfg.output_dir);

  const Eigen::Index rows = data.clean.image_rows;
  std::printf("%-12s %8s %8s %10s %9s\n", "algorithm", "SSIM_BD", "SSIM_AD", "iterations", "train_s");
  for (Algorithm alg : cfg.algorithms) {
    if (!is_autoencoder(alg)) continue;
    TrainOptions opts = cfg.train;
    opts.seed = substream(point.seed, 0x7a1, static_cast<std::uint64_t>(alg));
    TrainResult r = alg == Algorithm::Dae ? train_dae(train_clean.data, train_corrupt, point.nodes, opts)
                    : alg == Algorithm::SparseDae
                        ? train_sparse_dae(train_clean.data, train_corrupt, point.nodes, opts)
                        : train_stacked_sdae(train_clean.data, train_corrupt, cfg.stacked_sizes, opts);
    const fs::path path = cfg.output_dir / (stem_for(cfg) + "_" + std::string(to_string(alg)) + ".rdaew");
    if (r.trace.diverged) {
      std::printf("%-12s diverged after %zu iterations\n", std::string(to_string(alg)).c_str(),
                  r.trace.objective.size());
      continue;
    }
    save_weights(r.weights, path);
    const Eigen::MatrixXd restored = infer(r.weights, test_corrupt);
    std::printf("%-12s %8.4f %8.4f %10zu %9.2f  -> %s\n", std::string(to_string(alg)).c_str(),
                mean_ssim(test_corrupt, test_clean, rows), mean_ssim(restored, test_clean, rows),
                r.trace.objective.size(), r.trace.seconds.back(), path.string().c_str());
  }
  return 0;
}

int cmd_sweep(const CommonFlags& f) {
  const ExperimentConfig cfg = resolve(f);
  const std::vector<ResultRow> rows = run_sweep(cfg);
  const fs::path csv = cfg.output_dir / "results.csv";
  write_csv(rows, csv);
  std::size_t diverged = 0;
  for (const ResultRow& r : rows) diverged += r.diverged ? 1 : 0;
  std::printf("wrote %s: %zu rows (%zu diverged), results hash %016llx\n", csv.string().c_str(), rows.size(),
              diverged, static_cast<unsigned long long>(results_hash(rows)));
  return 0;
}

int cmd_report(const std::vector<std::string>& csvs, const std::string& out) {
  if (csvs.empty()) throw InvalidConfig("report: no CSV files given");
  std::vector<ResultRow> rows;
  for (const auto& path : csvs) {
    const auto part = read_csv(path);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  sort_rows(rows);
  write_summary_table(summarize(rows), std::cout);
  const fs::path dir = out.empty() ? fs::path("report") : fs::path(out);
  for (const fs::path& p : write_report(rows, dir)) std::printf("wrote %s\n", p.string().c_str());
  return 0;
}

int cmd_accept(const CommonFlags& f, const std::vector<int>& only) {
  AcceptanceOptions opt;
  if (f.seed_set) opt.seed = f.seed;
  opt.only = only;
  bool ok = true;
  run_acceptance(opt, [&](const CriterionResult& r) {
    std::printf("%s\n", format_result(r).c_str());
    std::fflush(stdout);
    ok = ok && r.passed;
  });
  return ok ? 0 : kExitAcceptance;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radar signature denoising autoencoders: datasets, training and benchmarks"};
  app.require_subcommand(1);
  CommonFlags flags;
  auto add_common = [&](CLI::App* sub, bool config) {
    if (config) sub->add_option("--config", flags.config, "Experiment config file")->check(CLI::ExistingFile);
    sub->add_option("--out", flags.out, "Output directory");
    sub->add_option("--seed", flags.seed, "Master seed (overrides the config)")
        ->each([&](const std::string&) { flags.seed_set = true; });
    sub->add_option("--jobs", flags.jobs, "Worker threads")->check(CLI::PositiveNumber);
  };
  auto* generate = app.add_subcommand("generate", "Generate a paired clean/corrupt dataset");
  add_common(generate, true);
  auto* train = app.add_subcommand("train", "Train the autoencoders at the first grid point and save weights");
  add_common(train, true);
  auto* sweep = app.add_subcommand("sweep", "Run the configured sweep and write results.csv");
  add_common(sweep, true);
  auto* report = app.add_subcommand("report", "Summarize result CSVs into tables and plot data");
  std::vector<std::string> csvs;
  report->add_option("csv", csvs, "Result CSV files")->required();
  report->add_option("--out", flags.out, "Output directory for report files");
  auto* accept = app.add_subcommand("accept", "Run the acceptance suite");
  add_common(accept, false);
  std::vector<int> only;
  accept->add_option("--only", only, "Criteria to run (default: all)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*generate) return cmd_generate(flags);
    if (*train) return cmd_train(flags);
    if (*sweep) return cmd_sweep(flags);
    if (*report) return cmd_report(csvs, flags.out);
    if (*accept) return cmd_accept(flags, only);
  } catch (const InvalidConfig& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const IoError& e) {
    std::fprintf(stderr, "I/O error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
