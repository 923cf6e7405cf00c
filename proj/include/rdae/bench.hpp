#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "rdae/autoencoders.hpp"
#include "rdae/baselines.hpp"
#include "rdae/dataset_synth.hpp"

namespace rdae {

enum class Algorithm : std::uint8_t { Dae, SparseDae, StackedSdae, Svd, Wavelet };

std::string_view to_string(Algorithm a);
Algorithm parse_algorithm(std::string_view s);
bool is_autoencoder(Algorithm a);

// Everything a sweep needs. The dataset spec provides defaults that the
// sweep grids override per grid point.
struct ExperimentConfig {
  DatasetSpec dataset = DatasetSpec::defaults(SignatureKind::Spectrogram);
  std::optional<std::filesystem::path> manifest;  // use a saved dataset instead of generating

  std::vector<Algorithm> algorithms{Algorithm::Dae, Algorithm::SparseDae, Algorithm::StackedSdae};
  TrainOptions train;
  Eigen::Index hidden = 100;  // shallow code size when no node grid is given
  std::vector<Eigen::Index> stacked_sizes{256, 128, 64};
  SvdFilterConfig svd;
  WaveletFilterConfig wavelet;

  double split = 0.7;                  // training fraction
  std::vector<double> snr_grid;        // dB; empty = dataset.snr_db
  std::vector<double> scr_grid;        // dB; empty = dataset.scr_db
  std::vector<double> mismatch_grid{0.0};  // percent of training labels shuffled
  std::vector<Eigen::Index> node_grid;     // shallow hidden sizes; empty = hidden
  std::vector<std::uint64_t> seeds{1};
  MismatchMode mismatch_mode = MismatchMode::Columns;
  int timing_passes = 100;

  std::filesystem::path output_dir = "results";
  int jobs = 1;

  void validate() const;
};

// Parses the INI-style config text. Sections: [dataset], [train], [sweep],
// [output]. Unknown sections or keys are InvalidConfig errors.
ExperimentConfig parse_config(std::istream& in, const std::string& source = "<config>");
ExperimentConfig load_config(const std::filesystem::path& path);

struct GridPoint {
  double snr_db = kNoNoise;
  double scr_db = kNoNoise;
  double mismatch_pct = 0.0;
  Eigen::Index nodes = 0;
  std::uint64_t seed = 1;
};

struct ResultRow {
  Algorithm algorithm = Algorithm::Dae;
  SignatureKind kind = SignatureKind::Spectrogram;
  double carrier = 0.0;
  WallClass wall = WallClass::FreeSpace;
  GridPoint point;
  double ssim_bd = 0.0, ssim_ad = 0.0;
  double nmse_bd = 0.0, nmse_ad = 0.0;
  double train_seconds = 0.0;
  double test_ms = 0.0;
  bool diverged = false;
};

// Expanded grid in canonical order (snr, scr, mismatch, nodes, seed).
std::vector<GridPoint> expand_grid(const ExperimentConfig& config);

// Deterministic training / test column split of Q images.
struct Split {
  std::vector<Eigen::Index> train, test;
};
Split split_columns(Eigen::Index count, double train_fraction, std::uint64_t seed);

// Trains and evaluates every configured algorithm at one grid point.
std::vector<ResultRow> run_point(const ExperimentConfig& config, const DatasetPair& data,
                                 const GridPoint& point);

// The dataset for one grid point (generated, or loaded from the manifest).
DatasetPair dataset_for(const ExperimentConfig& config, const GridPoint& point);

// Runs the whole grid on `jobs` worker threads; rows come back sorted.
std::vector<ResultRow> run_sweep(const ExperimentConfig& config);

void sort_rows(std::vector<ResultRow>& rows);

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out);
void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path);
std::vector<ResultRow> read_csv(const std::filesystem::path& path);

// FNV hash of the CSV with the timing columns blanked.
std::uint64_t results_hash(const std::vector<ResultRow>& rows);

// Aggregate over seeds (and any other axis not kept).
struct SummaryRow {
  SignatureKind kind = SignatureKind::Spectrogram;
  Algorithm algorithm = Algorithm::Dae;
  double axis_value = 0.0;  // unused for the Table-style summary
  std::size_t count = 0;     // rows included in the means
  std::size_t excluded = 0;  // diverged rows left out
  double ssim_bd = 0.0, ssim_ad = 0.0, ssim_ad_spread = 0.0;
  double nmse_bd = 0.0, nmse_ad = 0.0, nmse_ad_spread = 0.0;
  double train_seconds = 0.0, test_ms = 0.0;
};

enum class SweepAxis { Snr, Scr, Mismatch, Nodes };
std::string_view to_string(SweepAxis a);

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows);
std::vector<SummaryRow> summarize_axis(const std::vector<ResultRow>& rows, SweepAxis axis);

void write_summary_table(const std::vector<SummaryRow>& summary, std::ostream& out);

// Writes summary.txt plus one <kind>_<axis>.dat file per axis that takes more
// than one value. Returns the files written.
std::vector<std::filesystem::path> write_report(const std::vector<ResultRow>& rows,
                                                const std::filesystem::path& out_dir);

// Formats a double the way the CSV does (shortest round-trip, "nan", "inf").
std::string format_number(double v);

}  // namespace rdae
