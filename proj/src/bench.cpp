// Experiment configuration, sweep execution and CSV / report output.

#include "rdae/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>
#include <tuple>

#include "rdae/errors.hpp"
#include "rdae/metrics.hpp"

namespace rdae {
namespace {

using Clock = std::chrono::steady_clock;

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(value);
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

double parse_double(const std::string& s, const std::string& where) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw InvalidConfig(where + ": expected a number, got '" + s + "'");
  }
  if (used != s.size()) throw InvalidConfig(where + ": expected a number, got '" + s + "'");
  return v;
}

long long parse_int(const std::string& s, const std::string& where) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidConfig(where + ": expected an integer, got '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s, const std::string& where) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size())
    throw InvalidConfig(where + ": expected an unsigned integer, got '" + s + "'");
  return v;
}

int parse_small_int(const std::string& s, const std::string& where) {
  const long long v = parse_int(s, where);
  if (v < -1000000000LL || v > 1000000000LL) throw InvalidConfig(where + ": value out of range");
  return static_cast<int>(v);
}

template <class T, class F>
std::vector<T> parse_list(const std::string& value, const std::string& where, F parse_one) {
  std::vector<T> out;
  for (const auto& item : split_list(value)) out.push_back(parse_one(item, where));
  if (out.empty()) throw InvalidConfig(where + ": empty list");
  return out;
}

// section -> key -> (value, line)
using Sections = std::map<std::string, std::map<std::string, std::pair<std::string, int>>>;

class KeyReader {
 public:
  KeyReader(Sections& sections, std::string section, std::string source)
      : entries_(sections[section]), section_(std::move(section)), source_(std::move(source)) {}

  // Removes and returns the entry, if present.
  std::optional<std::string> take(const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return std::nullopt;
    std::string value = it->second.first;
    where_ = source_ + ":" + std::to_string(it->second.second) + ": [" + section_ + "] " + key;
    entries_.erase(it);
    return value;
  }
  const std::string& where() const { return where_; }

  void set(const std::string& key, double& dst) {
    if (auto v = take(key)) dst = parse_double(*v, where_);
  }
  void set(const std::string& key, int& dst) {
    if (auto v = take(key)) dst = parse_small_int(*v, where_);
  }
  void set(const std::string& key, Eigen::Index& dst) {
    if (auto v = take(key)) dst = parse_int(*v, where_);
  }
  void set(const std::string& key, std::uint64_t& dst) {
    if (auto v = take(key)) dst = parse_u64(*v, where_);
  }

  void finish() const {
    if (!entries_.empty()) {
      const auto& [key, entry] = *entries_.begin();
      throw InvalidConfig(source_ + ":" + std::to_string(entry.second) + ": unknown key '" + key +
                          "' in [" + section_ + "]");
    }
  }

 private:
  std::map<std::string, std::pair<std::string, int>>& entries_;
  std::string section_;
  std::string source_;
  std::string where_;
};

std::string fixed(double v, int digits) {
  if (std::isnan(v)) return "nan";
  std::ostringstream s;
  s.setf(std::ios::fixed);
  s.precision(digits);
  s << v;
  return s.str();
}

constexpr std::string_view kCsvHeader =
    "algorithm,kind,carrier_hz,wall,snr_db,scr_db,mismatch_pct,nodes,seed,ssim_bd,ssim_ad,"
    "nmse_bd,nmse_ad,train_s,test_ms,diverged";

}  // namespace

std::string_view to_string(Algorithm a) {
  switch (a) {
    case Algorithm::Dae: return "DAE";
    case Algorithm::SparseDae: return "SparseDAE";
    case Algorithm::StackedSdae: return "StackedSDAE";
    case Algorithm::Svd: return "SVD";
    case Algorithm::Wavelet: return "Wavelet";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view s) {
  if (s == "DAE") return Algorithm::Dae;
  if (s == "SparseDAE") return Algorithm::SparseDae;
  if (s == "StackedSDAE") return Algorithm::StackedSdae;
  if (s == "SVD") return Algorithm::Svd;
  if (s == "Wavelet") return Algorithm::Wavelet;
  throw InvalidConfig("unknown algorithm '" + std::string(s) + "'");
}

bool is_autoencoder(Algorithm a) {
  return a == Algorithm::Dae || a == Algorithm::SparseDae || a == Algorithm::StackedSdae;
}

std::string_view to_string(SweepAxis a) {
  switch (a) {
    case SweepAxis::Snr: return "snr";
    case SweepAxis::Scr: return "scr";
    case SweepAxis::Mismatch: return "mismatch";
    case SweepAxis::Nodes: return "nodes";
  }
  return "?";
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (!manifest) dataset.validate();
  if (algorithms.empty()) throw InvalidConfig("config: no algorithms selected");
  if (!(split > 0.0 && split < 1.0)) throw InvalidConfig("config: split must lie in (0, 1)");
  if (mismatch_grid.empty() || seeds.empty()) throw InvalidConfig("config: empty sweep grid");
  for (double m : mismatch_grid)
    if (!(m >= 0.0 && m <= 100.0)) throw InvalidConfig("config: mismatch percent must lie in [0, 100]");
  for (double s : snr_grid)
    if (std::isnan(s)) throw InvalidConfig("config: SNR grid contains NaN");
  for (double s : scr_grid)
    if (std::isnan(s)) throw InvalidConfig("config: SCR grid contains NaN");
  if (manifest && (!snr_grid.empty() || !scr_grid.empty()))
    throw InvalidConfig("config: SNR/SCR grids need a generated dataset, not a manifest");
  if (hidden < 1) throw InvalidConfig("config: hidden must be >= 1");
  for (Eigen::Index n : node_grid)
    if (n < 1) throw InvalidConfig("config: node counts must be >= 1");
  if (stacked_sizes.empty()) throw InvalidConfig("config: stacked_sizes is empty");
  if (stacked_sizes.size() != train.coupling.size() || stacked_sizes.size() != train.sparsity.size())
    throw InvalidConfig("config: coupling and sparsity need one entry per stacked layer");
  if (timing_passes < 1) throw InvalidConfig("config: timing_passes must be >= 1");
  if (jobs < 1) throw InvalidConfig("config: jobs must be >= 1");
  train.validate();
  svd.validate();
}

ExperimentConfig parse_config(std::istream& in, const std::string& source) {
  Sections sections;
  std::string line, section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw InvalidConfig(source + ":" + std::to_string(line_no) + ": bad section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section != "dataset" && section != "train" && section != "sweep" && section != "output")
        throw InvalidConfig(source + ":" + std::to_string(line_no) + ": unknown section [" + section + "]");
      sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidConfig(source + ":" + std::to_string(line_no) + ": expected key = value");
    if (section.empty()) throw InvalidConfig(source + ":" + std::to_string(line_no) + ": key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    auto& entries = sections[section];
    if (entries.count(key))
      throw InvalidConfig(source + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
    entries[key] = {trim(line.substr(eq + 1)), line_no};
  }

  ExperimentConfig cfg;
  {
    KeyReader r(sections, "dataset", source);
    SignatureKind kind = SignatureKind::Spectrogram;
    double carrier = 2.4e9;
    if (auto v = r.take("kind")) kind = parse_signature_kind(*v);
    r.set("carrier", carrier);
    DatasetSpec& d = cfg.dataset;
    d = DatasetSpec::defaults(kind, carrier);
    if (auto v = r.take("wall")) {
      const ChannelModel old = d.channel;
      d.channel = ChannelModel::for_wall(parse_wall_class(*v), old.realizations, old.seed);
    }
    if (auto v = r.take("manifest")) cfg.manifest = *v;
    r.set("bandwidth", d.radar.bandwidth);
    r.set("frequency_samples", d.radar.frequency_samples);
    r.set("sample_rate", d.radar.sample_rate);
    r.set("duration", d.radar.duration);
    r.set("amplitude", d.radar.amplitude);
    r.set("window", d.radar.window_seconds);
    r.set("antenna_gain_db", d.radar.antenna_gain_db);
    r.set("realizations", d.channel.realizations);
    r.set("channel_seed", d.channel.seed);
    r.set("permittivity", d.channel.permittivity);
    r.set("conductivity", d.channel.conductivity);
    r.set("relative_spread", d.channel.relative_spread);
    r.set("wall_thickness", d.channel.wall_thickness);
    r.set("ringing_taps", d.channel.ringing_taps);
    r.set("image_reflections", d.channel.image_reflections);
    r.set("intervals", d.intervals);
    r.set("noise_draws", d.noise_draws);
    r.set("snr_db", d.snr_db);
    r.set("scr_db", d.scr_db);
    r.set("pfa", d.pfa);
    r.set("image_rows", d.image_rows);
    r.set("image_cols", d.image_cols);
    r.set("db_floor", d.db_range.floor);
    r.set("db_ceil", d.db_range.ceil);
    r.set("subjects", d.subjects);
    r.set("orientations", d.orientations);
    r.set("seed", d.seed);
    r.finish();
  }
  {
    KeyReader r(sections, "train", source);
    TrainOptions& t = cfg.train;
    if (auto v = r.take("activation")) t.activation.kind = parse_activation(*v);
    r.set("lambda", t.lambda);
    r.set("mu", t.mu);
    if (auto v = r.take("coupling")) t.coupling = parse_list<double>(*v, r.where(), parse_double);
    if (auto v = r.take("sparsity")) t.sparsity = parse_list<double>(*v, r.where(), parse_double);
    r.set("outer_iterations", t.outer_iterations);
    r.set("outer_tolerance", t.outer_tolerance);
    r.set("ista_iterations", t.ista.max_iterations);
    r.set("ista_tolerance", t.ista.relative_tolerance);
    if (auto v = r.take("ridge")) {
      if (*v != "auto") t.ridge = parse_double(*v, r.where());
    }
    r.set("hidden", cfg.hidden);
    if (auto v = r.take("stacked_sizes")) {
      cfg.stacked_sizes.clear();
      for (long long s : parse_list<long long>(*v, r.where(), parse_int)) cfg.stacked_sizes.push_back(s);
    }
    if (auto v = r.take("svd_rank")) {
      cfg.svd.rank = parse_int(*v, r.where());
      cfg.svd.energy_fraction.reset();
    }
    if (auto v = r.take("svd_energy")) {
      cfg.svd.energy_fraction = parse_double(*v, r.where());
      if (cfg.svd.rank) throw InvalidConfig(r.where() + ": set only one of svd_rank / svd_energy");
    }
    r.set("wavelet_levels", cfg.wavelet.levels);
    r.set("wavelet_keep", cfg.wavelet.keep_fraction);
    r.finish();
  }
  {
    KeyReader r(sections, "sweep", source);
    if (auto v = r.take("algorithms")) {
      cfg.algorithms.clear();
      for (const auto& a : split_list(*v)) cfg.algorithms.push_back(parse_algorithm(a));
    }
    r.set("split", cfg.split);
    if (auto v = r.take("snr_db")) cfg.snr_grid = parse_list<double>(*v, r.where(), parse_double);
    if (auto v = r.take("scr_db")) cfg.scr_grid = parse_list<double>(*v, r.where(), parse_double);
    if (auto v = r.take("mismatch_pct")) cfg.mismatch_grid = parse_list<double>(*v, r.where(), parse_double);
    if (auto v = r.take("nodes")) {
      for (long long n : parse_list<long long>(*v, r.where(), parse_int)) cfg.node_grid.push_back(n);
    }
    if (auto v = r.take("seeds")) cfg.seeds = parse_list<std::uint64_t>(*v, r.where(), parse_u64);
    if (auto v = r.take("mismatch_mode")) {
      if (*v == "columns") cfg.mismatch_mode = MismatchMode::Columns;
      else if (*v == "pixels") cfg.mismatch_mode = MismatchMode::Pixels;
      else throw InvalidConfig(r.where() + ": expected columns or pixels");
    }
    r.set("timing_passes", cfg.timing_passes);
    r.set("jobs", cfg.jobs);
    r.finish();
  }
  {
    KeyReader r(sections, "output", source);
    if (auto v = r.take("dir")) cfg.output_dir = *v;
    r.finish();
  }
  if (cfg.manifest && cfg.manifest->is_relative()) {
    const std::filesystem::path base = std::filesystem::path(source).parent_path();
    if (!base.empty()) cfg.manifest = base / *cfg.manifest;
  }
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(path.string() + ": cannot open config");
  return parse_config(in, path.string());
}

// ---------------------------------------------------------------------------
// Sweep

std::vector<GridPoint> expand_grid(const ExperimentConfig& config) {
  const std::vector<double> snr = config.snr_grid.empty() ? std::vector<double>{config.dataset.snr_db} : config.snr_grid;
  const std::vector<double> scr = config.scr_grid.empty() ? std::vector<double>{config.dataset.scr_db} : config.scr_grid;
  const std::vector<Eigen::Index> nodes = config.node_grid.empty() ? std::vector<Eigen::Index>{config.hidden} : config.node_grid;
  std::vector<GridPoint> grid;
  for (double s : snr)
    for (double c : scr)
      for (double m : config.mismatch_grid)
        for (Eigen::Index n : nodes)
          for (std::uint64_t seed : config.seeds) grid.push_back({s, c, m, n, seed});
  return grid;
}

Split split_columns(Eigen::Index count, double train_fraction, std::uint64_t seed) {
  if (!(train_fraction > 0.0 && train_fraction < 1.0)) throw InvalidConfig("split: fraction must lie in (0, 1)");
  const auto n_train = static_cast<Eigen::Index>(std::llround(train_fraction * static_cast<double>(count)));
  if (n_train < 1 || n_train >= count) throw InvalidConfig("split: both parts must be non-empty");
  std::vector<Eigen::Index> order(static_cast<std::size_t>(count));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  Rng rng(seed);
  for (Eigen::Index i = count - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.below(static_cast<std::uint64_t>(i + 1)))]);
  Split s;
  s.train.assign(order.begin(), order.begin() + n_train);
  s.test.assign(order.begin() + n_train, order.end());
  std::sort(s.train.begin(), s.train.end());
  std::sort(s.test.begin(), s.test.end());
  return s;
}

DatasetPair dataset_for(const ExperimentConfig& config, const GridPoint& point) {
  if (config.manifest) return load_dataset(*config.manifest);
  DatasetSpec spec = config.dataset;
  spec.snr_db = point.snr_db;
  spec.scr_db = point.scr_db;
  spec.seed = point.seed;
  return generate_dataset(spec);
}

std::vector<ResultRow> run_point(const ExperimentConfig& config, const DatasetPair& data,
                                 const GridPoint& point) {
  const Split split = split_columns(data.clean.count(), config.split, substream(point.seed, 0x5b117));
  const ImageStack train_clean = shuffle_labels(data.clean.select(split.train), point.mismatch_pct / 100.0,
                                                substream(point.seed, 0x3a7c4), config.mismatch_mode);
  const Eigen::MatrixXd train_corrupt = data.corrupt.select(split.train).data;
  const Eigen::MatrixXd test_clean = data.clean.select(split.test).data;
  const Eigen::MatrixXd test_corrupt = data.corrupt.select(split.test).data;
  const Eigen::Index rows = data.clean.image_rows;

  ResultRow base;
  base.kind = data.clean.kind;
  base.carrier = config.dataset.radar.carrier;
  base.wall = data.clean.meta.empty() ? WallClass::FreeSpace : data.clean.meta.front().wall;
  base.point = point;
  base.ssim_bd = mean_ssim(test_corrupt, test_clean, rows);
  base.nmse_bd = mean_nmse(test_corrupt, test_clean);

  std::vector<ResultRow> out;
  for (Algorithm alg : config.algorithms) {
    ResultRow row = base;
    row.algorithm = alg;
    Eigen::MatrixXd restored;
    auto time_passes = [&](auto&& run) {
      const auto t0 = Clock::now();
      for (int i = 0; i < config.timing_passes; ++i) restored = run();
      return std::chrono::duration<double, std::milli>(Clock::now() - t0).count() / config.timing_passes;
    };
    if (is_autoencoder(alg)) {
      TrainOptions opts = config.train;
      opts.seed = substream(point.seed, 0x7a1, static_cast<std::uint64_t>(alg));
      const auto t0 = Clock::now();
      TrainResult trained;
      try {
        if (alg == Algorithm::Dae)
          trained = train_dae(train_clean.data, train_corrupt, point.nodes, opts);
        else if (alg == Algorithm::SparseDae)
          trained = train_sparse_dae(train_clean.data, train_corrupt, point.nodes, opts);
        else
          trained = train_stacked_sdae(train_clean.data, train_corrupt, config.stacked_sizes, opts);
      } catch (const DomainError&) {
        trained.trace.diverged = true;
      }
      row.train_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
      const bool finite = !trained.trace.diverged && trained.weights.decoder.size() > 0 &&
                          trained.weights.decoder.allFinite() &&
                          std::all_of(trained.weights.encoders.begin(), trained.weights.encoders.end(),
                                      [](const Eigen::MatrixXd& e) { return e.allFinite(); });
      if (finite) row.test_ms = time_passes([&] { return infer(trained.weights, test_corrupt); });
      row.diverged = !finite || !restored.allFinite();
    } else if (alg == Algorithm::Svd) {
      row.test_ms = time_passes([&] { return svd_denoise_stack(test_corrupt, rows, config.svd); });
    } else {
      row.test_ms = time_passes([&] { return wavelet_denoise_stack(test_corrupt, rows, config.wavelet); });
    }
    if (row.diverged) {
      row.ssim_ad = row.nmse_ad = std::numeric_limits<double>::quiet_NaN();
    } else {
      row.ssim_ad = mean_ssim(restored, test_clean, rows);
      row.nmse_ad = mean_nmse(restored, test_clean);
    }
    out.push_back(row);
  }
  return out;
}

void sort_rows(std::vector<ResultRow>& rows) {
  auto key = [](const ResultRow& r) {
    return std::make_tuple(r.kind, r.algorithm, r.point.snr_db, r.point.scr_db, r.point.mismatch_pct,
                           r.point.nodes, r.point.seed);
  };
  std::stable_sort(rows.begin(), rows.end(),
                   [&](const ResultRow& a, const ResultRow& b) { return key(a) < key(b); });
}

std::vector<ResultRow> run_sweep(const ExperimentConfig& config) {
  config.validate();
  const std::vector<GridPoint> grid = expand_grid(config);

  // Grid points that differ only in mismatch / node count share a dataset.
  std::mutex cache_mutex;
  std::map<std::tuple<double, double, std::uint64_t>, std::shared_ptr<const DatasetPair>> cache;
  auto dataset = [&](const GridPoint& p) {
    const auto key = std::make_tuple(p.snr_db, p.scr_db, config.manifest ? 0 : p.seed);
    {
      std::lock_guard lock(cache_mutex);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto made = std::make_shared<const DatasetPair>(dataset_for(config, p));
    std::lock_guard lock(cache_mutex);
    return cache.emplace(key, std::move(made)).first->second;
  };

  std::vector<std::vector<ResultRow>> per_point(grid.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < grid.size(); i = next++) {
      try {
        per_point[i] = run_point(config, *dataset(grid[i]), grid[i]);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = grid.size();
      }
    }
  };
  const int workers = std::max(1, std::min<int>(config.jobs, static_cast<int>(grid.size())));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::vector<ResultRow> rows;
  for (auto& p : per_point) rows.insert(rows.end(), p.begin(), p.end());
  sort_rows(rows);
  return rows;
}

// ---------------------------------------------------------------------------
// CSV

void write_csv(const std::vector<ResultRow>& rows, std::ostream& out) {
  out << kCsvHeader << '\n';
  for (const ResultRow& r : rows) {
    out << to_string(r.algorithm) << ',' << to_string(r.kind) << ',' << format_number(r.carrier) << ','
        << to_string(r.wall) << ',' << format_number(r.point.snr_db) << ','
        << format_number(r.point.scr_db) << ',' << format_number(r.point.mismatch_pct) << ','
        << r.point.nodes << ',' << r.point.seed << ',' << format_number(r.ssim_bd) << ','
        << format_number(r.ssim_ad) << ',' << format_number(r.nmse_bd) << ','
        << format_number(r.nmse_ad) << ',' << format_number(r.train_seconds) << ','
        << format_number(r.test_ms) << ',' << (r.diverged ? 1 : 0) << '\n';
  }
}

void write_csv(const std::vector<ResultRow>& rows, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw IoError(path.string() + ": cannot write CSV");
  write_csv(rows, out);
  if (!out) throw IoError(path.string() + ": write failed");
}

std::vector<ResultRow> read_csv(const std::filesystem::path& path) {
  const std::string name = path.string();
  std::ifstream in(path);
  if (!in) throw IoError(name + ": cannot open CSV");
  std::string line;
  if (!std::getline(in, line) || trim(line) != kCsvHeader) throw IoError(name + ": missing or unexpected CSV header");
  std::vector<ResultRow> rows;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    line = trim(line);
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream s(line);
    while (std::getline(s, cell, ',')) f.push_back(cell);
    if (f.size() != 16) throw IoError(name + ":" + std::to_string(line_no) + ": expected 16 fields");
    try {
      const std::string where = name + ":" + std::to_string(line_no);
      ResultRow r;
      r.algorithm = parse_algorithm(f[0]);
      r.kind = parse_signature_kind(f[1]);
      r.carrier = parse_double(f[2], where);
      r.wall = parse_wall_class(f[3]);
      r.point.snr_db = parse_double(f[4], where);
      r.point.scr_db = parse_double(f[5], where);
      r.point.mismatch_pct = parse_double(f[6], where);
      r.point.nodes = parse_int(f[7], where);
      r.point.seed = parse_u64(f[8], where);
      r.ssim_bd = parse_double(f[9], where);
      r.ssim_ad = parse_double(f[10], where);
      r.nmse_bd = parse_double(f[11], where);
      r.nmse_ad = parse_double(f[12], where);
      r.train_seconds = parse_double(f[13], where);
      r.test_ms = parse_double(f[14], where);
      r.diverged = parse_int(f[15], where) != 0;
      rows.push_back(r);
    } catch (const InvalidConfig& e) {
      throw IoError(name + ":" + std::to_string(line_no) + ": invalid row (" + e.what() + ")");
    }
  }
  return rows;
}

std::uint64_t results_hash(const std::vector<ResultRow>& rows) {
  std::vector<ResultRow> stripped = rows;
  for (ResultRow& r : stripped) r.train_seconds = r.test_ms = 0.0;
  std::ostringstream s;
  write_csv(stripped, s);
  const std::string text = s.str();
  return fnv1a64(text.data(), text.size());
}

// ---------------------------------------------------------------------------
// Report

namespace {

double axis_value(const ResultRow& r, SweepAxis axis) {
  switch (axis) {
    case SweepAxis::Snr: return r.point.snr_db;
    case SweepAxis::Scr: return r.point.scr_db;
    case SweepAxis::Mismatch: return r.point.mismatch_pct;
    case SweepAxis::Nodes: return static_cast<double>(r.point.nodes);
  }
  return 0.0;
}

SummaryRow aggregate(const std::vector<const ResultRow*>& group) {
  SummaryRow s;
  s.kind = group.front()->kind;
  s.algorithm = group.front()->algorithm;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  double nlo = lo, nhi = -lo;
  for (const ResultRow* r : group) {
    if (r->diverged || std::isnan(r->ssim_ad) || std::isnan(r->nmse_ad)) {
      ++s.excluded;
      continue;
    }
    ++s.count;
    s.ssim_bd += r->ssim_bd;
    s.ssim_ad += r->ssim_ad;
    s.nmse_bd += r->nmse_bd;
    s.nmse_ad += r->nmse_ad;
    s.train_seconds += r->train_seconds;
    s.test_ms += r->test_ms;
    lo = std::min(lo, r->ssim_ad);
    hi = std::max(hi, r->ssim_ad);
    nlo = std::min(nlo, r->nmse_ad);
    nhi = std::max(nhi, r->nmse_ad);
  }
  if (s.count == 0) {
    const double nan = std::numeric_limits<double>::quiet_NaN();
    s.ssim_bd = s.ssim_ad = s.nmse_bd = s.nmse_ad = s.train_seconds = s.test_ms = nan;
    s.ssim_ad_spread = s.nmse_ad_spread = nan;
    return s;
  }
  if (s.count > 1) {
    const auto n = static_cast<double>(s.count);
    s.ssim_bd /= n;
    s.ssim_ad /= n;
    s.nmse_bd /= n;
    s.nmse_ad /= n;
    s.train_seconds /= n;
    s.test_ms /= n;
  }
  s.ssim_ad_spread = hi - lo;
  s.nmse_ad_spread = nhi - nlo;
  return s;
}

}  // namespace

std::vector<SummaryRow> summarize(const std::vector<ResultRow>& rows) {
  std::map<std::pair<SignatureKind, Algorithm>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) groups[{r.kind, r.algorithm}].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) out.push_back(aggregate(group));
  return out;
}

std::vector<SummaryRow> summarize_axis(const std::vector<ResultRow>& rows, SweepAxis axis) {
  std::map<std::tuple<SignatureKind, Algorithm, double>, std::vector<const ResultRow*>> groups;
  for (const ResultRow& r : rows) groups[{r.kind, r.algorithm, axis_value(r, axis)}].push_back(&r);
  std::vector<SummaryRow> out;
  for (const auto& [key, group] : groups) {
    SummaryRow s = aggregate(group);
    s.axis_value = std::get<2>(key);
    out.push_back(s);
  }
  return out;
}

void write_summary_table(const std::vector<SummaryRow>& summary, std::ostream& out) {
  const std::vector<std::string> header{"kind", "algorithm", "n", "excluded", "SSIM_BD", "SSIM_AD",
                                        "SSIM_AD_spread", "NMSE_BD", "NMSE_AD", "train_s", "test_ms"};
  std::vector<std::vector<std::string>> cells{header};
  for (const SummaryRow& s : summary) {
    cells.push_back({std::string(to_string(s.kind)), std::string(to_string(s.algorithm)),
                     std::to_string(s.count), std::to_string(s.excluded), format_number(s.ssim_bd),
                     format_number(s.ssim_ad), format_number(s.ssim_ad_spread),
                     format_number(s.nmse_bd), format_number(s.nmse_ad),
                     format_number(s.train_seconds), format_number(s.test_ms)});
  }
  std::vector<std::size_t> width(header.size(), 0);
  for (const auto& row : cells)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
  for (const auto& row : cells) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << row[c];
      if (c + 1 < row.size()) out << std::string(width[c] - row[c].size() + 2, ' ');
    }
    out << '\n';
  }
}

std::vector<std::filesystem::path> write_report(const std::vector<ResultRow>& rows,
                                                const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> written;
  {
    const auto path = out_dir / "summary.txt";
    std::ofstream out(path);
    if (!out) throw IoError(path.string() + ": cannot write");
    write_summary_table(summarize(rows), out);
    written.push_back(path);
  }
  std::set<SignatureKind> kinds;
  for (const ResultRow& r : rows) kinds.insert(r.kind);
  for (SweepAxis axis : {SweepAxis::Snr, SweepAxis::Scr, SweepAxis::Mismatch, SweepAxis::Nodes}) {
    for (SignatureKind kind : kinds) {
      std::vector<ResultRow> subset;
      std::set<double> values;
      std::set<Algorithm> algs;
      for (const ResultRow& r : rows) {
        if (r.kind != kind) continue;
        subset.push_back(r);
        values.insert(axis_value(r, axis));
        algs.insert(r.algorithm);
      }
      if (values.size() < 2) continue;
      std::map<std::pair<double, Algorithm>, SummaryRow> table;
      for (const SummaryRow& s : summarize_axis(subset, axis)) table[{s.axis_value, s.algorithm}] = s;

      const auto path = out_dir / (std::string(to_string(kind)) + "_" + std::string(to_string(axis)) + ".dat");
      std::ofstream out(path);
      if (!out) throw IoError(path.string() + ": cannot write");
      out << "# " << to_string(axis);
      for (Algorithm a : algs)
        out << ' ' << to_string(a) << "_ssim_ad " << to_string(a) << "_spread " << to_string(a) << "_nmse_ad";
      out << " ssim_bd\n";
      for (double v : values) {
        out << format_number(v);
        double bd = std::numeric_limits<double>::quiet_NaN();
        for (Algorithm a : algs) {
          auto it = table.find({v, a});
          if (it == table.end()) {
            out << " nan nan nan";
            continue;
          }
          out << ' ' << fixed(it->second.ssim_ad, 6) << ' ' << fixed(it->second.ssim_ad_spread, 6) << ' '
              << fixed(it->second.nmse_ad, 6);
          if (std::isnan(bd)) bd = it->second.ssim_bd;
        }
        out << ' ' << fixed(bd, 6) << '\n';
      }
      written.push_back(path);
    }
  }
  return written;
}

}  // namespace rdae
