// Spectrogram / HRRP image formation and dB normalization.

#include <algorithm>
#include <cmath>
#include <numbers>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {
namespace {

constexpr int kRangeOversample = 4;

Eigen::MatrixXd power_to_db(const Eigen::MatrixXd& power, double db_floor) {
  const double floor_power = std::pow(10.0, db_floor / 10.0);
  return power.unaryExpr([floor_power](double p) { return 10.0 * std::log10(std::max(p, floor_power)); });
}

}  // namespace

double doppler_of_bin(int bin, int bins, double sample_rate) {
  return -sample_rate / 2.0 + bin * sample_rate / bins;
}

std::vector<double> interval_centers(double t_begin, double t_end, int columns, double sample_rate) {
  if (columns < 1 || !(t_end > t_begin)) throw InvalidConfig("interval: empty time interval");
  std::vector<double> centers(static_cast<std::size_t>(columns));
  const double width = (t_end - t_begin) * sample_rate / columns;
  for (int c = 0; c < columns; ++c)
    centers[static_cast<std::size_t>(c)] = t_begin * sample_rate + (c + 0.5) * width;
  return centers;
}

Eigen::MatrixXd stft_power(const Eigen::VectorXcd& signal, double sample_rate,
                           const std::vector<double>& frame_centers, const StftOptions& options) {
  if (!(sample_rate > 0.0)) throw InvalidConfig("stft: sample rate must be > 0");
  if (options.doppler_bins < 1) throw InvalidConfig("stft: doppler_bins must be >= 1");
  const auto window = static_cast<Eigen::Index>(std::llround(options.window_seconds * sample_rate));
  if (window < 1) throw InvalidConfig("stft: window shorter than one sample");
  if (window > signal.size()) throw InvalidConfig("stft: window longer than the signal");

  // Hann window sampled at half-integer offsets so it is symmetric about the frame center.
  Eigen::VectorXd taper(window);
  for (Eigen::Index m = 0; m < window; ++m) {
    const double s = std::sin(std::numbers::pi * (static_cast<double>(m) + 0.5) / static_cast<double>(window));
    taper[m] = s * s;
  }
  const double gain = taper.sum();

  const int bins = options.doppler_bins;
  Eigen::MatrixXcd kernel(bins, window);
  for (int k = 0; k < bins; ++k) {
    const double fd = doppler_of_bin(k, bins, sample_rate);
    for (Eigen::Index m = 0; m < window; ++m)
      kernel(k, m) = std::polar(taper[m] / gain, -2.0 * std::numbers::pi * fd * static_cast<double>(m) / sample_rate);
  }

  Eigen::MatrixXd power(bins, static_cast<Eigen::Index>(frame_centers.size()));
  Eigen::VectorXcd segment(window);
  for (std::size_t c = 0; c < frame_centers.size(); ++c) {
    const auto start = static_cast<Eigen::Index>(std::llround(frame_centers[c] - static_cast<double>(window) / 2.0));
    for (Eigen::Index m = 0; m < window; ++m) {
      const Eigen::Index n = start + m;
      segment[m] = (n >= 0 && n < signal.size()) ? signal[n] : std::complex<double>(0.0);
    }
    power.col(static_cast<Eigen::Index>(c)) = (kernel * segment).cwiseAbs2();
  }
  return power;
}

Eigen::MatrixXd spectrogram(const Eigen::VectorXcd& signal, double sample_rate,
                            const StftOptions& options, double t_begin, double t_end, int columns,
                            double db_floor) {
  return power_to_db(
      stft_power(signal, sample_rate, interval_centers(t_begin, t_end, columns, sample_rate), options),
      db_floor);
}

double range_of_bin(int bin, int bins, double frequency_step) {
  return bin * unambiguous_range(frequency_step) / bins;
}

Eigen::MatrixXd hrrp_power(const Eigen::MatrixXcd& returns, const std::vector<double>& frequencies,
                           double sample_rate, const HrrpOptions& options, double t_begin,
                           double t_end, int columns) {
  const auto nf = static_cast<Eigen::Index>(frequencies.size());
  if (nf < 2) throw InvalidConfig("hrrp: wideband returns (>= 2 frequencies) required");
  if (returns.cols() != nf) throw InvalidConfig("hrrp: returns / frequency grid size mismatch");
  if (options.range_bins < 1) throw InvalidConfig("hrrp: range_bins must be >= 1");
  const double step = frequencies[1] - frequencies[0];
  if (!(step > 0.0)) throw InvalidConfig("hrrp: frequency grid must be increasing");
  for (Eigen::Index k = 1; k < nf; ++k) {
    const double d = frequencies[static_cast<std::size_t>(k)] - frequencies[static_cast<std::size_t>(k - 1)];
    if (std::abs(d - step) > 1e-6 * step) throw InvalidConfig("hrrp: non-uniform frequency grid");
  }
  if (columns < 1 || !(t_end > t_begin)) throw InvalidConfig("hrrp: empty time interval");

  // Each range bin integrates power over kRangeOversample evenly spread
  // sub-ranges so point targets do not flicker between bins.
  const double bin_width = unambiguous_range(step) / options.range_bins;
  const Eigen::Index probes = static_cast<Eigen::Index>(options.range_bins) * kRangeOversample;
  Eigen::MatrixXcd kernel(probes, nf);
  for (Eigen::Index i = 0; i < probes; ++i) {
    const double r = (static_cast<double>(i) + 0.5) / kRangeOversample * bin_width;
    for (Eigen::Index k = 0; k < nf; ++k) {
      const double f = frequencies[static_cast<std::size_t>(k)];
      kernel(i, k) = std::polar(1.0 / static_cast<double>(nf), 4.0 * std::numbers::pi * f * r / kSpeedOfLight);
    }
  }

  Eigen::MatrixXd power = Eigen::MatrixXd::Zero(options.range_bins, columns);
  const double first = t_begin * sample_rate;
  const double width = (t_end - t_begin) * sample_rate / columns;
  for (int c = 0; c < columns; ++c) {
    auto n0 = static_cast<Eigen::Index>(std::llround(first + c * width));
    auto n1 = static_cast<Eigen::Index>(std::llround(first + (c + 1) * width));
    n0 = std::clamp<Eigen::Index>(n0, 0, returns.rows() - 1);
    n1 = std::clamp<Eigen::Index>(std::max(n1, n0 + 1), n0 + 1, returns.rows());
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(probes);
    for (Eigen::Index n = n0; n < n1; ++n) acc += (kernel * returns.row(n).transpose()).cwiseAbs2();
    acc /= static_cast<double>(n1 - n0);
    for (int r = 0; r < options.range_bins; ++r)
      power(r, c) = acc.segment(static_cast<Eigen::Index>(r) * kRangeOversample, kRangeOversample).mean();
  }
  return power;
}

Eigen::MatrixXd hrrp(const Eigen::MatrixXcd& returns, const std::vector<double>& frequencies,
                     double sample_rate, const HrrpOptions& options, double t_begin, double t_end,
                     int columns, double db_floor) {
  return power_to_db(hrrp_power(returns, frequencies, sample_rate, options, t_begin, t_end, columns),
                     db_floor);
}

Eigen::MatrixXd to_db_normalize(const Eigen::MatrixXd& power, const DbRange& range) {
  if (!(range.floor < range.ceil)) throw InvalidConfig("dB range: floor must be below ceil");
  const double span = range.ceil - range.floor;
  return power.unaryExpr([&](double p) {
    if (!(p > 0.0)) return 0.0;
    const double db = std::clamp(10.0 * std::log10(p), range.floor, range.ceil);
    return (db - range.floor) / span;
  });
}

Eigen::MatrixXd to_db_normalize(const Eigen::MatrixXcd& field, const DbRange& range) {
  return to_db_normalize(Eigen::MatrixXd(field.cwiseAbs2()), range);
}

}  // namespace rdae
