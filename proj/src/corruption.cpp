// Noise, point clutter and label-mismatch corruption of image stacks.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {

double signal_reference(const Eigen::MatrixXd& stack) {
  double sum = 0.0;
  std::size_t count = 0;
  for (Eigen::Index i = 0; i < stack.size(); ++i) {
    const double v = stack.data()[i];
    if (v > 0.0) {
      sum += v * v;
      ++count;
    }
  }
  return count == 0 ? 0.0 : sum / static_cast<double>(count);
}

ImageStack add_noise(const ImageStack& stack, double snr_db, std::uint64_t seed,
                     const NoiseOptions& options) {
  stack.validate();
  if (std::isinf(snr_db) && snr_db > 0.0) return stack;
  if (std::isnan(snr_db)) throw InvalidConfig("add_noise: SNR is NaN");
  const double reference = options.signal_ref.value_or(signal_reference(stack.data));
  const double sigma = std::sqrt(reference / std::pow(10.0, snr_db / 10.0));

  ImageStack out = stack;
  for (Eigen::Index q = 0; q < out.count(); ++q) {
    Rng rng(substream(seed, static_cast<std::uint64_t>(q), 0x401535));
    for (Eigen::Index p = 0; p < out.pixels(); ++p) {
      double v = out.data(p, q) + sigma * rng.normal();
      if (options.clamp) v = std::clamp(v, 0.0, 1.0);
      out.data(p, q) = v;
    }
  }
  return out;
}

std::vector<ClutterSite> draw_clutter_sites(Eigen::Index image_rows, Eigen::Index image_cols,
                                            double pfa, double amplitude, Rng& rng,
                                            const ClutterOptions& options) {
  if (!(pfa >= 0.0 && pfa <= 1.0)) throw InvalidConfig("clutter: pfa must lie in [0, 1]");
  if (options.cell_rows < 1 || options.cell_cols < 1 || options.cell_rows > image_rows ||
      options.cell_cols > image_cols)
    throw InvalidConfig("clutter: cell grid must fit inside the image");
  std::vector<ClutterSite> sites;
  for (int cc = 0; cc < options.cell_cols; ++cc) {
    const Eigen::Index c0 = image_cols * cc / options.cell_cols;
    const Eigen::Index c1 = image_cols * (cc + 1) / options.cell_cols;
    for (int cr = 0; cr < options.cell_rows; ++cr) {
      const Eigen::Index r0 = image_rows * cr / options.cell_rows;
      const Eigen::Index r1 = image_rows * (cr + 1) / options.cell_rows;
      if (!rng.bernoulli(pfa)) continue;
      ClutterSite site;
      site.row = r0 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(r1 - r0)));
      site.col = c0 + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(c1 - c0)));
      site.value = std::polar(amplitude, 2.0 * std::numbers::pi * rng.uniform());
      sites.push_back(site);
    }
  }
  return sites;
}

ImageStack add_point_clutter(const ImageStack& stack, double scr_db, double pfa,
                             std::uint64_t seed, const ClutterOptions& options) {
  stack.validate();
  if (!(pfa >= 0.0 && pfa <= 1.0)) throw InvalidConfig("clutter: pfa must lie in [0, 1]");
  if (pfa == 0.0 || (std::isinf(scr_db) && scr_db > 0.0)) return stack;
  const double reference = options.signal_ref.value_or(signal_reference(stack.data));
  const double amplitude = std::sqrt(reference / std::pow(10.0, scr_db / 10.0));

  ImageStack out = stack;
  const Eigen::Index rows = stack.image_rows, cols = stack.image_cols();
  for (Eigen::Index q = 0; q < out.count(); ++q) {
    Rng rng(substream(seed, static_cast<std::uint64_t>(q), 0xc1077e7));
    Eigen::Map<Eigen::MatrixXd> image(out.data.col(q).data(), rows, cols);
    for (const ClutterSite& s : draw_clutter_sites(rows, cols, pfa, amplitude, rng, options))
      image(s.row, s.col) = std::abs(image(s.row, s.col) + s.value);
    const double peak = image.maxCoeff();
    if (peak > 1.0) image /= peak;
  }
  return out;
}

std::vector<Eigen::Index> mismatch_permutation(Eigen::Index count, double fraction,
                                               std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidConfig("label mismatch: fraction must lie in [0, 1]");
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(count));
  std::iota(perm.begin(), perm.end(), Eigen::Index{0});
  const auto moved = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(count) + 1e-9));
  if (moved < 2) return perm;  // a single column cannot be deranged

  Rng rng(substream(seed, 0x5407f1e));
  // Partial Fisher-Yates picks the moved columns.
  std::vector<Eigen::Index> pool = perm;
  for (Eigen::Index i = 0; i < moved; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(count - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  std::vector<Eigen::Index> chosen(pool.begin(), pool.begin() + moved);
  std::sort(chosen.begin(), chosen.end());
  // Sattolo's algorithm: a uniformly random single cycle, hence no fixed points.
  std::vector<Eigen::Index> cycle = chosen;
  for (Eigen::Index i = moved - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(i)));
    std::swap(cycle[static_cast<std::size_t>(i)], cycle[static_cast<std::size_t>(j)]);
  }
  for (std::size_t i = 0; i < chosen.size(); ++i) perm[static_cast<std::size_t>(chosen[i])] = cycle[i];
  return perm;
}

ImageStack shuffle_labels(const ImageStack& clean, double fraction, std::uint64_t seed,
                          MismatchMode mode) {
  clean.validate();
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw InvalidConfig("label mismatch: fraction must lie in [0, 1]");
  if (mode == MismatchMode::Columns) {
    const auto perm = mismatch_permutation(clean.count(), fraction, seed);
    return clean.select(perm);
  }
  ImageStack out = clean;
  const auto moved = static_cast<Eigen::Index>(std::floor(fraction * static_cast<double>(clean.count()) + 1e-9));
  Rng rng(substream(seed, 0x91e15));
  std::vector<Eigen::Index> columns(static_cast<std::size_t>(clean.count()));
  std::iota(columns.begin(), columns.end(), Eigen::Index{0});
  for (Eigen::Index i = 0; i < moved; ++i) {
    const auto j = i + static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(clean.count() - i)));
    std::swap(columns[static_cast<std::size_t>(i)], columns[static_cast<std::size_t>(j)]);
    const Eigen::Index q = columns[static_cast<std::size_t>(i)];
    for (Eigen::Index p = clean.pixels() - 1; p > 0; --p) {
      const auto k = static_cast<Eigen::Index>(rng.below(static_cast<std::uint64_t>(p + 1)));
      std::swap(out.data(p, q), out.data(k, q));
    }
  }
  return out;
}

}  // namespace rdae
