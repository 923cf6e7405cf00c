// Paired clean / corrupt dataset generation.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {
namespace {

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// Power images (one per interval) of a single realization.
std::vector<Eigen::MatrixXd> interval_powers(const DatasetSpec& spec, const ScattererTrack& track,
                                             const ChannelModel& channel, int eta) {
  const Eigen::MatrixXcd returns = radar_returns(track, channel, spec.radar, eta);
  const double span = spec.radar.duration / spec.intervals;
  const int cols = static_cast<int>(spec.image_cols);
  std::vector<Eigen::MatrixXd> out;
  out.reserve(static_cast<std::size_t>(spec.intervals));
  for (int i = 0; i < spec.intervals; ++i) {
    const double t0 = i * span, t1 = (i + 1) * span;
    if (spec.kind == SignatureKind::Spectrogram) {
      StftOptions stft;
      stft.window_seconds = spec.radar.window_seconds;
      stft.doppler_bins = static_cast<int>(spec.image_rows);
      out.push_back(stft_power(returns.col(0), spec.radar.sample_rate,
                               interval_centers(t0, t1, cols, spec.radar.sample_rate), stft));
    } else {
      HrrpOptions opts;
      opts.range_bins = static_cast<int>(spec.image_rows);
      out.push_back(hrrp_power(returns, spec.radar.frequencies(), spec.radar.sample_rate, opts, t0,
                               t1, cols));
    }
  }
  return out;
}

DatasetPair generate_radar(const DatasetSpec& spec) {
  const ScattererTrack track =
      gait_trajectory(spec.gait, spec.radar_position, spec.radar.duration, spec.radar.sample_rate);
  const ChannelModel free_space = ChannelModel::for_wall(WallClass::FreeSpace);
  const std::vector<Eigen::MatrixXd> clean_power = interval_powers(spec, track, free_space, 1);

  // Amplitude calibration: A = 1 puts the brightest free-space pixel at the
  // top of the dB range; A scales returns (and so powers by A^2) from there.
  double peak = 0.0;
  for (const auto& p : clean_power) peak = std::max(peak, p.maxCoeff());
  if (!(peak > 0.0)) throw InvalidConfig("dataset: target produces no return");
  const double scale = spec.radar.amplitude * std::pow(10.0, spec.radar.antenna_gain_db / 20.0);
  const double gain = std::pow(10.0, spec.db_range.ceil / 10.0) / peak * scale * scale;

  const int m = spec.channel.realizations;
  const Eigen::Index pixels = spec.image_rows * spec.image_cols;
  const Eigen::Index q_total = static_cast<Eigen::Index>(m) * spec.intervals * spec.noise_draws;
  Eigen::MatrixXd clean(pixels, q_total), corrupt(pixels, q_total);
  std::vector<ColumnMeta> meta;
  meta.reserve(static_cast<std::size_t>(q_total));

  std::vector<Eigen::MatrixXd> clean_images;
  for (const auto& p : clean_power) clean_images.push_back(to_db_normalize(Eigen::MatrixXd(p * gain), spec.db_range));

  Eigen::Index q = 0;
  for (int eta = 1; eta <= m; ++eta) {
    const std::vector<Eigen::MatrixXd> wall_power = interval_powers(spec, track, spec.channel, eta);
    for (int i = 0; i < spec.intervals; ++i) {
      const Eigen::MatrixXd wall_image = to_db_normalize(Eigen::MatrixXd(wall_power[static_cast<std::size_t>(i)] * gain), spec.db_range);
      for (int d = 0; d < spec.noise_draws; ++d, ++q) {
        clean.col(q) = clean_images[static_cast<std::size_t>(i)].reshaped();
        corrupt.col(q) = wall_image.reshaped();
        meta.push_back({static_cast<std::uint16_t>(i), static_cast<std::uint16_t>(eta), spec.channel.wall_class});
      }
    }
  }

  DatasetPair pair;
  pair.clean = ImageStack(std::move(clean), meta, spec.image_rows, spec.kind, StackRole::Clean);
  ImageStack noiseless(std::move(corrupt), std::move(meta), spec.image_rows, spec.kind, StackRole::Corrupt);
  NoiseOptions noise;
  noise.signal_ref = signal_reference(pair.clean.data);
  pair.corrupt = add_noise(noiseless, spec.snr_db, substream(spec.seed, 0x4e015e), noise);
  return pair;
}

DatasetPair generate_frontal(const DatasetSpec& spec) {
  const Eigen::Index pixels = spec.image_rows * spec.image_cols;
  const Eigen::Index q_total = static_cast<Eigen::Index>(spec.subjects) * spec.orientations * spec.noise_draws;
  Eigen::MatrixXd clean(pixels, q_total);
  std::vector<ColumnMeta> meta;
  meta.reserve(static_cast<std::size_t>(q_total));

  Eigen::Index q = 0;
  for (int s = 0; s < spec.subjects; ++s) {
    Rng rng(substream(spec.seed, 0xf2047a1, static_cast<std::uint64_t>(s)));
    FrontalPose pose;
    pose.height_scale = 0.9 + 0.2 * rng.uniform();
    pose.girth = 0.8 + 0.4 * rng.uniform();
    const double raise_base = 0.3 + 0.6 * rng.uniform();
    for (int o = 0; o < spec.orientations; ++o) {
      pose.azimuth = 2.0 * std::numbers::pi * o / spec.orientations;
      pose.arm_raise = raise_base * (1.0 + 0.3 * std::sin(pose.azimuth));
      const Eigen::MatrixXd image = frontal_phantom(pose, spec.image_rows, spec.image_cols);
      for (int d = 0; d < spec.noise_draws; ++d, ++q) {
        clean.col(q) = image.reshaped();
        meta.push_back({static_cast<std::uint16_t>(o), static_cast<std::uint16_t>(s + 1), spec.channel.wall_class});
      }
    }
  }

  DatasetPair pair;
  pair.clean = ImageStack(std::move(clean), meta, spec.image_rows, spec.kind, StackRole::Clean);
  const double ref = signal_reference(pair.clean.data);
  ClutterOptions clutter;
  clutter.signal_ref = ref;
  ImageStack cluttered = add_point_clutter(pair.clean, spec.scr_db, spec.pfa, substream(spec.seed, 0xc1077e7), clutter);
  cluttered.role = StackRole::Corrupt;
  NoiseOptions noise;
  noise.signal_ref = ref;
  pair.corrupt = add_noise(cluttered, spec.snr_db, substream(spec.seed, 0x4e015e), noise);
  return pair;
}

}  // namespace

DatasetSpec DatasetSpec::defaults(SignatureKind kind, double carrier) {
  DatasetSpec spec;
  spec.kind = kind;
  spec.radar.carrier = carrier;
  spec.snr_db = -10.0;
  switch (kind) {
    case SignatureKind::Spectrogram:
      spec.channel = ChannelModel::for_wall(WallClass::LowConductivity, 4, 7);
      spec.db_range = {-70.0, -20.0};
      break;
    case SignatureKind::Hrrp:
      spec.radar.bandwidth = 2e9;
      spec.radar.frequency_samples = 134;
      spec.channel = ChannelModel::for_wall(WallClass::LowConductivity, 4, 7);
      spec.db_range = {-70.0, -30.0};
      break;
    case SignatureKind::Frontal:
      spec.channel = ChannelModel::for_wall(WallClass::FreeSpace);
      spec.image_rows = 31;
      spec.image_cols = 31;
      spec.noise_draws = 1;
      spec.scr_db = 10.0;
      break;
  }
  return spec;
}

void DatasetSpec::validate() const {
  if (image_rows < 1 || image_cols < 1) throw InvalidConfig("dataset: image size must be positive");
  if (noise_draws < 1) throw InvalidConfig("dataset: noise_draws must be >= 1");
  if (std::isnan(snr_db) || std::isnan(scr_db)) throw InvalidConfig("dataset: SNR/SCR must not be NaN");
  channel.validate();
  if (image_rows > 0xffff || image_cols > 0xffff) throw InvalidConfig("dataset: image too large");
  if (kind == SignatureKind::Frontal) {
    if (subjects < 1 || orientations < 1) throw InvalidConfig("dataset: subjects and orientations must be >= 1");
    if (orientations > 0xffff || subjects >= 0xffff) throw InvalidConfig("dataset: too many frontal views");
    if (!(pfa >= 0.0 && pfa <= 1.0)) throw InvalidConfig("dataset: pfa must lie in [0, 1]");
    return;
  }
  radar.validate();
  gait.validate();
  if (intervals < 1 || intervals > 0xffff) throw InvalidConfig("dataset: intervals must be in [1, 65535]");
  if (channel.realizations > 0xffff) throw InvalidConfig("dataset: too many realizations");
  if (kind == SignatureKind::Spectrogram && !radar.narrowband())
    throw InvalidConfig("dataset: spectrograms need a narrowband radar (bandwidth = 0)");
  if (kind == SignatureKind::Hrrp && radar.narrowband())
    throw InvalidConfig("dataset: HRRP needs bandwidth > 0");
  if (!(db_range.floor < db_range.ceil)) throw InvalidConfig("dataset: dB floor must be below ceil");
  const double samples_per_interval = radar.duration * radar.sample_rate / intervals;
  if (samples_per_interval < static_cast<double>(image_cols))
    throw InvalidConfig("dataset: fewer time samples per interval than image columns");
}

std::string DatasetSpec::describe() const {
  std::ostringstream s;
  s << "kind=" << to_string(kind) << '\n'
    << "image=" << image_rows << 'x' << image_cols << '\n'
    << "noise_draws=" << noise_draws << '\n'
    << "snr_db=" << fmt_double(snr_db) << '\n'
    << "seed=" << seed << '\n'
    << "channel=" << to_string(channel.wall_class) << ' ' << fmt_double(channel.permittivity) << ' '
    << fmt_double(channel.conductivity) << ' ' << fmt_double(channel.relative_spread) << ' '
    << fmt_double(channel.wall_thickness) << ' ' << channel.ringing_taps << ' '
    << channel.image_reflections << ' ' << channel.realizations << ' ' << channel.seed << ' '
    << fmt_double(channel.ring_offset) << ' ' << fmt_double(channel.lateral_offset) << ' '
    << fmt_double(channel.back_wall_range) << ' '
    << (channel.direct_gain ? fmt_double(*channel.direct_gain) : "auto") << ' '
    << (channel.image_gain ? fmt_double(*channel.image_gain) : "auto") << '\n';
  if (kind == SignatureKind::Frontal) {
    s << "subjects=" << subjects << '\n'
      << "orientations=" << orientations << '\n'
      << "scr_db=" << fmt_double(scr_db) << '\n'
      << "pfa=" << fmt_double(pfa) << '\n';
    return s.str();
  }
  s << "radar=" << fmt_double(radar.carrier) << ' ' << fmt_double(radar.bandwidth) << ' '
    << radar.frequency_samples << ' ' << fmt_double(radar.sample_rate) << ' '
    << fmt_double(radar.duration) << ' ' << fmt_double(radar.amplitude) << ' '
    << fmt_double(radar.window_seconds) << ' ' << fmt_double(radar.antenna_gain_db) << '\n'
    << "gait=" << fmt_double(gait.start.x()) << ' ' << fmt_double(gait.start.y()) << ' '
    << fmt_double(gait.velocity.x()) << ' ' << fmt_double(gait.velocity.y()) << ' '
    << fmt_double(gait.torso_height) << ' ' << fmt_double(gait.arm_height) << ' '
    << fmt_double(gait.leg_height) << ' ' << fmt_double(gait.shoulder_offset) << ' '
    << fmt_double(gait.hip_offset) << ' ' << fmt_double(gait.stride_frequency) << ' '
    << fmt_double(gait.arm_swing) << ' ' << fmt_double(gait.leg_swing) << ' '
    << fmt_double(gait.torso_reflectivity) << ' ' << fmt_double(gait.arm_reflectivity) << ' '
    << fmt_double(gait.leg_reflectivity) << '\n'
    << "radar_position=" << fmt_double(radar_position.x) << ' ' << fmt_double(radar_position.z)
    << ' ' << fmt_double(radar_position.height) << '\n'
    << "intervals=" << intervals << '\n'
    << "db_range=" << fmt_double(db_range.floor) << ' ' << fmt_double(db_range.ceil) << '\n';
  return s.str();
}

std::uint64_t DatasetSpec::hash() const {
  const std::string text = describe();
  return fnv1a64(text.data(), text.size());
}

DatasetPair generate_dataset(const DatasetSpec& spec) {
  spec.validate();
  return spec.kind == SignatureKind::Frontal ? generate_frontal(spec) : generate_radar(spec);
}

std::uint64_t fnv1a64(const void* data, std::size_t size, std::uint64_t basis) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  std::uint64_t h = basis;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace rdae
