// Human gait model, surrogate wall channel and radar returns.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {
namespace {

constexpr double kVacuumPermittivity = 8.8541878128e-12;
constexpr double kMinPathLength = 0.1;

struct WallOptics {
  double reflection = 0.0;    // |Gamma| at the air / wall interface
  double transmission = 1.0;  // one-way amplitude through the slab
  double index = 1.0;         // Re(sqrt(eps_c))
};

WallOptics wall_optics(const ChannelModel& ch, double frequency) {
  const double omega = 2.0 * std::numbers::pi * frequency;
  const std::complex<double> eps(ch.permittivity, -ch.conductivity / (omega * kVacuumPermittivity));
  const std::complex<double> n = std::sqrt(eps);
  const std::complex<double> gamma = (1.0 - n) / (1.0 + n);
  const double attenuation = omega / kSpeedOfLight * std::abs(n.imag());
  WallOptics optics;
  optics.reflection = std::abs(gamma);
  optics.transmission = std::abs(1.0 - gamma * gamma) * std::exp(-attenuation * ch.wall_thickness);
  optics.index = n.real();
  return optics;
}

}  // namespace

void GaitParams::validate() const {
  if (!velocity.allFinite() || !start.allFinite()) throw InvalidConfig("gait: non-finite trajectory");
  if (!(stride_frequency >= 0.0)) throw InvalidConfig("gait: stride frequency must be >= 0");
  if (!(arm_swing >= 0.0) || !(leg_swing >= 0.0)) throw InvalidConfig("gait: swing must be >= 0");
  if (!(torso_reflectivity > 0.0) || !(arm_reflectivity > 0.0) || !(leg_reflectivity > 0.0))
    throw InvalidConfig("gait: reflectivities must be > 0");
}

ScattererTrack ScattererTrack::subset(const std::vector<int>& scatterers) const {
  ScattererTrack out;
  out.sample_rate = sample_rate;
  out.duration = duration;
  const auto n = static_cast<Eigen::Index>(scatterers.size());
  out.range3d.resize(samples(), n);
  out.range2d.resize(samples(), n);
  out.reflectivity.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const int b = scatterers[static_cast<std::size_t>(j)];
    if (b < 0 || b >= count()) throw InvalidConfig("track subset: scatterer index out of range");
    out.range3d.col(j) = range3d.col(b);
    out.range2d.col(j) = range2d.col(b);
    out.reflectivity[j] = reflectivity[b];
  }
  return out;
}

ScattererTrack ScattererTrack::merged(const ScattererTrack& other) const {
  if (other.samples() != samples() || other.sample_rate != sample_rate)
    throw InvalidConfig("track merge: time grids differ");
  ScattererTrack out = *this;
  const Eigen::Index n = count(), m = other.count();
  out.range3d.conservativeResize(Eigen::NoChange, n + m);
  out.range2d.conservativeResize(Eigen::NoChange, n + m);
  out.reflectivity.conservativeResize(n + m);
  out.range3d.rightCols(m) = other.range3d;
  out.range2d.rightCols(m) = other.range2d;
  out.reflectivity.tail(m) = other.reflectivity;
  return out;
}

ScattererTrack gait_trajectory(const GaitParams& gait, const RadarPosition& radar, double duration,
                               double sample_rate) {
  if (!(duration > 0.0) || !(sample_rate > 0.0))
    throw InvalidConfig("gait: duration and sample rate must be > 0");
  gait.validate();
  const auto samples = static_cast<Eigen::Index>(std::llround(duration * sample_rate));
  if (samples < 1) throw InvalidConfig("gait: fewer than one time sample");

  const double speed = gait.velocity.norm();
  const Eigen::Vector2d along = speed > 0.0 ? Eigen::Vector2d(gait.velocity / speed)
                                            : Eigen::Vector2d(1.0, 0.0);
  const Eigen::Vector2d lateral(-along.y(), along.x());
  const Eigen::Vector2d origin(radar.x, radar.z);

  struct Part {
    Eigen::Vector2d offset;
    double swing;  // signed amplitude along the walking direction
    double height;
    double reflectivity;
  };
  const Part parts[5] = {
      {Eigen::Vector2d::Zero(), 0.0, gait.torso_height, gait.torso_reflectivity},
      {lateral * gait.shoulder_offset, gait.arm_swing, gait.arm_height, gait.arm_reflectivity},
      {-lateral * gait.shoulder_offset, -gait.arm_swing, gait.arm_height, gait.arm_reflectivity},
      {lateral * gait.hip_offset, -gait.leg_swing, gait.leg_height, gait.leg_reflectivity},
      {-lateral * gait.hip_offset, gait.leg_swing, gait.leg_height, gait.leg_reflectivity},
  };

  ScattererTrack track;
  track.sample_rate = sample_rate;
  track.duration = duration;
  track.range3d.resize(samples, 5);
  track.range2d.resize(samples, 5);
  track.reflectivity.resize(5);
  for (int b = 0; b < 5; ++b) track.reflectivity[b] = parts[b].reflectivity;

  for (Eigen::Index n = 0; n < samples; ++n) {
    const double t = static_cast<double>(n) / sample_rate;
    const Eigen::Vector2d torso = gait.start + gait.velocity * t;
    const double phase = std::sin(2.0 * std::numbers::pi * gait.stride_frequency * t);
    for (int b = 0; b < 5; ++b) {
      const Eigen::Vector2d p = torso + parts[b].offset + along * (parts[b].swing * phase);
      const double rho = (p - origin).norm();
      const double dh = parts[b].height - radar.height;
      track.range2d(n, b) = rho;
      track.range3d(n, b) = std::sqrt(rho * rho + dh * dh);
    }
  }
  return track;
}

ChannelModel ChannelModel::for_wall(WallClass wall, int realizations, std::uint64_t seed) {
  ChannelModel ch;
  ch.wall_class = wall;
  ch.realizations = realizations;
  ch.seed = seed;
  switch (wall) {
    case WallClass::FreeSpace: ch.conductivity = 0.0; break;
    case WallClass::LowConductivity: ch.conductivity = 0.05; break;
    case WallClass::MediumConductivity: ch.conductivity = 100.0; break;
    case WallClass::HighConductivity: ch.conductivity = 1e5; break;
  }
  return ch;
}

void ChannelModel::validate() const {
  if (realizations < 1) throw InvalidConfig("channel: realizations must be >= 1");
  if (!(permittivity >= 1.0)) throw InvalidConfig("channel: permittivity must be >= 1");
  if (!(conductivity >= 0.0)) throw InvalidConfig("channel: conductivity must be >= 0");
  if (!(relative_spread >= 0.0)) throw InvalidConfig("channel: relative spread must be >= 0");
  if (!(wall_thickness > 0.0)) throw InvalidConfig("channel: wall thickness must be > 0");
  if (ringing_taps < 0 || image_reflections < 0) throw InvalidConfig("channel: negative tap count");
  if ((direct_gain && !(*direct_gain >= 0.0)) || (image_gain && !(*image_gain >= 0.0)))
    throw InvalidConfig("channel: gain overrides must be >= 0");
}

double PathTerm::path_length(double rho) const {
  switch (geometry) {
    case PathGeometry::Direct: return rho;
    case PathGeometry::Oblique: return std::sqrt(rho * rho + offset * offset);
    case PathGeometry::Mirror: return std::max(std::abs(2.0 * offset - rho), kMinPathLength);
  }
  return rho;
}

std::vector<PathTerm> channel_paths(const ChannelModel& ch, double frequency, int eta) {
  ch.validate();
  if (eta < 1 || eta > ch.realizations)
    throw InvalidConfig("channel: realization index " + std::to_string(eta) + " outside 1.." +
                        std::to_string(ch.realizations));
  if (ch.wall_class == WallClass::FreeSpace) return {PathTerm{}};

  const WallOptics optics = wall_optics(ch, frequency);
  std::vector<PathTerm> paths;
  PathTerm direct;
  direct.gain = ch.direct_gain.value_or(optics.transmission);
  paths.push_back(direct);

  if (ch.wall_class == WallClass::LowConductivity) {
    // Reverberation inside the slab: each extra round trip costs |Gamma|^2
    // and 2 d n / c of delay, and exits on a slightly longer oblique path.
    const double round_trip = 2.0 * ch.wall_thickness * optics.index / kSpeedOfLight;
    for (int k = 1; k <= ch.ringing_taps; ++k) {
      PathTerm ring;
      ring.geometry = PathGeometry::Oblique;
      ring.gain = direct.gain * std::pow(optics.reflection, 2 * k);
      ring.offset = k * ch.ring_offset;
      ring.extra_delay = k * round_trip;
      paths.push_back(ring);
    }
  } else {
    const double reflect = ch.image_gain.value_or(optics.reflection);
    for (int l = 0; l < ch.image_reflections; ++l) {
      PathTerm image;
      image.gain = reflect * std::pow(0.8, l / 2);
      if (l % 2 == 0) {
        image.geometry = PathGeometry::Oblique;
        image.offset = ch.lateral_offset * (1 + l / 2);
      } else {
        image.geometry = PathGeometry::Mirror;
        image.offset = ch.back_wall_range + (l / 2);
      }
      paths.push_back(image);
    }
  }

  if (ch.relative_spread > 0.0) {
    // The draws depend only on (seed, eta) so every frequency of a
    // realization sees the same wall.
    Rng rng(substream(ch.seed, static_cast<std::uint64_t>(eta)));
    for (PathTerm& p : paths) {
      const double g = rng.normal(), o = rng.normal(), d = rng.normal();
      p.gain *= std::max(0.0, 1.0 + ch.relative_spread * g);
      p.offset *= std::max(0.1, 1.0 + ch.relative_spread * o);
      p.extra_delay *= std::max(0.0, 1.0 + ch.relative_spread * d);
    }
  }
  return paths;
}

namespace {
std::complex<double> evaluate_paths(const std::vector<PathTerm>& paths, double rho,
                                    double frequency) {
  std::complex<double> h = 0.0;
  const double k = 2.0 * std::numbers::pi * frequency;
  for (const PathTerm& p : paths) {
    if (p.gain == 0.0) continue;
    const double length = p.path_length(rho);
    h += std::polar(p.gain / std::sqrt(length), -k * (length / kSpeedOfLight + p.extra_delay));
  }
  return h;
}
}  // namespace

std::complex<double> channel_response(const ChannelModel& channel, double rho, double frequency,
                                      int eta) {
  if (!(rho > 0.0)) throw DomainError("channel_response: range must be > 0");
  return evaluate_paths(channel_paths(channel, frequency, eta), rho, frequency);
}

std::vector<double> RadarConfig::frequencies() const {
  if (narrowband()) return {carrier};
  std::vector<double> f(static_cast<std::size_t>(frequency_samples));
  const double step = frequency_step();
  for (int k = 0; k < frequency_samples; ++k) f[static_cast<std::size_t>(k)] = carrier - bandwidth / 2.0 + k * step;
  return f;
}

double RadarConfig::frequency_step() const {
  return narrowband() ? 0.0 : bandwidth / frequency_samples;
}

void RadarConfig::validate() const {
  if (!(carrier > 0.0)) throw InvalidConfig("radar: carrier must be > 0");
  if (!(bandwidth >= 0.0)) throw InvalidConfig("radar: bandwidth must be >= 0");
  if (frequency_samples < 1) throw InvalidConfig("radar: frequency_samples must be >= 1");
  if (narrowband() && frequency_samples != 1)
    throw InvalidConfig("radar: narrowband radar takes exactly one frequency sample");
  if (!narrowband() && frequency_samples < 2)
    throw InvalidConfig("radar: wideband radar needs at least two frequency samples");
  if (!(sample_rate > 0.0) || !(duration > 0.0))
    throw InvalidConfig("radar: sample rate and duration must be > 0");
  if (!(window_seconds > 0.0)) throw InvalidConfig("radar: STFT window must be > 0");
}

double range_resolution(double bandwidth) {
  if (!(bandwidth > 0.0)) throw DomainError("range_resolution: bandwidth must be > 0");
  return kSpeedOfLight / (2.0 * bandwidth);
}

double unambiguous_range(double frequency_step) {
  if (!(frequency_step > 0.0)) throw DomainError("unambiguous_range: step must be > 0");
  return kSpeedOfLight / (2.0 * frequency_step);
}

Eigen::MatrixXcd radar_returns(const ScattererTrack& track, const ChannelModel& channel,
                               const RadarConfig& radar, int eta) {
  radar.validate();
  channel.validate();
  const auto expected = static_cast<Eigen::Index>(std::llround(radar.duration * radar.sample_rate));
  if (track.sample_rate != radar.sample_rate || track.samples() != expected)
    throw InvalidConfig("radar_returns: track and radar sample grids differ");

  const std::vector<double> freqs = radar.frequencies();
  const double scale = radar.amplitude * std::pow(10.0, radar.antenna_gain_db / 20.0);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(track.samples(), static_cast<Eigen::Index>(freqs.size()));
  for (std::size_t fi = 0; fi < freqs.size(); ++fi) {
    const double f = freqs[fi];
    const std::vector<PathTerm> paths = channel_paths(channel, f, eta);
    const double k = 4.0 * std::numbers::pi * f / kSpeedOfLight;
    for (Eigen::Index n = 0; n < track.samples(); ++n) {
      std::complex<double> acc = 0.0;
      for (Eigen::Index b = 0; b < track.count(); ++b) {
        const double rho = track.range2d(n, b);
        if (!(rho > 0.0)) throw DomainError("radar_returns: scatterer at zero ground range");
        const std::complex<double> h = evaluate_paths(paths, rho, f);
        acc += track.reflectivity[b] * h * h *
               std::polar(1.0, -k * (track.range3d(n, b) - rho));
      }
      out(n, static_cast<Eigen::Index>(fi)) = scale * acc;
    }
  }
  return out;
}

}  // namespace rdae
