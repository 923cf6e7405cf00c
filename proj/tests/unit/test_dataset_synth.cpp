#include <gtest/gtest.h>

#include <cmath>
#include <complex>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

using namespace rdae;

namespace {

GaitParams static_torso() {
  GaitParams g;
  g.start = {0.5, 3.0};
  g.velocity = {0.0, 0.0};
  g.torso_height = 1.0;
  g.arm_swing = 0.0;
  g.leg_swing = 0.0;
  return g;
}

ImageStack random_stack(Eigen::Index rows, Eigen::Index cols, Eigen::Index q, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd d(rows * cols, q);
  for (Eigen::Index j = 0; j < d.cols(); ++j)
    for (Eigen::Index i = 0; i < d.rows(); ++i) d(i, j) = rng.uniform();
  std::vector<ColumnMeta> meta(static_cast<std::size_t>(q));
  for (Eigen::Index j = 0; j < q; ++j)
    meta[static_cast<std::size_t>(j)] = {static_cast<std::uint16_t>(j % 7),
                                         static_cast<std::uint16_t>(1 + j % 3),
                                         WallClass::MediumConductivity};
  return ImageStack(d, meta, rows, SignatureKind::Frontal, StackRole::Corrupt);
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("rdae_test_" + name);
}

}  // namespace

TEST(Gait, StaticTorsoGeometry) {
  const ScattererTrack t = gait_trajectory(static_torso(), RadarPosition{0.5, 0.0, 0.0}, 1.0, 100.0);
  ASSERT_EQ(t.samples(), 100);
  for (Eigen::Index n = 0; n < t.samples(); ++n) {
    EXPECT_NEAR(t.range3d(n, kTorso), std::sqrt(10.0), 1e-12);
    EXPECT_NEAR(t.range2d(n, kTorso), 3.0, 1e-12);
  }
}

TEST(Gait, TangentialPassIsSymmetric) {
  GaitParams g;
  g.start = {-2.5, 3.0};
  g.velocity = {1.0, 0.0};
  const ScattererTrack t = gait_trajectory(g, RadarPosition{0.5, 0.0, 0.0}, 6.0, 100.0);
  Eigen::Index argmin = 0;
  t.range2d.col(kTorso).minCoeff(&argmin);
  // Closest approach at x = 0.5, i.e. t = 3 s.
  EXPECT_EQ(argmin, 300);
  EXPECT_NEAR(t.range2d(argmin, kTorso), 3.0, 1e-12);
  for (Eigen::Index k = 1; k < 300; ++k)
    EXPECT_NEAR(t.range2d(300 - k, kTorso), t.range2d(300 + k, kTorso), 1e-12);
}

TEST(Gait, ArmDopplerMatchesFiniteDifference) {
  GaitParams g;
  g.velocity = {0.0, 0.0};
  g.start = {-1.5, 3.0};  // off boresight so the swing has a radial component
  const double fs = 1000.0, fc = 2.4e9;
  const ScattererTrack t = gait_trajectory(g, RadarPosition{0.5, 0.0, 0.0}, 2.0, fs);
  // The arm range oscillates at the stride frequency about the torso range.
  const Eigen::VectorXd arm = t.range3d.col(kLeftArm);
  const Eigen::VectorXd centered = arm.array() - arm.mean();
  double best = 0.0, best_f = 0.0;
  for (double f = 0.5; f <= 10.0; f += 0.5) {
    std::complex<double> acc = 0.0;
    for (Eigen::Index n = 0; n < arm.size(); ++n)
      acc += centered(n) * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(n) / fs);
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_f = f;
    }
  }
  EXPECT_EQ(best_f, g.stride_frequency);
  EXPECT_LT(std::abs(arm.mean() - t.range3d.col(kTorso).mean()), 0.3);

  // Peak Doppler of the arm from the phase rate of its return against the
  // finite-difference radial velocity of r_b(t).
  RadarConfig radar;
  radar.carrier = fc;
  radar.sample_rate = fs;
  radar.duration = 2.0;
  const Eigen::MatrixXcd s = radar_returns(t.subset({kLeftArm}), ChannelModel{}, radar, 1);
  double peak_phase_rate = 0.0, peak_fd = 0.0;
  for (Eigen::Index n = 1; n < s.rows(); ++n) {
    const double dphi = std::arg(s(n, 0) * std::conj(s(n - 1, 0)));
    peak_phase_rate = std::max(peak_phase_rate, std::abs(dphi) * fs / (2.0 * std::numbers::pi));
    peak_fd = std::max(peak_fd, std::abs(arm(n) - arm(n - 1)) * fs * 2.0 * fc / kSpeedOfLight);
  }
  EXPECT_GT(peak_fd, 1.0);
  EXPECT_NEAR(peak_phase_rate, peak_fd, 0.01 * peak_fd);
}

TEST(Channel, FreeSpaceUnitRange) {
  ChannelModel ch;
  const double f = 3.0 * kSpeedOfLight;  // f rho / c = 3
  const std::complex<double> h = channel_response(ch, 1.0, f, 1);
  EXPECT_NEAR(h.real(), 1.0, 1e-9);
  EXPECT_NEAR(h.imag(), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(channel_response(ch, 4.0, 2.4e9, 1)), 0.5, 1e-12);
}

TEST(Channel, SingleImageTapClosedForm) {
  ChannelModel ch = ChannelModel::for_wall(WallClass::HighConductivity);
  ch.relative_spread = 0.0;
  ch.direct_gain = 0.0;
  ch.image_gain = 0.4;
  ch.image_reflections = 1;
  const double rho = 2.5;
  const double path = std::hypot(rho, ch.lateral_offset);
  EXPECT_NEAR(std::abs(channel_response(ch, rho, 2.4e9, 1)), 0.4 / std::sqrt(path), 1e-12);
}

TEST(Channel, RealizationOutOfRangeThrows) {
  ChannelModel ch = ChannelModel::for_wall(WallClass::LowConductivity, 2, 3);
  EXPECT_THROW(channel_paths(ch, 2.4e9, 3), InvalidConfig);
}

TEST(Returns, StaticUnitScatterer) {
  GaitParams g = static_torso();
  RadarConfig radar;
  radar.sample_rate = 100.0;
  radar.duration = 0.5;
  // Radar at the torso height so that r = rho = 1 m.
  g.start = {0.5, 1.0};
  const ScattererTrack t =
      gait_trajectory(g, RadarPosition{0.5, 0.0, 1.0}, radar.duration, radar.sample_rate).subset({kTorso});
  ASSERT_NEAR(t.range3d(0, 0), 1.0, 1e-12);
  const Eigen::MatrixXcd s = radar_returns(t, ChannelModel{}, radar, 1);
  for (Eigen::Index n = 0; n < s.rows(); ++n) {
    EXPECT_NEAR(std::abs(s(n, 0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(s(n, 0) - s(0, 0)), 0.0, 1e-12);
  }
  const Eigen::MatrixXcd two = radar_returns(t.merged(t), ChannelModel{}, radar, 1);
  EXPECT_NEAR(std::abs(two(0, 0)), 2.0 * std::abs(s(0, 0)), 1e-12);
}

TEST(Returns, ConstantVelocityDopplerPeak) {
  GaitParams g = static_torso();
  g.start = {0.5, 3.0};
  g.velocity = {0.0, 1.0};  // receding at 1 m/s
  g.torso_height = 0.0;
  RadarConfig radar;
  radar.sample_rate = 500.0;
  radar.duration = 2.0;
  const ScattererTrack t = gait_trajectory(g, RadarPosition{0.5, 0.0, 0.0}, radar.duration, radar.sample_rate)
                               .subset({kTorso});
  const Eigen::MatrixXcd s = radar_returns(t, ChannelModel{}, radar, 1);
  const Eigen::Index n = s.rows();
  // Direct DFT over Doppler frequencies in [-fs/2, fs/2).
  double best = -1.0, best_f = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    const double f = -radar.sample_rate / 2.0 + k * radar.sample_rate / static_cast<double>(n);
    std::complex<double> acc = 0.0;
    for (Eigen::Index m = 0; m < n; ++m)
      acc += s(m, 0) * std::polar(1.0, -2.0 * std::numbers::pi * f * static_cast<double>(m) / radar.sample_rate);
    if (std::abs(acc) > best) {
      best = std::abs(acc);
      best_f = f;
    }
  }
  const double fd = -2.0 * 1.0 * radar.carrier / kSpeedOfLight;
  EXPECT_LE(std::abs(best_f - fd), radar.sample_rate / static_cast<double>(n) + 1e-9);
}

TEST(Stft, ToneGivesSingleRidge) {
  const double fs = 500.0;
  Eigen::VectorXcd x(1000);
  for (Eigen::Index n = 0; n < x.size(); ++n)
    x(n) = std::polar(1.0, 2.0 * std::numbers::pi * 50.0 * static_cast<double>(n) / fs);
  StftOptions opt;
  opt.window_seconds = 0.1;
  const auto centers = interval_centers(0.5, 1.5, 8, fs);
  const Eigen::MatrixXd p = stft_power(x, fs, centers, opt);
  ASSERT_EQ(p.rows(), 64);
  for (Eigen::Index c = 0; c < p.cols(); ++c) {
    Eigen::Index row = 0;
    p.col(c).maxCoeff(&row);
    EXPECT_NEAR(doppler_of_bin(static_cast<int>(row), 64, fs), 50.0, fs / 64.0 / 2.0 + 1e-9);
    EXPECT_NEAR(p(row, c), p(row, 0), 1e-9);
  }
}

TEST(Stft, SilenceSitsAtFloor) {
  const Eigen::VectorXcd x = Eigen::VectorXcd::Zero(1000);
  const Eigen::MatrixXd s = spectrogram(x, 500.0, StftOptions{}, 0.0, 2.0, 8, -90.0);
  EXPECT_TRUE((s.array() == -90.0).all());
}

TEST(Stft, TwoToneRidgeDifference) {
  const double fs = 500.0;
  Eigen::VectorXcd x(1000);
  for (Eigen::Index n = 0; n < x.size(); ++n) {
    const double t = static_cast<double>(n) / fs;
    x(n) = std::polar(1.0, 2.0 * std::numbers::pi * 100.0 * t) + std::polar(0.5, -2.0 * std::numbers::pi * 100.0 * t);
  }
  const Eigen::MatrixXd s = spectrogram(x, fs, StftOptions{}, 0.5, 1.5, 4);
  const int up = static_cast<int>(std::lround((100.0 + fs / 2.0) * 64 / fs));
  const int down = static_cast<int>(std::lround((-100.0 + fs / 2.0) * 64 / fs));
  for (Eigen::Index c = 0; c < s.cols(); ++c)
    EXPECT_NEAR(s(up, c) - s(down, c), 20.0 * std::log10(2.0), 0.05);
}

TEST(Hrrp, ResolutionAndUnambiguousRange) {
  EXPECT_NEAR(range_resolution(2e9), 0.075, 1e-3);
  RadarConfig radar;
  radar.bandwidth = 2e9;
  radar.frequency_samples = 134;
  EXPECT_NEAR(unambiguous_range(radar.frequency_step()), 10.0, 0.05);
}

namespace {
// Peak row of the HRRP of a static point target at ground range rho.
void hrrp_peak(double rho, double& peak_range, double& r_u) {
  GaitParams g = static_torso();
  g.start = {0.5, rho};
  g.torso_height = 0.0;
  RadarConfig radar;
  radar.bandwidth = 2e9;
  radar.frequency_samples = 134;
  radar.sample_rate = 20.0;
  radar.duration = 1.0;
  const ScattererTrack t =
      gait_trajectory(g, RadarPosition{0.5, 0.0, 0.0}, radar.duration, radar.sample_rate).subset({kTorso});
  const Eigen::MatrixXcd s = radar_returns(t, ChannelModel{}, radar, 1);
  HrrpOptions opt;
  opt.range_bins = 134;
  const Eigen::MatrixXd p = hrrp_power(s, radar.frequencies(), radar.sample_rate, opt, 0.0, 1.0, 4);
  r_u = unambiguous_range(radar.frequency_step());
  Eigen::Index row = 0;
  p.col(0).maxCoeff(&row);
  for (Eigen::Index c = 1; c < p.cols(); ++c) {
    Eigen::Index other = 0;
    p.col(c).maxCoeff(&other);
    EXPECT_EQ(other, row);
  }
  peak_range = range_of_bin(static_cast<int>(row), opt.range_bins, radar.frequency_step());
}
}  // namespace

TEST(Hrrp, PointTargetPeaksAtItsRange) {
  double peak = 0.0, r_u = 0.0;
  hrrp_peak(3.0, peak, r_u);
  EXPECT_NEAR(peak, 3.0, range_resolution(2e9));
}

TEST(Hrrp, TargetBeyondUnambiguousRangeAliases) {
  double peak = 0.0, r_u = 0.0;
  hrrp_peak(13.0, peak, r_u);
  EXPECT_NEAR(peak, std::fmod(13.0, r_u), range_resolution(2e9));
}

TEST(DbNormalize, ClampsAndMidpoint) {
  const DbRange r{-70.0, -20.0};
  Eigen::MatrixXd p(1, 3);
  p << std::pow(10.0, -2.0), 0.0, std::pow(10.0, -4.5);
  const Eigen::MatrixXd v = to_db_normalize(p, r);
  EXPECT_DOUBLE_EQ(v(0, 0), 1.0);
  EXPECT_DOUBLE_EQ(v(0, 1), 0.0);
  EXPECT_NEAR(v(0, 2), 0.5, 1e-12);
}

TEST(Noise, InfiniteSnrIsIdentity) {
  const ImageStack s = random_stack(8, 8, 5, 3);
  const ImageStack n = add_noise(s, kNoNoise, 9);
  EXPECT_TRUE(n.data == s.data);
}

TEST(Noise, VarianceMatchesReference) {
  const ImageStack s = random_stack(16, 16, 120, 4);
  NoiseOptions opt;
  opt.clamp = false;
  const ImageStack n = add_noise(s, 0.0, 11, opt);
  const double ref = signal_reference(s.data);
  const Eigen::ArrayXXd e = (n.data - s.data).array();
  const double var = (e - e.mean()).square().mean();
  EXPECT_NEAR(var / ref, 1.0, 0.05);
}

TEST(Noise, Deterministic) {
  const ImageStack s = random_stack(8, 8, 10, 5);
  EXPECT_TRUE(add_noise(s, -5.0, 12).data == add_noise(s, -5.0, 12).data);
  EXPECT_FALSE(add_noise(s, -5.0, 12).data == add_noise(s, -5.0, 13).data);
}

TEST(Noise, NanSnrThrows) {
  const ImageStack s = random_stack(4, 4, 2, 5);
  EXPECT_ANY_THROW(add_noise(s, std::nan(""), 1));
}

TEST(Clutter, AboutFiveSitesPerFrontalImage) {
  Rng rng(21);
  double total = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) total += static_cast<double>(draw_clutter_sites(31, 31, 0.06, 1.0, rng).size());
  EXPECT_NEAR(total / draws, 5.0, 0.3);
}

TEST(Clutter, ZeroPfaIsIdentity) {
  const ImageStack s = random_stack(31, 31, 4, 6);
  EXPECT_TRUE(add_point_clutter(s, 0.0, 0.0, 3).data == s.data);
}

TEST(Clutter, SitePowerMatchesReference) {
  const ImageStack s = random_stack(31, 31, 3, 7);
  const double ref = signal_reference(s.data);
  const double amplitude = std::sqrt(ref / std::pow(10.0, 0.0 / 10.0));
  Rng rng(22);
  double power = 0.0;
  std::size_t sites = 0;
  for (int i = 0; i < 1000; ++i)
    for (const ClutterSite& c : draw_clutter_sites(31, 31, 0.06, amplitude, rng)) {
      power += std::norm(c.value);
      ++sites;
      EXPECT_GE(c.row, 0);
      EXPECT_LT(c.row, 31);
      EXPECT_GE(c.col, 0);
      EXPECT_LT(c.col, 31);
    }
  EXPECT_NEAR(power / static_cast<double>(sites) / ref, 1.0, 0.1);
}

TEST(Mismatch, ZeroFractionIsIdentity) {
  const auto p = mismatch_permutation(10, 0.0, 1);
  for (Eigen::Index i = 0; i < 10; ++i) EXPECT_EQ(p[static_cast<std::size_t>(i)], i);
}

TEST(Mismatch, TwoColumnsSwap) {
  const auto p = mismatch_permutation(2, 1.0, 1);
  EXPECT_EQ(p[0], 1);
  EXPECT_EQ(p[1], 0);
}

TEST(Mismatch, HalfOfHundredMovesExactlyFifty) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto p = mismatch_permutation(100, 0.5, seed);
    std::set<Eigen::Index> image(p.begin(), p.end());
    EXPECT_EQ(image.size(), 100u);
    int moved = 0;
    for (Eigen::Index i = 0; i < 100; ++i) moved += p[static_cast<std::size_t>(i)] != i;
    EXPECT_EQ(moved, 50);
  }
}

TEST(Mismatch, ShuffleColumnsPermutesData) {
  const ImageStack s = random_stack(4, 4, 20, 8);
  const auto p = mismatch_permutation(20, 0.5, 3);
  const ImageStack t = shuffle_labels(s, 0.5, 3);
  for (Eigen::Index i = 0; i < 20; ++i) EXPECT_TRUE(t.data.col(i) == s.data.col(p[static_cast<std::size_t>(i)]));
}

TEST(Frontal, PhantomIsPeakNormalized) {
  const Eigen::MatrixXd img = frontal_phantom(FrontalPose{});
  EXPECT_EQ(img.rows(), 31);
  EXPECT_EQ(img.cols(), 31);
  EXPECT_NEAR(img.maxCoeff(), 1.0, 1e-12);
  EXPECT_GE(img.minCoeff(), 0.0);
}

TEST(DatasetIo, RoundTripPreservesDataAndMetadata) {
  const ImageStack s = random_stack(5, 6, 7, 9);
  const auto path = temp_path("roundtrip.rdae");
  save_stack(s, path);
  const ImageStack t = load_stack(path, 5);
  EXPECT_TRUE(t.data == s.data);
  EXPECT_EQ(t.meta, s.meta);
  EXPECT_EQ(t.kind, s.kind);
  EXPECT_EQ(t.role, s.role);
  std::filesystem::remove(path);
}

TEST(DatasetIo, TruncatedFileIsFormatError) {
  const ImageStack s = random_stack(4, 4, 3, 10);
  const auto path = temp_path("truncated.rdae");
  save_stack(s, path);
  std::filesystem::resize_file(path, std::filesystem::file_size(path) - 5);
  EXPECT_THROW(load_stack(path, 4), FormatError);
  std::filesystem::remove(path);
}

TEST(DatasetIo, MissingFileIsIoError) {
  EXPECT_THROW(load_stack(temp_path("does_not_exist.rdae")), IoError);
}

TEST(Dataset, CountsAndMetadata) {
  DatasetSpec spec = DatasetSpec::defaults(SignatureKind::Spectrogram);
  spec.channel.realizations = 2;
  spec.intervals = 8;
  spec.noise_draws = 10;
  spec.image_rows = 16;
  spec.image_cols = 16;
  spec.radar.duration = 2.0;
  const DatasetPair d = generate_dataset(spec);
  ASSERT_EQ(d.clean.count(), 160);
  ASSERT_EQ(d.corrupt.count(), 160);
  EXPECT_EQ(d.clean.meta, d.corrupt.meta);
  EXPECT_EQ(d.clean.meta.front().realization, 1);
  EXPECT_EQ(d.clean.meta.back().realization, 2);
  EXPECT_EQ(d.clean.meta.back().interval, 7);
  EXPECT_GE(d.clean.data.minCoeff(), 0.0);
  EXPECT_LE(d.clean.data.maxCoeff(), 1.0);
}

TEST(Dataset, FreeSpaceWithoutNoiseIsClean) {
  DatasetSpec spec = DatasetSpec::defaults(SignatureKind::Spectrogram);
  spec.channel = ChannelModel::for_wall(WallClass::FreeSpace);
  spec.snr_db = kNoNoise;
  spec.noise_draws = 1;
  spec.image_rows = 16;
  spec.image_cols = 16;
  spec.radar.duration = 2.0;
  const DatasetPair d = generate_dataset(spec);
  EXPECT_TRUE(d.clean.data == d.corrupt.data);
}

TEST(Dataset, DeterministicFiles) {
  DatasetSpec spec = DatasetSpec::defaults(SignatureKind::Frontal);
  spec.subjects = 2;
  spec.orientations = 6;
  const auto a = temp_path("det_a"), b = temp_path("det_b");
  save_dataset(generate_dataset(spec), a, spec.hash());
  save_dataset(generate_dataset(spec), b, spec.hash());
  for (const char* suffix : {"_clean.rdae", "_corrupt.rdae"}) {
    std::ifstream fa(a.string() + suffix, std::ios::binary), fb(b.string() + suffix, std::ios::binary);
    const std::string sa((std::istreambuf_iterator<char>(fa)), {}), sb((std::istreambuf_iterator<char>(fb)), {});
    EXPECT_FALSE(sa.empty());
    EXPECT_EQ(sa, sb);
  }
  const DatasetPair back = load_dataset(a.string() + ".manifest");
  EXPECT_EQ(back.clean.count(), 12);
  for (const auto& p : {a, b})
    for (const char* suffix : {"_clean.rdae", "_corrupt.rdae", ".manifest"}) std::filesystem::remove(p.string() + suffix);
}
