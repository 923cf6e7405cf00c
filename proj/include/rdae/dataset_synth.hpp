#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "rdae/image_stack.hpp"
#include "rdae/rng.hpp"

namespace rdae {

inline constexpr double kSpeedOfLight = 299792458.0;

// ---------------------------------------------------------------------------
// Human motion

// Radar location in the ground (x, z) plane plus antenna height.
struct RadarPosition {
  double x = 0.5;
  double z = 0.0;
  double height = 0.0;
};

// Five point scatterers (torso, two arms, two legs). The torso translates
// along a straight line; limbs swing sinusoidally along the walking
// direction at the stride frequency, left and right in antiphase.
struct GaitParams {
  Eigen::Vector2d start{-2.5, 3.0};    // torso (x, z) at t = 0, meters
  Eigen::Vector2d velocity{1.0, 0.0};  // m/s in the ground plane
  double torso_height = 1.0;
  double arm_height = 1.2;
  double leg_height = 0.4;
  double shoulder_offset = 0.2;  // lateral offset of the arms from the torso line
  double hip_offset = 0.1;
  double stride_frequency = 2.0;  // Hz
  double arm_swing = 0.3;         // m, swing amplitude
  double leg_swing = 0.25;
  double torso_reflectivity = 1.0;
  double arm_reflectivity = 0.3;
  double leg_reflectivity = 0.5;

  void validate() const;
};

enum ScattererIndex : int { kTorso = 0, kLeftArm = 1, kRightArm = 2, kLeftLeg = 3, kRightLeg = 4 };

// Time-sampled ranges of B point scatterers. Row n of each matrix is time
// n / sample_rate; column b is scatterer b.
struct ScattererTrack {
  Eigen::MatrixXd range3d;   // r_b(t)
  Eigen::MatrixXd range2d;   // rho_b(t)
  Eigen::VectorXd reflectivity;
  double sample_rate = 0.0;
  double duration = 0.0;

  Eigen::Index samples() const { return range3d.rows(); }
  Eigen::Index count() const { return range3d.cols(); }

  // Keeps only the listed scatterers, in order.
  ScattererTrack subset(const std::vector<int>& scatterers) const;
  // Scatterers of `other` appended after this track's (same time grid).
  ScattererTrack merged(const ScattererTrack& other) const;
};

// Samples t = n / sample_rate for n in [0, round(duration * sample_rate)).
ScattererTrack gait_trajectory(const GaitParams& gait, const RadarPosition& radar, double duration,
                               double sample_rate);

// ---------------------------------------------------------------------------
// Propagation channel

// Parametric multipath channel standing in for a full-wave wall simulation.
// FreeSpace is the analytic cylindrical response. LowConductivity adds a
// lossy through-wall direct path and `ringing_taps` reverberation paths;
// Medium/HighConductivity block the direct path and add `image_reflections`
// lateral / back-wall image paths whose gain follows the wall reflection
// coefficient. Each realization jitters tap gains and path offsets.
struct ChannelModel {
  WallClass wall_class = WallClass::FreeSpace;
  double permittivity = 4.0;        // mean relative dielectric constant
  double conductivity = 0.0;        // mean conductivity, S/m
  double relative_spread = 0.3;     // relative std of per-realization jitter
  double wall_thickness = 0.2;      // m
  int ringing_taps = 4;
  int image_reflections = 2;
  int realizations = 1;
  std::uint64_t seed = 0;
  double ring_offset = 0.6;         // m, lateral detour of the k-th ring path is k * ring_offset
  double lateral_offset = 2.0;      // m, image displacement across a lateral wall
  double back_wall_range = 8.0;     // m, range of the wall behind the target
  std::optional<double> direct_gain;  // overrides the computed through-wall gain
  std::optional<double> image_gain;   // overrides the computed reflection gain

  // Defaults for each wall class (conductivities 0, 0.05, 100, 1e5 S/m).
  static ChannelModel for_wall(WallClass wall, int realizations = 1, std::uint64_t seed = 0);

  void validate() const;
};

enum class PathGeometry : std::uint8_t {
  Direct,   // rho
  Oblique,  // sqrt(rho^2 + offset^2)
  Mirror,   // |2 * offset - rho|
};

struct PathTerm {
  PathGeometry geometry = PathGeometry::Direct;
  double gain = 1.0;
  double offset = 0.0;       // m, meaning depends on geometry
  double extra_delay = 0.0;  // s

  double path_length(double rho) const;
};

// Path terms of realization eta (1-based) evaluated at frequency f.
std::vector<PathTerm> channel_paths(const ChannelModel& channel, double frequency, int eta);

// H(rho, f, eta) = sum_p g_p exp(-j 2 pi f (L_p(rho) / c + tau_p)) / sqrt(L_p(rho)).
std::complex<double> channel_response(const ChannelModel& channel, double rho, double frequency,
                                      int eta);

// ---------------------------------------------------------------------------
// Radar returns and images

struct RadarConfig {
  double carrier = 2.4e9;      // Hz
  double bandwidth = 0.0;      // Hz; 0 means narrowband
  int frequency_samples = 1;   // 1 when narrowband
  double sample_rate = 500.0;  // slow-time samples per second
  double duration = 6.0;       // s
  double amplitude = 1.0;      // calibration A
  double window_seconds = 0.1; // STFT window
  double antenna_gain_db = 0.0;

  bool narrowband() const { return bandwidth == 0.0; }
  // Uniform grid f_c - B/2 + k B / N, k = 0..N-1 (just f_c when narrowband).
  std::vector<double> frequencies() const;
  double frequency_step() const;
  void validate() const;
};

double range_resolution(double bandwidth);
double unambiguous_range(double frequency_step);

// s_rx(t, f) = sum_b A a_b H(rho_b(t), f, eta)^2 exp(-j 4 pi f (r_b(t) - rho_b(t)) / c)
// Rows are slow-time samples, columns frequencies.
Eigen::MatrixXcd radar_returns(const ScattererTrack& track, const ChannelModel& channel,
                               const RadarConfig& radar, int eta);

struct StftOptions {
  double window_seconds = 0.1;
  int doppler_bins = 64;  // rows spanning [-fs/2, fs/2)
};

// Doppler frequency of row k: -fs/2 + k fs / bins.
double doppler_of_bin(int bin, int bins, double sample_rate);

// Hann-windowed STFT power |X|^2 at the given frame centers (fractional
// sample positions), normalized so a unit tone on a bin has power one.
Eigen::MatrixXd stft_power(const Eigen::VectorXcd& signal, double sample_rate,
                           const std::vector<double>& frame_centers, const StftOptions& options);

// Frame centers that split [t_begin, t_end) into `columns` equal cells.
std::vector<double> interval_centers(double t_begin, double t_end, int columns, double sample_rate);

// STFT power of the narrowband return over one time interval, in dB,
// clamped below at db_floor.
Eigen::MatrixXd spectrogram(const Eigen::VectorXcd& signal, double sample_rate,
                            const StftOptions& options, double t_begin, double t_end, int columns,
                            double db_floor = -200.0);

struct HrrpOptions {
  int range_bins = 64;  // rows spanning [0, unambiguous range)
};

// Range-time power image: inverse Fourier transform across frequency at each
// slow-time sample, power averaged over the samples of each time column.
Eigen::MatrixXd hrrp_power(const Eigen::MatrixXcd& returns, const std::vector<double>& frequencies,
                           double sample_rate, const HrrpOptions& options, double t_begin,
                           double t_end, int columns);

// Same, in dB clamped below at db_floor.
Eigen::MatrixXd hrrp(const Eigen::MatrixXcd& returns, const std::vector<double>& frequencies,
                     double sample_rate, const HrrpOptions& options, double t_begin, double t_end,
                     int columns, double db_floor = -200.0);

double range_of_bin(int bin, int bins, double frequency_step);

struct DbRange {
  double floor = -70.0;
  double ceil = -20.0;
};

// 10 log10(power), clamped to [floor, ceil], mapped affinely onto [0, 1].
Eigen::MatrixXd to_db_normalize(const Eigen::MatrixXd& power, const DbRange& range);
Eigen::MatrixXd to_db_normalize(const Eigen::MatrixXcd& field, const DbRange& range);

// ---------------------------------------------------------------------------
// Corruption

// Mean squared value of the above-floor (strictly positive) pixels.
double signal_reference(const Eigen::MatrixXd& stack);

inline constexpr double kNoNoise = std::numeric_limits<double>::infinity();

struct NoiseOptions {
  std::optional<double> signal_ref;  // defaults to signal_reference(stack)
  bool clamp = true;                 // re-clamp the output into [0, 1]
};

// Adds N(0, signal_ref / 10^(snr/10)) to every pixel; snr_db = +inf is the identity.
ImageStack add_noise(const ImageStack& stack, double snr_db, std::uint64_t seed,
                     const NoiseOptions& options = {});

struct ClutterOptions {
  int cell_rows = 7;   // coarse grid over which false alarms are drawn
  int cell_cols = 12;
  std::optional<double> signal_ref;
};

struct ClutterSite {
  Eigen::Index row = 0;
  Eigen::Index col = 0;
  std::complex<double> value;
};

// One Bernoulli(pfa) trial per coarse cell; each hit lands on a uniformly
// chosen pixel of its cell with uniform phase and magnitude `amplitude`.
std::vector<ClutterSite> draw_clutter_sites(Eigen::Index image_rows, Eigen::Index image_cols,
                                            double pfa, double amplitude, Rng& rng,
                                            const ClutterOptions& options = {});

// Complex sum of each image with its clutter sites; clutter power is
// signal_ref / 10^(scr/10). Each image is divided by max(1, peak) afterwards.
ImageStack add_point_clutter(const ImageStack& stack, double scr_db, double pfa,
                             std::uint64_t seed, const ClutterOptions& options = {});

enum class MismatchMode {
  Columns,  // derange a fraction of the clean columns (label shuffling)
  Pixels,   // scramble the pixels of a fraction of the columns
};

// Output column i takes input column perm[i]. floor(fraction * Q) columns are
// selected and cyclically permuted among themselves, so none stays in place.
std::vector<Eigen::Index> mismatch_permutation(Eigen::Index count, double fraction,
                                               std::uint64_t seed);

ImageStack shuffle_labels(const ImageStack& clean, double fraction, std::uint64_t seed,
                          MismatchMode mode = MismatchMode::Columns);

// ---------------------------------------------------------------------------
// Frontal phantoms

struct FrontalPose {
  double height_scale = 1.0;  // subject height relative to nominal
  double girth = 1.0;         // torso width relative to nominal
  double azimuth = 0.0;       // radians; 0 faces the sensor
  double arm_raise = 0.0;     // radians of arm elevation
};

// Range-enhanced frontal image phantom: head, torso, arms with bright
// hand-held reflectors, and legs as Gaussian blobs, peak-normalized to 1.
Eigen::MatrixXd frontal_phantom(const FrontalPose& pose, Eigen::Index rows = 31,
                                Eigen::Index cols = 31);

// ---------------------------------------------------------------------------
// Paired dataset generation

struct DatasetSpec {
  SignatureKind kind = SignatureKind::Spectrogram;
  RadarConfig radar;
  GaitParams gait;
  RadarPosition radar_position;
  ChannelModel channel;  // corrupting channel; clean images use free space
  int intervals = 8;
  int noise_draws = 10;
  double snr_db = kNoNoise;
  Eigen::Index image_rows = 64;
  Eigen::Index image_cols = 64;
  DbRange db_range;
  // Frontal datasets
  int subjects = 5;
  int orientations = 90;
  double scr_db = kNoNoise;
  double pfa = 0.06;
  std::uint64_t seed = 1;

  // Desk-scale defaults for each signature kind at carrier `carrier`.
  static DatasetSpec defaults(SignatureKind kind, double carrier = 2.4e9);

  void validate() const;
  // Canonical text form; its hash identifies the generated files.
  std::string describe() const;
  std::uint64_t hash() const;
};

// Clean images come from free space without noise; corrupt images from
// `channel` with noise (and clutter for frontal). Columns are ordered by
// realization, then interval, then noise draw.
DatasetPair generate_dataset(const DatasetSpec& spec);

// ---------------------------------------------------------------------------
// Dataset files

// Single stack: "RDAE1", u32 P, u32 Q, u8 value kind, u8 stack role, Q column
// records (u16 interval, u16 eta, u8 wall class), P * Q little-endian float64
// in column-major order.
void save_stack(const ImageStack& stack, const std::filesystem::path& path);
ImageStack load_stack(const std::filesystem::path& path, Eigen::Index image_rows = 0);

// Writes <stem>_clean.rdae, <stem>_corrupt.rdae and the text manifest
// <stem>.manifest naming both plus the config hash. Returns the manifest path.
std::filesystem::path save_dataset(const DatasetPair& pair, const std::filesystem::path& stem,
                                   std::uint64_t config_hash = 0);
DatasetPair load_dataset(const std::filesystem::path& manifest);

std::uint64_t fnv1a64(const void* data, std::size_t size,
                      std::uint64_t basis = 0xcbf29ce484222325ULL);

}  // namespace rdae
