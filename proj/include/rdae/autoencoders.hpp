#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "rdae/sparse_solvers.hpp"

namespace rdae {

enum class ActivationKind : std::uint8_t { Linear = 0, Tanh = 1, Sigmoid = 2 };

std::string_view to_string(ActivationKind k);
ActivationKind parse_activation(std::string_view s);

struct Activation {
  ActivationKind kind = ActivationKind::Linear;
  // Inverse arguments are clamped this far inside the open range of the
  // activation so that atanh / logit stay finite.
  double inverse_clamp = 1e-6;

  void validate() const;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& v) const;
  Eigen::MatrixXd invert(const Eigen::MatrixXd& v) const;
};

enum class Variant : std::uint8_t { Dae = 0, SparseDae = 1, StackedSdae = 2 };

std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

// Learned network. Shallow variants hold encoders = {W1} and decoder = W2.
// The stacked variant holds encoders = {W11, W12, W21} and decoder = W22;
// any strictly decreasing depth is accepted, three layers is the default.
struct AutoencoderWeights {
  Variant variant = Variant::Dae;
  Activation activation;
  std::vector<Eigen::MatrixXd> encoders;
  Eigen::MatrixXd decoder;

  Eigen::Index pixels() const { return decoder.rows(); }
  std::vector<Eigen::Index> layer_sizes() const;

  const Eigen::MatrixXd& w1() const { return encoders.at(0); }
  const Eigen::MatrixXd& w2() const { return decoder; }
  const Eigen::MatrixXd& w11() const { return encoders.at(0); }
  const Eigen::MatrixXd& w12() const { return encoders.at(1); }
  const Eigen::MatrixXd& w21() const { return encoders.at(2); }
  const Eigen::MatrixXd& w22() const { return decoder; }

  // Multiply-accumulate operations for one inference pass.
  std::int64_t inference_macs() const;

  void validate() const;
};

struct TrainOptions {
  Activation activation;
  // Shallow: encoder/decoder trade-off and code sparsity.
  double lambda = 1.0;
  double mu = 0.1;
  // Stacked: per-layer coupling weights mu_k and code sparsity lambda_k.
  std::vector<double> coupling{1.0, 1.0, 1.0};
  std::vector<double> sparsity{0.1, 0.1, 0.1};

  int outer_iterations = 50;
  double outer_tolerance = 1e-4;
  std::uint64_t seed = 1;
  IstaOptions ista;
  // Ridge for the weight least-squares blocks; std::nullopt uses default_ridge.
  std::optional<double> ridge;

  void validate() const;
};

struct TrainTrace {
  std::vector<double> objective;
  std::vector<double> seconds;  // cumulative wall time at each outer iteration
  bool diverged = false;
};

struct TrainResult {
  AutoencoderWeights weights;
  TrainTrace trace;
  // Hidden codes after the last iteration: {Z} or {Z0, Z1, Z2}.
  std::vector<Eigen::MatrixXd> codes;
};

TrainResult train_dae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                      Eigen::Index hidden, const TrainOptions& options = {});

TrainResult train_sparse_dae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                             Eigen::Index hidden, const TrainOptions& options = {});

TrainResult train_stacked_sdae(const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                               const std::vector<Eigen::Index>& sizes,
                               const TrainOptions& options = {});

// Denoised output, clamped to [0, 1]. Accepts one column or a whole stack.
Eigen::MatrixXd infer(const AutoencoderWeights& weights, const Eigen::MatrixXd& corrupt);

// Training objective of the variant evaluated at (weights, codes):
//   DAE         ||X - W2 Z||^2 + lambda ||Z - phi(W1 X^)||^2
//   SparseDAE   the above + mu ||Z||_1
//   StackedSDAE ||X - W22 Z2||^2 + sum_k mu_k ||phi^-1(Z_k) - E_k in_k||^2
//               + sum_k lambda_k ||Z_k||_1, with in_0 = X^ and in_k = Z_{k-1}.
double objective_value(const AutoencoderWeights& weights, const std::vector<Eigen::MatrixXd>& codes,
                       const Eigen::MatrixXd& clean, const Eigen::MatrixXd& corrupt,
                       const TrainOptions& options);

// Weights file: "RDAEW1", u8 variant, u8 activation, u32 pixel count, u32
// layer count, u32 layer sizes, then encoders in order and the decoder as
// little-endian float64, column-major.
void save_weights(const AutoencoderWeights& weights, const std::filesystem::path& path);
AutoencoderWeights load_weights(const std::filesystem::path& path);

}  // namespace rdae
