#pragma once

#include <optional>

#include <Eigen/Core>

namespace rdae {

// Exactly one of `rank` / `energy_fraction` selects how many singular
// triplets survive. The default keeps the smallest rank holding 95% of the
// spectral energy.
struct SvdFilterConfig {
  std::optional<Eigen::Index> rank;
  std::optional<double> energy_fraction = 0.95;

  void validate() const;
};

struct WaveletFilterConfig {
  int levels = 2;
  double keep_fraction = 0.1;

  void validate(Eigen::Index min_dimension) const;
};

// Best rank-k approximation by truncated SVD.
Eigen::MatrixXd svd_denoise(const Eigen::MatrixXd& data, const SvdFilterConfig& config = {});

// Rank selected for `data` under `config`.
Eigen::Index svd_selected_rank(const Eigen::VectorXd& singular_values,
                               const SvdFilterConfig& config);

// Orthonormal multi-level 2-D Haar analysis, in place layout (Mallat ordering:
// approximation band in the top-left corner). Both dimensions must be
// divisible by 2^levels.
Eigen::MatrixXd haar_forward(const Eigen::MatrixXd& image, int levels);
Eigen::MatrixXd haar_inverse(const Eigen::MatrixXd& coefficients, int levels);

// Haar analysis, keep the keep_fraction largest-magnitude coefficients, zero
// the rest, synthesize. Images whose sides are not divisible by 2^levels are
// reflect-padded and cropped back.
Eigen::MatrixXd wavelet_denoise(const Eigen::MatrixXd& image, const WaveletFilterConfig& config = {});

// Per-column application to a stack of image_rows-tall images.
Eigen::MatrixXd svd_denoise_stack(const Eigen::MatrixXd& stack, Eigen::Index image_rows,
                                  const SvdFilterConfig& config = {});
Eigen::MatrixXd wavelet_denoise_stack(const Eigen::MatrixXd& stack, Eigen::Index image_rows,
                                      const WaveletFilterConfig& config = {});

}  // namespace rdae
