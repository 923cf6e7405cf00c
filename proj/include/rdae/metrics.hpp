#pragma once

#include <Eigen/Core>

#include "rdae/image_stack.hpp"

namespace rdae {

struct SsimParams {
  int window_size = 11;
  double gaussian_sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double data_range = 1.0;

  void validate() const;
};

// Normalized Gaussian window (weights sum to one).
Eigen::MatrixXd ssim_window(const SsimParams& params);

// Mean of the local SSIM map over every fully-contained window position.
// Images smaller than the window on either side fall back to one SSIM value
// computed from global statistics.
double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimParams& params = {});

// ||a - ref||_F^2 / ||ref||_F^2
double nmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref);

// Column-wise means over paired stacks (images taken from image_rows).
double mean_ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref, Eigen::Index image_rows,
                 const SsimParams& params = {});
double mean_nmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref);

}  // namespace rdae
