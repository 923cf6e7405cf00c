// Synthetic frontal (elevation x azimuth) phantoms built from Gaussian blobs.

#include <algorithm>
#include <cmath>

#include "rdae/dataset_synth.hpp"
#include "rdae/errors.hpp"

namespace rdae {
namespace {

struct Blob {
  double row, col;      // center in normalized [0, 1] image coordinates (row 0 = top)
  double sig_r, sig_c;  // widths, normalized
  double amplitude;
};

void splat(Eigen::MatrixXd& image, const Blob& b) {
  const auto rows = static_cast<double>(image.rows());
  const auto cols = static_cast<double>(image.cols());
  for (Eigen::Index c = 0; c < image.cols(); ++c) {
    const double dc = ((static_cast<double>(c) + 0.5) / cols - b.col) / b.sig_c;
    for (Eigen::Index r = 0; r < image.rows(); ++r) {
      const double dr = ((static_cast<double>(r) + 0.5) / rows - b.row) / b.sig_r;
      image(r, c) += b.amplitude * std::exp(-0.5 * (dr * dr + dc * dc));
    }
  }
}

}  // namespace

Eigen::MatrixXd frontal_phantom(const FrontalPose& pose, Eigen::Index rows, Eigen::Index cols) {
  if (rows < 4 || cols < 4) throw InvalidConfig("frontal phantom: image must be at least 4x4");
  if (!(pose.height_scale > 0.0) || !(pose.girth > 0.0))
    throw InvalidConfig("frontal phantom: height_scale and girth must be positive");

  // Turning away from the sensor narrows the silhouette and drops the far arm.
  const double turn = std::abs(std::cos(pose.azimuth));
  const double side = std::sin(pose.azimuth);
  const double h = 0.8 * pose.height_scale;
  const double top = 0.5 - h / 2.0;  // head position
  const double w = 0.09 * pose.girth * (0.45 + 0.55 * turn);
  const double shoulder = top + 0.2 * h;
  const double arm_len = 0.3 * h;
  const double raise = pose.arm_raise;

  std::vector<Blob> blobs;
  blobs.push_back({top + 0.06 * h, 0.5, 0.05 * h, 0.045, 0.7});                      // head
  blobs.push_back({top + 0.33 * h, 0.5, 0.16 * h, w, 1.0});                          // torso
  blobs.push_back({top + 0.75 * h, 0.5 - 0.45 * w, 0.17 * h, 0.35 * w + 0.01, 0.6});  // left leg
  blobs.push_back({top + 0.75 * h, 0.5 + 0.45 * w, 0.17 * h, 0.35 * w + 0.01, 0.6});  // right leg

  for (int s = -1; s <= 1; s += 2) {
    // Far arm fades as the body turns.
    const double visible = std::clamp(1.0 + 0.8 * s * side, 0.2, 1.0);
    const double base_r = shoulder;
    const double base_c = 0.5 + s * (w + 0.02);
    const double end_r = base_r + arm_len * std::cos(raise);
    const double end_c = base_c + s * arm_len * std::sin(raise) * turn;
    blobs.push_back({(base_r + end_r) / 2.0, (base_c + end_c) / 2.0, 0.08 * h, 0.025, 0.45 * visible});
    blobs.push_back({end_r, end_c, 0.025, 0.025, 0.9 * visible});  // hand-held reflector
  }

  Eigen::MatrixXd image = Eigen::MatrixXd::Zero(rows, cols);
  for (const Blob& b : blobs) splat(image, b);
  const double peak = image.maxCoeff();
  if (peak > 0.0) image /= peak;
  return image;
}

}  // namespace rdae
