#include "rdae/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include <Eigen/SVD>

#include "rdae/errors.hpp"

namespace rdae {
namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// One Haar level on the top-left rows x cols block.
void haar_level_forward(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd tmp(rows, cols);
  const Eigen::Index hr = rows / 2, hc = cols / 2;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < hr; ++r) {
      const double a = m(2 * r, c), b = m(2 * r + 1, c);
      tmp(r, c) = (a + b) * kInvSqrt2;
      tmp(hr + r, c) = (a - b) * kInvSqrt2;
    }
  }
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < hc; ++c) {
      const double a = tmp(r, 2 * c), b = tmp(r, 2 * c + 1);
      m(r, c) = (a + b) * kInvSqrt2;
      m(r, hc + c) = (a - b) * kInvSqrt2;
    }
  }
}

void haar_level_inverse(Eigen::MatrixXd& m, Eigen::Index rows, Eigen::Index cols) {
  Eigen::MatrixXd tmp(rows, cols);
  const Eigen::Index hr = rows / 2, hc = cols / 2;
  for (Eigen::Index r = 0; r < rows; ++r) {
    for (Eigen::Index c = 0; c < hc; ++c) {
      const double s = m(r, c), d = m(r, hc + c);
      tmp(r, 2 * c) = (s + d) * kInvSqrt2;
      tmp(r, 2 * c + 1) = (s - d) * kInvSqrt2;
    }
  }
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < hr; ++r) {
      const double s = tmp(r, c), d = tmp(hr + r, c);
      m(2 * r, c) = (s + d) * kInvSqrt2;
      m(2 * r + 1, c) = (s - d) * kInvSqrt2;
    }
  }
}

void check_divisible(const Eigen::MatrixXd& m, int levels) {
  const Eigen::Index block = Eigen::Index{1} << levels;
  if (levels < 0 || m.rows() % block != 0 || m.cols() % block != 0)
    throw InvalidConfig("haar: dimensions must be divisible by 2^levels");
}

// Symmetric (half-sample) reflection index into [0, n).
Eigen::Index reflect(Eigen::Index i, Eigen::Index n) {
  while (i < 0 || i >= n) {
    if (i < 0) i = -i - 1;
    if (i >= n) i = 2 * n - i - 1;
  }
  return i;
}

}  // namespace

void SvdFilterConfig::validate() const {
  if (rank.has_value() == energy_fraction.has_value())
    throw InvalidConfig("svd filter: exactly one of rank / energy_fraction must be set");
  if (rank && *rank < 1) throw InvalidConfig("svd filter: rank must be >= 1");
  if (energy_fraction && !(*energy_fraction > 0.0 && *energy_fraction <= 1.0))
    throw InvalidConfig("svd filter: energy_fraction must lie in (0, 1]");
}

void WaveletFilterConfig::validate(Eigen::Index min_dimension) const {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    throw InvalidConfig("wavelet filter: keep_fraction must lie in (0, 1]");
  if (levels < 1) throw InvalidConfig("wavelet filter: levels must be >= 1");
  if (min_dimension > 0 && (Eigen::Index{1} << levels) > min_dimension)
    throw InvalidConfig("wavelet filter: levels exceeds log2(min dimension)");
}

Eigen::Index svd_selected_rank(const Eigen::VectorXd& singular_values,
                               const SvdFilterConfig& config) {
  config.validate();
  const Eigen::Index n = singular_values.size();
  if (config.rank) {
    if (*config.rank > n) throw InvalidConfig("svd filter: rank exceeds min dimension");
    return *config.rank;
  }
  const double total = singular_values.squaredNorm();
  if (total == 0.0) return std::min<Eigen::Index>(1, n);
  double kept = 0.0;
  for (Eigen::Index k = 0; k < n; ++k) {
    kept += singular_values[k] * singular_values[k];
    if (kept >= *config.energy_fraction * total) return k + 1;
  }
  return n;
}

Eigen::MatrixXd svd_denoise(const Eigen::MatrixXd& data, const SvdFilterConfig& config) {
  config.validate();
  if (!data.allFinite()) throw DomainError("svd_denoise: non-finite input");
  if (data.size() == 0) return data;
  if (config.rank && *config.rank > std::min(data.rows(), data.cols()))
    throw InvalidConfig("svd filter: rank exceeds min dimension");
  Eigen::BDCSVD<Eigen::MatrixXd> svd(data, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXd& s = svd.singularValues();
  const Eigen::Index k = svd_selected_rank(s, config);
  return svd.matrixU().leftCols(k) * s.head(k).asDiagonal() * svd.matrixV().leftCols(k).transpose();
}

Eigen::MatrixXd haar_forward(const Eigen::MatrixXd& image, int levels) {
  check_divisible(image, levels);
  Eigen::MatrixXd out = image;
  Eigen::Index rows = image.rows(), cols = image.cols();
  for (int l = 0; l < levels; ++l) {
    haar_level_forward(out, rows, cols);
    rows /= 2;
    cols /= 2;
  }
  return out;
}

Eigen::MatrixXd haar_inverse(const Eigen::MatrixXd& coefficients, int levels) {
  check_divisible(coefficients, levels);
  Eigen::MatrixXd out = coefficients;
  for (int l = levels - 1; l >= 0; --l) {
    haar_level_inverse(out, coefficients.rows() >> l, coefficients.cols() >> l);
  }
  return out;
}

Eigen::MatrixXd wavelet_denoise(const Eigen::MatrixXd& image, const WaveletFilterConfig& config) {
  config.validate(std::min(image.rows(), image.cols()));
  const Eigen::Index block = Eigen::Index{1} << config.levels;
  const Eigen::Index rows = (image.rows() + block - 1) / block * block;
  const Eigen::Index cols = (image.cols() + block - 1) / block * block;
  Eigen::MatrixXd padded(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r)
      padded(r, c) = image(reflect(r, image.rows()), reflect(c, image.cols()));

  Eigen::MatrixXd coeffs = haar_forward(padded, config.levels);
  const Eigen::Index total = coeffs.size();
  const auto keep = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::ceil(config.keep_fraction * static_cast<double>(total) - 1e-9)),
      1, total);
  if (keep < total) {
    // Largest magnitudes first; ties broken by storage index so the kept
    // support is deterministic.
    std::vector<Eigen::Index> order(static_cast<std::size_t>(total));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    const double* v = coeffs.data();
    std::nth_element(order.begin(), order.begin() + keep, order.end(),
                     [v](Eigen::Index a, Eigen::Index b) {
                       const double ma = std::abs(v[a]), mb = std::abs(v[b]);
                       return ma != mb ? ma > mb : a < b;
                     });
    for (auto it = order.begin() + keep; it != order.end(); ++it) coeffs.data()[*it] = 0.0;
  }
  const Eigen::MatrixXd restored = haar_inverse(coeffs, config.levels);
  return restored.topLeftCorner(image.rows(), image.cols());
}

Eigen::MatrixXd svd_denoise_stack(const Eigen::MatrixXd& stack, Eigen::Index image_rows,
                                  const SvdFilterConfig& config) {
  if (image_rows <= 0 || stack.rows() % image_rows != 0)
    throw InvalidConfig("svd_denoise_stack: image_rows does not divide pixel count");
  const Eigen::Index image_cols = stack.rows() / image_rows;
  Eigen::MatrixXd out(stack.rows(), stack.cols());
  for (Eigen::Index q = 0; q < stack.cols(); ++q) {
    Eigen::Map<const Eigen::MatrixXd> img(stack.col(q).data(), image_rows, image_cols);
    Eigen::MatrixXd denoised = svd_denoise(img, config);
    out.col(q) = Eigen::Map<const Eigen::VectorXd>(denoised.data(), denoised.size());
  }
  return out;
}

Eigen::MatrixXd wavelet_denoise_stack(const Eigen::MatrixXd& stack, Eigen::Index image_rows,
                                      const WaveletFilterConfig& config) {
  if (image_rows <= 0 || stack.rows() % image_rows != 0)
    throw InvalidConfig("wavelet_denoise_stack: image_rows does not divide pixel count");
  const Eigen::Index image_cols = stack.rows() / image_rows;
  Eigen::MatrixXd out(stack.rows(), stack.cols());
  for (Eigen::Index q = 0; q < stack.cols(); ++q) {
    Eigen::Map<const Eigen::MatrixXd> img(stack.col(q).data(), image_rows, image_cols);
    Eigen::MatrixXd denoised = wavelet_denoise(img, config);
    out.col(q) = Eigen::Map<const Eigen::VectorXd>(denoised.data(), denoised.size());
  }
  return out;
}

}  // namespace rdae
