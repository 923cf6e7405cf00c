#include "rdae/metrics.hpp"

#include <cmath>

#include "rdae/errors.hpp"

namespace rdae {
namespace {

struct Moments {
  double mean_a, mean_b, var_a, var_b, cov;
};

double ssim_from_moments(const Moments& m, double c1, double c2) {
  const double luminance = (2.0 * m.mean_a * m.mean_b + c1) /
                           (m.mean_a * m.mean_a + m.mean_b * m.mean_b + c1);
  const double structure = (2.0 * m.cov + c2) / (m.var_a + m.var_b + c2);
  return luminance * structure;
}

}  // namespace

void SsimParams::validate() const {
  if (window_size < 1) throw InvalidConfig("ssim: window_size must be >= 1");
  if (!(gaussian_sigma > 0.0)) throw InvalidConfig("ssim: gaussian_sigma must be > 0");
  if (!(k1 > 0.0) || !(k2 > 0.0)) throw InvalidConfig("ssim: K1 and K2 must be > 0");
  if (!(data_range > 0.0)) throw InvalidConfig("ssim: data_range must be > 0");
}

Eigen::MatrixXd ssim_window(const SsimParams& params) {
  params.validate();
  const int n = params.window_size;
  const double center = (n - 1) / 2.0;
  Eigen::VectorXd g(n);
  for (int i = 0; i < n; ++i) {
    const double d = i - center;
    g[i] = std::exp(-d * d / (2.0 * params.gaussian_sigma * params.gaussian_sigma));
  }
  g /= g.sum();
  return g * g.transpose();
}

double ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, const SsimParams& params) {
  params.validate();
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw InvalidConfig("ssim: image dimensions differ");
  if (a.size() == 0) throw InvalidConfig("ssim: empty image");
  const double c1 = std::pow(params.k1 * params.data_range, 2);
  const double c2 = std::pow(params.k2 * params.data_range, 2);
  const int n = params.window_size;

  if (a.rows() < n || a.cols() < n) {
    const double count = static_cast<double>(a.size());
    Moments m{};
    m.mean_a = a.mean();
    m.mean_b = b.mean();
    m.var_a = (a.array() - m.mean_a).square().sum() / count;
    m.var_b = (b.array() - m.mean_b).square().sum() / count;
    m.cov = ((a.array() - m.mean_a) * (b.array() - m.mean_b)).sum() / count;
    return ssim_from_moments(m, c1, c2);
  }

  const Eigen::MatrixXd w = ssim_window(params);
  const Eigen::MatrixXd aa = a.cwiseProduct(a);
  const Eigen::MatrixXd bb = b.cwiseProduct(b);
  const Eigen::MatrixXd ab = a.cwiseProduct(b);
  const Eigen::Index rows = a.rows() - n + 1;
  const Eigen::Index cols = a.cols() - n + 1;
  double total = 0.0;
  for (Eigen::Index c = 0; c < cols; ++c) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double mu_a = (w.array() * a.block(r, c, n, n).array()).sum();
      const double mu_b = (w.array() * b.block(r, c, n, n).array()).sum();
      Moments m{};
      m.mean_a = mu_a;
      m.mean_b = mu_b;
      m.var_a = (w.array() * aa.block(r, c, n, n).array()).sum() - mu_a * mu_a;
      m.var_b = (w.array() * bb.block(r, c, n, n).array()).sum() - mu_b * mu_b;
      m.cov = (w.array() * ab.block(r, c, n, n).array()).sum() - mu_a * mu_b;
      total += ssim_from_moments(m, c1, c2);
    }
  }
  return total / static_cast<double>(rows * cols);
}

double nmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  if (a.rows() != ref.rows() || a.cols() != ref.cols())
    throw InvalidConfig("nmse: dimensions differ");
  const double energy = ref.squaredNorm();
  if (energy == 0.0) throw DomainError("nmse: reference has zero energy");
  return (a - ref).squaredNorm() / energy;
}

double mean_ssim(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref, Eigen::Index image_rows,
                 const SsimParams& params) {
  if (a.rows() != ref.rows() || a.cols() != ref.cols())
    throw InvalidConfig("mean_ssim: stack dimensions differ");
  if (image_rows <= 0 || a.rows() % image_rows != 0)
    throw InvalidConfig("mean_ssim: image_rows does not divide pixel count");
  if (a.cols() == 0) throw InvalidConfig("mean_ssim: empty stack");
  const Eigen::Index image_cols = a.rows() / image_rows;
  double total = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q) {
    Eigen::Map<const Eigen::MatrixXd> ia(a.col(q).data(), image_rows, image_cols);
    Eigen::Map<const Eigen::MatrixXd> ib(ref.col(q).data(), image_rows, image_cols);
    total += ssim(ia, ib, params);
  }
  return total / static_cast<double>(a.cols());
}

double mean_nmse(const Eigen::MatrixXd& a, const Eigen::MatrixXd& ref) {
  if (a.rows() != ref.rows() || a.cols() != ref.cols())
    throw InvalidConfig("mean_nmse: stack dimensions differ");
  if (a.cols() == 0) throw InvalidConfig("mean_nmse: empty stack");
  double total = 0.0;
  for (Eigen::Index q = 0; q < a.cols(); ++q) total += nmse(a.col(q), ref.col(q));
  return total / static_cast<double>(a.cols());
}

}  // namespace rdae
