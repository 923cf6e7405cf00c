#include <gtest/gtest.h>

#include <cmath>

#include "rdae/errors.hpp"
#include "rdae/metrics.hpp"
#include "rdae/rng.hpp"

using namespace rdae;

namespace {

Eigen::MatrixXd uniform(Eigen::Index r, Eigen::Index c, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index j = 0; j < c; ++j)
    for (Eigen::Index i = 0; i < r; ++i) m(i, j) = rng.uniform();
  return m;
}

// Direct evaluation of the windowed SSIM formula, written without any of
// the library's filtering helpers.
double ssim_oracle(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  const int w = 11;
  const double sigma = 1.5, c1 = 0.01 * 0.01, c2 = 0.03 * 0.03;
  Eigen::MatrixXd g(w, w);
  for (int i = 0; i < w; ++i)
    for (int j = 0; j < w; ++j) g(i, j) = std::exp(-((i - 5) * (i - 5) + (j - 5) * (j - 5)) / (2 * sigma * sigma));
  g /= g.sum();
  double total = 0.0;
  int count = 0;
  for (Eigen::Index r = 0; r + w <= a.rows(); ++r)
    for (Eigen::Index c = 0; c + w <= a.cols(); ++c) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
          const double x = a(r + i, c + j), y = b(r + i, c + j), k = g(i, j);
          ma += k * x;
          mb += k * y;
          saa += k * x * x;
          sbb += k * y * y;
          sab += k * x * y;
        }
      const double va = saa - ma * ma, vb = sbb - mb * mb, cov = sab - ma * mb;
      total += (2 * ma * mb + c1) * (2 * cov + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
      ++count;
    }
  return total / count;
}

}  // namespace

TEST(Ssim, IdenticalImagesGiveOne) {
  const Eigen::MatrixXd x = uniform(31, 31, 1);
  EXPECT_EQ(ssim(x, x), 1.0);
}

TEST(Ssim, TwoBlockComplementIsLow) {
  Eigen::MatrixXd x = Eigen::MatrixXd::Zero(32, 32);
  x.leftCols(16).setOnes();
  const Eigen::MatrixXd y = Eigen::MatrixXd::Ones(32, 32) - x;
  const double s = ssim(x, y);
  EXPECT_LT(s, 0.5);
  EXPECT_NEAR(s, ssim_oracle(x, y), 1e-12);
}

TEST(Ssim, MatchesDirectOracleOnRandomImages) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Eigen::MatrixXd a = uniform(24, 20, seed), b = uniform(24, 20, seed + 50);
    EXPECT_NEAR(ssim(a, b), ssim_oracle(a, b), 1e-12);
  }
}

TEST(Ssim, SymmetricAndBounded) {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const Eigen::MatrixXd a = uniform(31, 31, seed), b = uniform(31, 31, seed + 100);
    const double s = ssim(a, b);
    EXPECT_NEAR(s, ssim(b, a), 1e-12);
    EXPECT_GE(s, -1.0);
    EXPECT_LE(s, 1.0);
  }
}

TEST(Ssim, SmallShiftChangesLittle) {
  const Eigen::MatrixXd a = 0.8 * uniform(31, 31, 3), b = 0.8 * uniform(31, 31, 4);
  const Eigen::MatrixXd shift = Eigen::MatrixXd::Constant(31, 31, 0.1);
  EXPECT_LT(std::abs(ssim(a + shift, b + shift) - ssim(a, b)), 0.02);
}

TEST(Ssim, SmallImagesUseGlobalStatistics) {
  const Eigen::MatrixXd a = uniform(8, 8, 5);
  EXPECT_EQ(ssim(a, a), 1.0);
  EXPECT_LT(ssim(a, uniform(8, 8, 6)), 0.5);
  EXPECT_THROW(ssim(a, uniform(8, 9, 6)), InvalidConfig);
}

TEST(Nmse, Identities) {
  const Eigen::MatrixXd x = uniform(10, 10, 7);
  EXPECT_EQ(nmse(x, x), 0.0);
  EXPECT_EQ(nmse(2.0 * x, x), 1.0);
  EXPECT_THROW(nmse(x, Eigen::MatrixXd::Zero(10, 10)), DomainError);
}

TEST(Nmse, ScaledErrorIsQuadratic) {
  const Eigen::MatrixXd x = uniform(10, 10, 8);
  Eigen::MatrixXd e = uniform(10, 10, 9).array() - 0.5;
  e *= std::sqrt(0.04 * x.squaredNorm() / e.squaredNorm());
  EXPECT_NEAR(nmse(x + e, x), 0.04, 1e-12);
  EXPECT_NEAR(nmse(x + 3.0 * e, x), 9.0 * nmse(x + e, x), 1e-12);
}

TEST(Metrics, StackMeans) {
  const Eigen::MatrixXd a = uniform(64, 5, 10), b = uniform(64, 5, 11);
  double s = 0.0, n = 0.0;
  for (Eigen::Index q = 0; q < 5; ++q) {
    s += ssim(a.col(q).reshaped(8, 8), b.col(q).reshaped(8, 8));
    n += nmse(a.col(q), b.col(q));
  }
  EXPECT_NEAR(mean_ssim(a, b, 8), s / 5.0, 1e-12);
  EXPECT_NEAR(mean_nmse(a, b), n / 5.0, 1e-12);
}
