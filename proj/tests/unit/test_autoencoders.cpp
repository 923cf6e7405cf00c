#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>

#include <Eigen/Dense>

#include "rdae/autoencoders.hpp"
#include "rdae/errors.hpp"
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

// P x Q matrix of exact rank k with entries in [0, 1].
Eigen::MatrixXd low_rank(Eigen::Index p, Eigen::Index q, Eigen::Index k, std::uint64_t seed) {
  return uniform(p, k, seed) * uniform(k, q, seed + 1) / static_cast<double>(k);
}

TrainOptions linear_options(int iterations) {
  TrainOptions o;
  o.outer_iterations = iterations;
  o.outer_tolerance = 0.0;
  o.ridge = 0.0;
  return o;
}

double reference_objective(const AutoencoderWeights& w, const std::vector<Eigen::MatrixXd>& z,
                           const Eigen::MatrixXd& x, const Eigen::MatrixXd& xh, const TrainOptions& o) {
  auto phi = [&](const Eigen::MatrixXd& v) -> Eigen::MatrixXd {
    return w.activation.kind == ActivationKind::Tanh ? Eigen::MatrixXd(v.array().tanh()) : v;
  };
  auto phi_inv = [&](const Eigen::MatrixXd& v) -> Eigen::MatrixXd {
    if (w.activation.kind != ActivationKind::Tanh) return v;
    const double lim = 1.0 - w.activation.inverse_clamp;
    return v.cwiseMax(-lim).cwiseMin(lim).unaryExpr([](double a) { return std::atanh(a); });
  };
  double f = (x - w.decoder * z.back()).squaredNorm();
  if (w.variant != Variant::StackedSdae) {
    f += o.lambda * (z[0] - phi(w.encoders[0] * xh)).squaredNorm();
    if (w.variant == Variant::SparseDae) f += o.mu * z[0].cwiseAbs().sum();
    return f;
  }
  for (std::size_t k = 0; k < z.size(); ++k) {
    const Eigen::MatrixXd& in = k == 0 ? xh : z[k - 1];
    f += o.coupling[k] * (phi_inv(z[k]) - w.encoders[k] * in).squaredNorm() + o.sparsity[k] * z[k].cwiseAbs().sum();
  }
  return f;
}

}  // namespace

TEST(Activation, LinearIsIdentity) {
  const Eigen::MatrixXd v = 4.0 * uniform(3, 4, 1);
  Activation a;
  EXPECT_TRUE(a.apply(v) == v);
  EXPECT_TRUE(a.invert(v) == v);
}

TEST(Activation, TanhRoundTrip) {
  const Eigen::MatrixXd v = 6.0 * (uniform(5, 5, 2).array() - 0.5).matrix();
  Activation a;
  a.kind = ActivationKind::Tanh;
  EXPECT_LT((a.invert(a.apply(v)) - v).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Activation, TanhInverseClampIsFinite) {
  Activation a;
  a.kind = ActivationKind::Tanh;
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  const double v = a.invert(one)(0, 0);
  EXPECT_TRUE(std::isfinite(v));
  EXPECT_NEAR(v, std::atanh(1.0 - a.inverse_clamp), 1e-12);
}

TEST(Dae, AutoencodesRankDeficientCleanData) {
  const Eigen::MatrixXd x = low_rank(20, 60, 19, 3);
  TrainOptions o = linear_options(50);
  o.ridge.reset();
  const TrainResult r = train_dae(x, x, 19, o);
  EXPECT_LE(r.trace.objective.back(), 1e-3 * x.squaredNorm());
}

TEST(Dae, SinglePairIsInterpolated) {
  const Eigen::MatrixXd x = uniform(16, 1, 4), xh = uniform(16, 1, 5);
  const TrainResult r = train_dae(x, xh, 4, linear_options(30));
  EXPECT_LT((infer(r.weights, xh) - x).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Dae, ZeroLambdaGivesLeastSquaresCodes) {
  const Eigen::MatrixXd x = uniform(12, 30, 6), xh = uniform(12, 30, 7);
  TrainOptions o = linear_options(3);
  o.lambda = 0.0;
  const TrainResult r = train_dae(x, xh, 5, o);
  const Eigen::MatrixXd& w2 = r.weights.decoder;
  const Eigen::MatrixXd z = w2.completeOrthogonalDecomposition().solve(x);
  EXPECT_TRUE(r.codes[0].isApprox(z, 1e-8));
}

TEST(Dae, ObjectiveTraceIsMonotone) {
  const Eigen::MatrixXd x = uniform(25, 40, 8), xh = uniform(25, 40, 9);
  const TrainResult dae = train_dae(x, xh, 10, linear_options(15));
  const TrainResult sparse = train_sparse_dae(x, xh, 10, linear_options(15));
  for (const TrainResult* r : {&dae, &sparse})
    for (std::size_t i = 1; i < r->trace.objective.size(); ++i)
      EXPECT_LE(r->trace.objective[i], r->trace.objective[i - 1] * (1.0 + 1e-8));
}

TEST(SparseDae, ZeroMuReducesToDae) {
  const Eigen::MatrixXd x = uniform(20, 30, 10), xh = uniform(20, 30, 11);
  TrainOptions o = linear_options(5);
  o.mu = 0.0;
  o.ista.max_iterations = 20000;
  o.ista.relative_tolerance = 1e-15;
  const double dae = train_dae(x, xh, 8, o).trace.objective.back();
  const double sparse = train_sparse_dae(x, xh, 8, o).trace.objective.back();
  EXPECT_NEAR(sparse, dae, 1e-5 * dae);
}

TEST(SparseDae, HugeMuZeroesCodes) {
  const Eigen::MatrixXd x = uniform(16, 20, 12), xh = uniform(16, 20, 13);
  TrainOptions o = linear_options(3);
  o.mu = 1e8;
  const TrainResult r = train_sparse_dae(x, xh, 6, o);
  EXPECT_TRUE(r.codes[0].isZero(0.0));
  const double expected = x.squaredNorm() + o.lambda * (r.weights.encoders[0] * xh).squaredNorm();
  EXPECT_NEAR(r.trace.objective.back(), expected, 1e-9 * expected);
}

TEST(SparseDae, SparsityPathIsMonotone) {
  const Eigen::MatrixXd x = uniform(16, 40, 14), xh = uniform(16, 40, 15);
  double last = 1.0;
  for (double mu : {0.01, 0.1, 1.0}) {
    TrainOptions o = linear_options(10);
    o.mu = mu;
    const TrainResult r = train_sparse_dae(x, xh, 8, o);
    const double nonzero = static_cast<double>((r.codes[0].array() != 0.0).count()) /
                           static_cast<double>(r.codes[0].size());
    EXPECT_LE(nonzero, last);
    last = nonzero;
  }
  EXPECT_LT(last, 1.0);
}

TEST(Stacked, RepresentsLowRankData) {
  const Eigen::MatrixXd x = low_rank(24, 50, 8, 16);
  TrainOptions o = linear_options(60);
  o.sparsity = {0.0, 0.0, 0.0};
  o.ridge.reset();
  const TrainResult r = train_stacked_sdae(x, x, {16, 12, 8}, o);
  const AutoencoderWeights& w = r.weights;
  const Eigen::MatrixXd out = w.decoder * (w.encoders[2] * (w.encoders[1] * (w.encoders[0] * x)));
  EXPECT_LE((out - x).squaredNorm(), 1e-4 * x.squaredNorm());
}

TEST(Stacked, SinglePairIsInterpolated) {
  const Eigen::MatrixXd x = uniform(20, 1, 17), xh = uniform(20, 1, 18);
  TrainOptions o = linear_options(40);
  o.sparsity = {0.0, 0.0, 0.0};
  const TrainResult r = train_stacked_sdae(x, xh, {8, 6, 4}, o);
  EXPECT_LT((infer(r.weights, xh) - x).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Stacked, ObjectiveTraceIsMonotone) {
  const Eigen::MatrixXd x = uniform(30, 40, 19), xh = uniform(30, 40, 20);
  TrainOptions o = linear_options(12);
  o.activation.kind = ActivationKind::Tanh;
  const TrainResult r = train_stacked_sdae(x, xh, {16, 8, 4}, o);
  ASSERT_EQ(r.codes.size(), 3u);
  for (std::size_t i = 1; i < r.trace.objective.size(); ++i)
    EXPECT_LE(r.trace.objective[i], r.trace.objective[i - 1] * (1.0 + 1e-8));
}

TEST(Stacked, RejectsNonDecreasingSizes) {
  const Eigen::MatrixXd x = uniform(10, 5, 21);
  EXPECT_THROW(train_stacked_sdae(x, x, {4, 6, 2}), InvalidConfig);
}

TEST(Infer, IdentityCompositionPassesInputThrough) {
  AutoencoderWeights w;
  const Eigen::MatrixXd a = Eigen::MatrixXd::Random(6, 6) + 3.0 * Eigen::MatrixXd::Identity(6, 6);
  w.encoders = {a};
  w.decoder = a.inverse();
  Eigen::MatrixXd xh = uniform(6, 4, 22);
  xh(0, 0) = 1.5;  // clamped back into [0, 1]
  const Eigen::MatrixXd out = infer(w, xh);
  EXPECT_NEAR(out(0, 0), 1.0, 1e-12);
  xh(0, 0) = 1.0;
  EXPECT_LT((out - xh).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(Infer, ZeroWeightsGiveZero) {
  AutoencoderWeights w;
  w.encoders = {Eigen::MatrixXd::Zero(3, 8)};
  w.decoder = Eigen::MatrixXd::Zero(8, 3);
  EXPECT_TRUE(infer(w, uniform(8, 2, 23)).isZero(0.0));
}

TEST(Infer, BatchEqualsColumnwise) {
  const Eigen::MatrixXd x = uniform(20, 30, 24), xh = uniform(20, 30, 25);
  TrainOptions o = linear_options(5);
  o.activation.kind = ActivationKind::Tanh;
  const AutoencoderWeights w = train_stacked_sdae(x, xh, {10, 6, 3}, o).weights;
  const Eigen::MatrixXd batch = infer(w, xh);
  // Matrix-matrix and matrix-vector kernels may round differently.
  for (Eigen::Index q = 0; q < xh.cols(); ++q)
    EXPECT_LT((batch.col(q) - infer(w, xh.col(q))).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Objective, ZeroWeightsAndCodes) {
  const Eigen::MatrixXd x = uniform(10, 6, 26);
  AutoencoderWeights w;
  w.encoders = {Eigen::MatrixXd::Zero(4, 10)};
  w.decoder = Eigen::MatrixXd::Zero(10, 4);
  TrainOptions o;
  EXPECT_DOUBLE_EQ(objective_value(w, {Eigen::MatrixXd::Zero(4, 6)}, x, x, o), x.squaredNorm());
}

TEST(Objective, PerfectFitIsZero) {
  const Eigen::MatrixXd xh = uniform(8, 5, 27);
  AutoencoderWeights w;
  w.variant = Variant::SparseDae;
  w.encoders = {uniform(3, 8, 28)};
  w.decoder = uniform(8, 3, 29);
  const Eigen::MatrixXd z = w.encoders[0] * xh;
  TrainOptions o;
  o.mu = 0.0;
  EXPECT_NEAR(objective_value(w, {z}, w.decoder * z, xh, o), 0.0, 1e-20);
}

TEST(Objective, MatchesIndependentEvaluator) {
  const Eigen::MatrixXd x = uniform(9, 7, 30), xh = uniform(9, 7, 31);
  TrainOptions o;
  o.lambda = 0.7;
  o.mu = 0.3;
  o.coupling = {0.5, 2.0, 1.5};
  o.sparsity = {0.2, 0.05, 0.4};
  for (Variant v : {Variant::Dae, Variant::SparseDae, Variant::StackedSdae})
    for (ActivationKind k : {ActivationKind::Linear, ActivationKind::Tanh}) {
      AutoencoderWeights w;
      w.variant = v;
      w.activation.kind = k;
      std::vector<Eigen::MatrixXd> z;
      if (v == Variant::StackedSdae) {
        w.encoders = {uniform(6, 9, 32), uniform(4, 6, 33), uniform(2, 4, 34)};
        z = {uniform(6, 7, 35) * 0.9, uniform(4, 7, 36) * 0.9, uniform(2, 7, 37) * 0.9};
      } else {
        w.encoders = {uniform(4, 9, 38)};
        z = {uniform(4, 7, 39)};
      }
      w.decoder = uniform(9, z.back().rows(), 40);
      const double ref = reference_objective(w, z, x, xh, o);
      EXPECT_NEAR(objective_value(w, z, x, xh, o), ref, 1e-12 * ref);
    }
}

TEST(Weights, SaveLoadRoundTrip) {
  const Eigen::MatrixXd x = uniform(20, 10, 41);
  TrainOptions o = linear_options(2);
  o.activation.kind = ActivationKind::Tanh;
  const AutoencoderWeights w = train_stacked_sdae(x, x, {8, 5, 3}, o).weights;
  const auto path = std::filesystem::temp_directory_path() / "rdae_test_weights.rdaew";
  save_weights(w, path);
  const AutoencoderWeights back = load_weights(path);
  EXPECT_EQ(back.variant, w.variant);
  EXPECT_EQ(back.activation.kind, w.activation.kind);
  ASSERT_EQ(back.encoders.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_TRUE(back.encoders[k] == w.encoders[k]);
  EXPECT_TRUE(back.decoder == w.decoder);
  std::filesystem::resize_file(path, 40);
  EXPECT_THROW(load_weights(path), FormatError);
  std::filesystem::remove(path);
}
