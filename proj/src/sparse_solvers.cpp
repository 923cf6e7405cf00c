#include "rdae/sparse_solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/QR>

#include "rdae/errors.hpp"
#include "rdae/rng.hpp"

namespace rdae {
namespace {

constexpr double kLipschitzFloor = 1e-12;
constexpr double kLipschitzInflation = 1.01;
constexpr double kPowerTolerance = 1e-6;
constexpr int kPowerMaxIterations = 20000;

void require_finite(const Eigen::MatrixXd& m, const char* what) {
  if (!m.allFinite()) throw DomainError(std::string(what) + " contains non-finite entries");
}

Eigen::MatrixXd inverse_spd(const Eigen::MatrixXd& gram, double ridge) {
  const Eigen::Index n = gram.rows();
  if (ridge > 0.0) {
    Eigen::MatrixXd shifted = gram;
    shifted.diagonal().array() += ridge;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) return llt.solve(Eigen::MatrixXd::Identity(n, n));
    Eigen::LDLT<Eigen::MatrixXd> ldlt(shifted);
    return ldlt.solve(Eigen::MatrixXd::Identity(n, n));
  }
  // Pseudo-inverse: gives the minimum-norm least-squares solution.
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(gram);
  return cod.pseudoInverse();
}

}  // namespace

void IstaOptions::validate() const {
  if (max_iterations < 1) throw InvalidConfig("ista: max_iterations must be >= 1");
  if (!(relative_tolerance > 0.0)) throw InvalidConfig("ista: relative_tolerance must be > 0");
  if (step_size_mode == StepSizeMode::Explicit && !(explicit_step > 0.0))
    throw InvalidConfig("ista: explicit_step must be > 0");
}

Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& values, double threshold) {
  if (!(threshold >= 0.0)) throw DomainError("soft_threshold: threshold must be >= 0");
  return values.unaryExpr([threshold](double v) {
    const double shrunk = std::abs(v) - threshold;
    return shrunk > 0.0 ? std::copysign(shrunk, v) : 0.0;
  });
}

double default_ridge(const Eigen::MatrixXd& design) {
  if (design.rows() == 0) return 0.0;
  return 1e-8 * design.squaredNorm() / static_cast<double>(design.rows());
}

LeastSquaresSolver::LeastSquaresSolver(const Eigen::MatrixXd& design, std::optional<double> ridge)
    : design_(design) {
  require_finite(design, "least squares design");
  ridge_ = ridge.value_or(default_ridge(design));
  if (!(ridge_ >= 0.0) || !std::isfinite(ridge_))
    throw DomainError("least squares: ridge must be finite and >= 0");
  row_gram_ = design.rows() <= design.cols();
  const Eigen::MatrixXd gram =
      row_gram_ ? Eigen::MatrixXd(design * design.transpose())
                : Eigen::MatrixXd(design.transpose() * design);
  gram_inverse_ = inverse_spd(gram, ridge_);
}

Eigen::MatrixXd LeastSquaresSolver::solve(const Eigen::MatrixXd& target) const {
  if (target.cols() != design_.cols())
    throw InvalidConfig("least squares: design and target column counts differ (" +
                        std::to_string(design_.cols()) + " vs " + std::to_string(target.cols()) +
                        ")");
  require_finite(target, "least squares target");
  if (row_gram_) {
    // W = (B A^T) (A A^T + eps I)^{-1}
    return (target * design_.transpose()) * gram_inverse_;
  }
  // Push-through identity: A^T (A A^T + eps I)^{-1} = (A^T A + eps I)^{-1} A^T.
  return (target * gram_inverse_) * design_.transpose();
}

Eigen::MatrixXd solve_least_squares(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target,
                                    std::optional<double> ridge) {
  if (target.cols() != design.cols())
    throw InvalidConfig("least squares: design and target column counts differ");
  return LeastSquaresSolver(design, ridge).solve(target);
}

double lipschitz_bound_gram(const Eigen::MatrixXd& gram) {
  const Eigen::Index n = gram.rows();
  if (n == 0 || gram.cwiseAbs().maxCoeff() == 0.0) return kLipschitzFloor;

  // Fixed pseudo-random start so the bound is a pure function of the matrix.
  Rng rng(0x5eedULL);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = 1.0 + 0.1 * rng.normal();
  v.normalize();

  double estimate = 0.0;
  for (int it = 0; it < kPowerMaxIterations; ++it) {
    Eigen::VectorXd w = gram * v;
    const double rayleigh = v.dot(w);
    const double norm = w.norm();
    if (norm == 0.0) break;
    v = w / norm;
    if (it > 0 && std::abs(rayleigh - estimate) <= kPowerTolerance * std::abs(rayleigh)) {
      estimate = rayleigh;
      break;
    }
    estimate = rayleigh;
  }
  return std::max(estimate * kLipschitzInflation, kLipschitzFloor);
}

double lipschitz_bound(const Eigen::MatrixXd& design) {
  require_finite(design, "lipschitz design");
  if (design.size() == 0) return kLipschitzFloor;
  // A^T A and A A^T share their nonzero spectrum; use the smaller one.
  if (design.cols() <= design.rows())
    return lipschitz_bound_gram(design.transpose() * design);
  return lipschitz_bound_gram(design * design.transpose());
}

double lasso_objective(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target,
                       const Eigen::MatrixXd& codes, double mu) {
  return (target - design * codes).squaredNorm() + mu * codes.cwiseAbs().sum();
}

IstaResult ista_solve_gram(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& correlation,
                           double target_energy, double mu, const Eigen::MatrixXd& initial,
                           const IstaOptions& options) {
  options.validate();
  if (!(mu >= 0.0) || !std::isfinite(mu)) throw DomainError("ista: mu must be finite and >= 0");
  if (gram.rows() != gram.cols() || gram.rows() != correlation.rows())
    throw InvalidConfig("ista: gram / correlation shape mismatch");
  if (initial.rows() != gram.rows() || initial.cols() != correlation.cols())
    throw InvalidConfig("ista: initial codes shape mismatch");
  require_finite(gram, "ista gram");
  require_finite(correlation, "ista correlation");
  require_finite(initial, "ista initial codes");

  const double lipschitz = options.step_size_mode == StepSizeMode::Explicit
                               ? 1.0 / options.explicit_step
                               : lipschitz_bound_gram(gram);
  const double step = 1.0 / lipschitz;
  const double threshold = mu / (2.0 * lipschitz);

  IstaResult result;
  result.codes = initial;
  Eigen::MatrixXd gram_codes = gram * result.codes;
  auto objective = [&](const Eigen::MatrixXd& z, const Eigen::MatrixXd& gz) {
    return target_energy - 2.0 * (correlation.array() * z.array()).sum() +
           (z.array() * gz.array()).sum() + mu * z.cwiseAbs().sum();
  };
  double current = objective(result.codes, gram_codes);
  result.objective.push_back(current);

  for (int it = 0; it < options.max_iterations; ++it) {
    result.codes = soft_threshold(result.codes + step * (correlation - gram_codes), threshold);
    gram_codes.noalias() = gram * result.codes;
    const double next = objective(result.codes, gram_codes);
    result.objective.push_back(next);
    result.iterations = it + 1;
    const double scale = std::max(std::abs(current), std::numeric_limits<double>::min());
    const bool converged = std::abs(current - next) <= options.relative_tolerance * scale;
    current = next;
    if (converged) break;
  }
  return result;
}

IstaResult ista_solve(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target, double mu,
                      const Eigen::MatrixXd& initial, const IstaOptions& options) {
  if (design.rows() != target.rows())
    throw InvalidConfig("ista: design and target row counts differ");
  if (initial.rows() != design.cols() || initial.cols() != target.cols())
    throw InvalidConfig("ista: initial codes shape mismatch");
  require_finite(design, "ista design");
  require_finite(target, "ista target");
  const Eigen::MatrixXd gram = design.transpose() * design;
  const Eigen::MatrixXd correlation = design.transpose() * target;
  return ista_solve_gram(gram, correlation, target.squaredNorm(), mu, initial, options);
}

}  // namespace rdae
