#pragma once

#include <optional>
#include <vector>

#include <Eigen/Core>

namespace rdae {

enum class StepSizeMode { Auto, Explicit };

struct IstaOptions {
  int max_iterations = 200;
  double relative_tolerance = 1e-4;
  StepSizeMode step_size_mode = StepSizeMode::Auto;
  // Gradient step 1/L when step_size_mode is Explicit.
  double explicit_step = 0.0;

  void validate() const;
};

struct IstaResult {
  Eigen::MatrixXd codes;
  int iterations = 0;
  // Objective after each iteration, preceded by the objective of the start point.
  std::vector<double> objective;
};

// Elementwise sign(v) * max(|v| - threshold, 0).
Eigen::MatrixXd soft_threshold(const Eigen::MatrixXd& values, double threshold);

// Default ridge used when none is supplied: 1e-8 * trace(A A^T) / rows(A).
double default_ridge(const Eigen::MatrixXd& design);

// W = B A^T (A A^T + ridge I)^{-1}, the minimizer of ||B - W A||_F^2 + ridge ||W||_F^2.
// The smaller of the two Gram systems is factored, so wide and tall designs
// both cost O(min(rows, cols)^3). With ridge == 0 the minimum-norm solution
// is returned. Passing std::nullopt selects default_ridge(A).
Eigen::MatrixXd solve_least_squares(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target,
                                    std::optional<double> ridge = std::nullopt);

// Factored form of solve_least_squares for repeated solves against one design
// (the encoder input X^ never changes during training).
class LeastSquaresSolver {
 public:
  LeastSquaresSolver(const Eigen::MatrixXd& design, std::optional<double> ridge = std::nullopt);

  Eigen::MatrixXd solve(const Eigen::MatrixXd& target) const;
  double ridge() const { return ridge_; }

 private:
  Eigen::MatrixXd design_;
  Eigen::MatrixXd gram_inverse_;
  double ridge_ = 0.0;
  bool row_gram_ = true;  // true: factored A A^T, false: A^T A
};

// Upper bound on the largest eigenvalue of A^T A by power iteration (1e-6
// relative) inflated by 1.01. A zero matrix yields a tiny positive floor.
double lipschitz_bound(const Eigen::MatrixXd& design);
// Same bound computed from a symmetric positive semidefinite Gram matrix.
double lipschitz_bound_gram(const Eigen::MatrixXd& gram);

// ||Y - D Z||_F^2 + mu ||Z||_1
double lasso_objective(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target,
                       const Eigen::MatrixXd& codes, double mu);

// Minimizes ||Y - D Z||_F^2 + mu ||Z||_1 by iterative soft thresholding,
// starting from `initial`. Each step is
//   Z <- soft_threshold(Z + (1/L) D^T (Y - D Z), mu / (2 L)).
IstaResult ista_solve(const Eigen::MatrixXd& design, const Eigen::MatrixXd& target, double mu,
                      const Eigen::MatrixXd& initial, const IstaOptions& options = {});

// Gram form of ista_solve for callers that already hold D^T D and D^T Y
// (the stacked autoencoder designs never need D itself). `target_energy` is
// ||Y||_F^2 and only shifts the reported objective.
IstaResult ista_solve_gram(const Eigen::MatrixXd& gram, const Eigen::MatrixXd& correlation,
                           double target_energy, double mu, const Eigen::MatrixXd& initial,
                           const IstaOptions& options = {});

}  // namespace rdae
