#pragma once

#include <vector>

#include <Eigen/Dense>

namespace bmw {

struct FitConfig {
  double ridge_lambda = 1e-6;  // L2 penalty on coefficients (not intercept)
  int max_iterations = 100;
  double gradient_tol = 1e-8;
  double prob_clamp = 1e-12;  // scores kept inside [clamp, 1-clamp]
  double ridge_cap = 1e3;     // escalation limit for singular systems
};

struct PropensityFit {
  double intercept = 0.0;
  Eigen::VectorXd coefficients;  // one per retained feature column
  std::vector<double> scores;    // training scores, strictly inside (0,1)
  bool converged = false;
  int iterations = 0;
  double final_gradient_norm = 0.0;
  double ridge_lambda = 0.0;  // effective value, after any escalation
};

// Maximizes the penalized Bernoulli log-likelihood
//   l(b0, b) - (lambda/2) * |b|^2
// by iteratively reweighted least squares (Newton with step halving).
// Scores come from the logistic e^(b0 + b.x) / (1 + e^(b0 + b.x)).
// `labels` must be a balanced 0/1 vector of length X.rows(). A fit that runs
// out of iterations is returned with converged = false rather than thrown:
// inside the design loop a flagged repetition still records its distance.
// A singular weighted system escalates the ridge tenfold up to ridge_cap,
// then throws NumericError.
PropensityFit fit_logistic(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                           const FitConfig& config = {});

// Elementwise logistic of b0 + b.x, clamped. Throws on column mismatch.
std::vector<double> predict_scores(const PropensityFit& fit, const Eigen::MatrixXd& X);

// The objective and its analytic gradient ([0] = intercept component),
// exposed so diagnostics can cross-check the solver against finite
// differences.
double penalized_log_likelihood(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                double intercept, const Eigen::VectorXd& beta,
                                double lambda, double clamp = 1e-12);
Eigen::VectorXd penalized_gradient(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                   double intercept, const Eigen::VectorXd& beta,
                                   double lambda, double clamp = 1e-12);

}  // namespace bmw
