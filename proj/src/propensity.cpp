#include "bmw/propensity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bmw/errors.hpp"

namespace bmw {

namespace {

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

Eigen::VectorXd clamped_probs(const Eigen::MatrixXd& X, const Eigen::VectorXd& theta,
                              double clamp) {
  const Eigen::Index n = X.rows();
  Eigen::VectorXd z = Eigen::VectorXd::Constant(n, theta[0]);
  if (X.cols() > 0) z += X * theta.tail(X.cols());
  Eigen::VectorXd p(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    p[i] = std::clamp(logistic(z[i]), clamp, 1.0 - clamp);
  }
  return p;
}

double objective(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                 const Eigen::VectorXd& theta, double lambda, double clamp) {
  Eigen::VectorXd p = clamped_probs(X, theta, clamp);
  double ll = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    ll += y[i] * std::log(p[i]) + (1.0 - y[i]) * std::log(1.0 - p[i]);
  }
  if (X.cols() > 0) ll -= 0.5 * lambda * theta.tail(X.cols()).squaredNorm();
  return ll;
}

Eigen::VectorXd gradient(const Eigen::MatrixXd& X, const Eigen::VectorXd& y,
                         const Eigen::VectorXd& theta, double lambda, double clamp) {
  Eigen::VectorXd p = clamped_probs(X, theta, clamp);
  Eigen::VectorXd resid = y - p;
  Eigen::VectorXd g(theta.size());
  g[0] = resid.sum();
  if (X.cols() > 0) {
    g.tail(X.cols()) = X.transpose() * resid - lambda * theta.tail(X.cols());
  }
  return g;
}

Eigen::VectorXd labels_to_vector(const std::vector<int>& labels) {
  Eigen::VectorXd y(static_cast<Eigen::Index>(labels.size()));
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] != 0 && labels[i] != 1)
      throw std::invalid_argument("labels must be 0 or 1");
    y[static_cast<Eigen::Index>(i)] = labels[i];
  }
  return y;
}

}  // namespace

double penalized_log_likelihood(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                double intercept, const Eigen::VectorXd& beta,
                                double lambda, double clamp) {
  Eigen::VectorXd theta(beta.size() + 1);
  theta[0] = intercept;
  theta.tail(beta.size()) = beta;
  return objective(X, labels_to_vector(labels), theta, lambda, clamp);
}

Eigen::VectorXd penalized_gradient(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                                   double intercept, const Eigen::VectorXd& beta,
                                   double lambda, double clamp) {
  Eigen::VectorXd theta(beta.size() + 1);
  theta[0] = intercept;
  theta.tail(beta.size()) = beta;
  return gradient(X, labels_to_vector(labels), theta, lambda, clamp);
}

PropensityFit fit_logistic(const Eigen::MatrixXd& X, const std::vector<int>& labels,
                           const FitConfig& config) {
  const Eigen::Index n = X.rows();
  const Eigen::Index p = X.cols();
  if (static_cast<Eigen::Index>(labels.size()) != n)
    throw std::invalid_argument("label count does not match feature rows");
  Eigen::VectorXd y = labels_to_vector(labels);
  int ones = static_cast<int>(y.sum());
  if (2 * ones != static_cast<int>(n))
    throw std::invalid_argument("labels must be balanced (N/2 per group)");

  double lambda = config.ridge_lambda;
  const double clamp = config.prob_clamp;

  Eigen::VectorXd theta = Eigen::VectorXd::Zero(p + 1);
  double ll = objective(X, y, theta, lambda, clamp);

  PropensityFit fit;
  fit.iterations = 0;

  for (int iter = 0; iter < config.max_iterations; ++iter) {
    Eigen::VectorXd g = gradient(X, y, theta, lambda, clamp);
    if (g.norm() <= config.gradient_tol) break;
    fit.iterations = iter + 1;

    Eigen::VectorXd probs = clamped_probs(X, theta, clamp);
    Eigen::VectorXd w = probs.array() * (1.0 - probs.array());

    // Newton system: (Z' W Z + ridge) d = g, Z = [1 | X], ridge skips the
    // intercept. Escalate the ridge when the solve degenerates.
    Eigen::VectorXd step;
    for (;;) {
      Eigen::MatrixXd H(p + 1, p + 1);
      double wsum = w.sum();
      H(0, 0) = wsum;
      if (p > 0) {
        Eigen::VectorXd xw = X.transpose() * w;
        H.block(1, 0, p, 1) = xw;
        H.block(0, 1, 1, p) = xw.transpose();
        H.block(1, 1, p, p) = X.transpose() * w.asDiagonal() * X;
        H.block(1, 1, p, p).diagonal().array() += lambda;
      }
      Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
      if (ldlt.info() == Eigen::Success) {
        step = ldlt.solve(g);
        if (step.allFinite()) break;
      }
      lambda *= 10.0;
      if (lambda > config.ridge_cap)
        throw NumericError("logistic fit: weighted system singular beyond ridge cap");
      g = gradient(X, y, theta, lambda, clamp);  // penalty changed with lambda
      ll = objective(X, y, theta, lambda, clamp);
    }

    // Step halving keeps the objective non-decreasing even under
    // quasi-separation.
    double t = 1.0;
    double new_ll = objective(X, y, theta + t * step, lambda, clamp);
    int halvings = 0;
    while (new_ll < ll && halvings < 60) {
      t *= 0.5;
      new_ll = objective(X, y, theta + t * step, lambda, clamp);
      ++halvings;
    }
    if (new_ll < ll) break;  // no ascent direction left at double precision
    theta += t * step;
    ll = new_ll;
  }

  Eigen::VectorXd g = gradient(X, y, theta, lambda, clamp);
  fit.final_gradient_norm = g.norm();
  fit.converged = fit.final_gradient_norm <= config.gradient_tol;
  fit.intercept = theta[0];
  fit.coefficients = theta.tail(p);
  fit.ridge_lambda = lambda;

  Eigen::VectorXd probs = clamped_probs(X, theta, clamp);
  fit.scores.assign(probs.data(), probs.data() + probs.size());
  return fit;
}

std::vector<double> predict_scores(const PropensityFit& fit, const Eigen::MatrixXd& X) {
  if (X.cols() != fit.coefficients.size())
    throw std::invalid_argument("feature column count does not match fitted coefficients");
  Eigen::VectorXd theta(fit.coefficients.size() + 1);
  theta[0] = fit.intercept;
  theta.tail(fit.coefficients.size()) = fit.coefficients;
  Eigen::VectorXd p = clamped_probs(X, theta, 1e-12);
  return std::vector<double>(p.data(), p.data() + p.size());
}

}  // namespace bmw
