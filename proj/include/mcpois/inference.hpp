#ifndef MCPOIS_INFERENCE_HPP
#define MCPOIS_INFERENCE_HPP

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <utility>

#include "mcpois/types.hpp"

namespace mcpois {

struct CovarianceResult {
  Eigen::MatrixXd covariance;
  Eigen::VectorXd se;
  bool hessian_ok = false;  // negative definite at the reported maximum
};

struct PrSummary {
  std::string label;
  double estimate = 0.0;  // exponentiated
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// Central-difference Hessian of f at theta, symmetrized as (H + H')/2,
// with per-coordinate step eps^(1/3) * max(|theta_j|, 1).
Eigen::MatrixXd numerical_hessian(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& theta);

// Hessian of the observed-data log-likelihood over the stacked (beta, eta)
// vector, evaluated at a converged MLE.
Eigen::MatrixXd numerical_hessian(const Dataset& data, const DesignSpec& design,
                                  const Eigen::VectorXd& theta_hat);

// Covariance = (-H)^(-1).
CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian);

double normal_quantile(double p);

std::pair<double, double> wald_ci(double estimate, double se, double level = 0.95);

// sqrt(c' Sigma c)
double linear_combo_se(const Eigen::MatrixXd& covariance,
                       const Eigen::VectorXd& contrast);

// exp-scale summary of a linear combination of coefficients
PrSummary pr_summary(const std::string& label, const Eigen::VectorXd& estimates,
                     const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& contrast, double level = 0.95);

}  // namespace mcpois

#endif
