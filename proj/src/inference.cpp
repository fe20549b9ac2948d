#include "mcpois/inference.hpp"

#include <cmath>
#include <limits>

#include "mcpois/em.hpp"
#include "mcpois/errors.hpp"

namespace mcpois {

Eigen::MatrixXd numerical_hessian(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& theta) {
  const int p = static_cast<int>(theta.size());
  const double cbrt_eps = std::cbrt(std::numeric_limits<double>::epsilon());
  Eigen::VectorXd h(p);
  for (int j = 0; j < p; ++j) h(j) = cbrt_eps * std::max(std::abs(theta(j)), 1.0);

  Eigen::MatrixXd hess(p, p);
  const double f0 = f(theta);
  for (int i = 0; i < p; ++i) {
    Eigen::VectorXd t = theta;
    t(i) = theta(i) + h(i);
    const double fp = f(t);
    t(i) = theta(i) - h(i);
    const double fm = f(t);
    hess(i, i) = (fp - 2.0 * f0 + fm) / (h(i) * h(i));
    for (int j = i + 1; j < p; ++j) {
      Eigen::VectorXd u = theta;
      u(i) += h(i);
      u(j) += h(j);
      const double fpp = f(u);
      u(j) = theta(j) - h(j);
      const double fpm = f(u);
      u(i) = theta(i) - h(i);
      u(j) = theta(j) + h(j);
      const double fmp = f(u);
      u(j) = theta(j) - h(j);
      const double fmm = f(u);
      hess(i, j) = hess(j, i) = (fpp - fpm - fmp + fmm) / (4.0 * h(i) * h(j));
    }
  }
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (!std::isfinite(hess(i, j)))
        throw ValidationError("numerical_hessian: non-finite entry at (" +
                              std::to_string(i) + "," + std::to_string(j) + ")");
  return 0.5 * (hess + hess.transpose());
}

Eigen::MatrixXd numerical_hessian(const Dataset& data, const DesignSpec& design,
                                  const Eigen::VectorXd& theta_hat) {
  const int pb = design.dimension();
  const int pe =
      MisclassModelParams::dimension(data.misclass_mode, data.n_covariates());
  if (theta_hat.size() != pb + pe)
    throw ValidationError("numerical_hessian: parameter vector has wrong length");
  auto f = [&](const Eigen::VectorXd& theta) {
    OutcomeModelParams beta{theta.head(pb), design};
    MisclassModelParams eta;
    eta.mode = data.misclass_mode;
    eta.eta = theta.tail(pe);
    return observed_data_loglik(data, beta, eta);
  };
  return numerical_hessian(f, theta_hat);
}

CovarianceResult covariance_from_hessian(const Eigen::MatrixXd& hessian) {
  CovarianceResult result;
  const Eigen::MatrixXd neg = -hessian;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(neg);
  result.hessian_ok = es.eigenvalues().minCoeff() > 0.0;
  result.covariance =
      neg.ldlt().solve(Eigen::MatrixXd::Identity(neg.rows(), neg.cols()));
  result.covariance = 0.5 * (result.covariance + result.covariance.transpose());
  result.se = result.covariance.diagonal().cwiseMax(0.0).cwiseSqrt();
  return result;
}

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0))
    throw ValidationError("normal_quantile: p must lie in (0,1)");
  // Newton on Phi(z) = p from a crude start; Phi and phi via erfc
  double z = p > 0.5 ? 1.0 : -1.0;
  for (int k = 0; k < 60; ++k) {
    const double cdf = 0.5 * std::erfc(-z / std::sqrt(2.0));
    const double pdf = std::exp(-0.5 * z * z) / std::sqrt(2.0 * M_PI);
    const double step = (cdf - p) / pdf;
    z -= step;
    if (std::abs(step) < 1e-14) break;
  }
  return z;
}

std::pair<double, double> wald_ci(double estimate, double se, double level) {
  if (!(se > 0.0)) throw ValidationError("wald_ci: se must be positive");
  const double z = normal_quantile(0.5 + level / 2.0);
  return {estimate - z * se, estimate + z * se};
}

double linear_combo_se(const Eigen::MatrixXd& covariance,
                       const Eigen::VectorXd& contrast) {
  if (contrast.size() != covariance.rows())
    throw ValidationError("linear_combo_se: contrast dimension mismatch");
  const double quad = contrast.dot(covariance * contrast);
  if (quad < 0.0)
    throw ValidationError("linear_combo_se: negative quadratic form; covariance invalid");
  return std::sqrt(quad);
}

PrSummary pr_summary(const std::string& label, const Eigen::VectorXd& estimates,
                     const Eigen::MatrixXd& covariance,
                     const Eigen::VectorXd& contrast, double level) {
  const double est = contrast.dot(estimates);
  const double se = linear_combo_se(covariance, contrast);
  auto [lo, hi] = wald_ci(est, se, level);
  return {label, std::exp(est), std::exp(lo), std::exp(hi)};
}

}  // namespace mcpois
