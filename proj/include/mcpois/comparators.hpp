#ifndef MCPOIS_COMPARATORS_HPP
#define MCPOIS_COMPARATORS_HPP

#include <Eigen/Dense>

#include "mcpois/types.hpp"

namespace mcpois {

enum class ComparatorMethod { Gold, Naive, CompleteCase };

struct ComparatorFit {
  ComparatorMethod method;
  Eigen::VectorXd beta_hat;
  Eigen::MatrixXd covariance;  // model-based, from the GLM information matrix
  Eigen::VectorXd se;
  int n_used = 0;
  double loglik = 0.0;
};

// Poisson fit with true X on every row; requires x present everywhere.
ComparatorFit fit_gold(const Dataset& data, const DesignSpec& design);

// Poisson fit substituting X* for X throughout the design.
ComparatorFit fit_naive(const Dataset& data, const DesignSpec& design);

// Poisson fit on the queried rows only.
ComparatorFit fit_complete_case(const Dataset& data, const DesignSpec& design);

}  // namespace mcpois

#endif
