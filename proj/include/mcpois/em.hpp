#ifndef MCPOIS_EM_HPP
#define MCPOIS_EM_HPP

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "mcpois/types.hpp"

namespace mcpois {

enum class InitStrategy { Zeros, CompleteCase };
enum class SeparationPolicy { FallbackNaive, Error };

struct EmConfig {
  InitStrategy init_strategy = InitStrategy::CompleteCase;
  double tolerance = 0.001;
  int max_iterations = 1000;
  SeparationPolicy separation_policy = SeparationPolicy::FallbackNaive;
};

// Posterior weights (phi0, phi1) per observation; queried rows are exact 0/1.
using PhiVector = std::vector<std::pair<double, double>>;

struct MleFitResult {
  OutcomeModelParams beta_hat;
  MisclassModelParams eta_hat;
  std::vector<double> loglik_trace;
  bool converged = false;
  int iterations = 0;
  bool fallback_used = false;
  // Joint (beta, eta) covariance for a converged EM fit; beta-block only
  // (model-based naive covariance) when fallback_used.
  Eigen::MatrixXd covariance;
};

std::pair<OutcomeModelParams, MisclassModelParams> complete_case_init(
    const Dataset& data, const DesignSpec& design);

PhiVector e_step(const Dataset& data, const OutcomeModelParams& beta,
                 const MisclassModelParams& eta);

std::pair<OutcomeModelParams, MisclassModelParams> m_step(
    const Dataset& data, const PhiVector& phi, const DesignSpec& design);

double observed_data_loglik(const Dataset& data, const OutcomeModelParams& beta,
                            const MisclassModelParams& eta);

MleFitResult fit_mle(const Dataset& data, const DesignSpec& design,
                     const EmConfig& config = {});

}  // namespace mcpois

#endif
