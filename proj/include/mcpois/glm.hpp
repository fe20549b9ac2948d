#ifndef MCPOIS_GLM_HPP
#define MCPOIS_GLM_HPP

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace mcpois {

// Weights below this contribute nothing to the IRLS accumulation.
inline constexpr double kWeightFloor = 1e-12;

struct WeightedRow {
  double response = 0.0;   // count for Poisson, 0/1 for logistic
  double weight = 1.0;     // nonnegative
  Eigen::VectorXd design_row;
  double offset_log = 0.0; // Poisson only
};

struct GlmFit {
  Eigen::VectorXd coefficients;
  bool converged = false;
  int iterations = 0;
  double deviance = 0.0;
  Eigen::MatrixXd info_matrix;  // weighted Fisher information at the solution
};

enum class Separation { None, Complete, Quasi };

// Maximizes sum_i w_i [y_i eta_i - lambda_i], eta_i = offset_log_i + b'd_i.
GlmFit fit_weighted_poisson(const std::vector<WeightedRow>& rows,
                            std::optional<Eigen::VectorXd> init = std::nullopt);

// Maximizes sum_i w_i [y_i eta_i - log(1 + e^{eta_i})]. Throws SeparationError
// when the positively weighted responses are perfectly classifiable.
GlmFit fit_weighted_logistic(const std::vector<WeightedRow>& rows,
                             std::optional<Eigen::VectorXd> init = std::nullopt);

// Complete: some linear rule (all-identical responses, or a single-column
// threshold) perfectly classifies the positively weighted rows.
Separation detect_separation(const std::vector<WeightedRow>& rows);

}  // namespace mcpois

#endif
