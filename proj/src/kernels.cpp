#include "mcpois/kernels.hpp"

#include <cmath>

#include "mcpois/errors.hpp"
#include "mcpois/numeric.hpp"

namespace mcpois {

double poisson_log_density(std::int64_t y, double offset, double x,
                           const std::vector<double>& z,
                           const OutcomeModelParams& beta) {
  const double lp = std::log(offset) + beta.linear_predictor(x, z);
  if (!std::isfinite(lp))
    throw ValidationError("poisson_log_density: non-finite linear predictor (y=" +
                          std::to_string(y) + ", offset=" + std::to_string(offset) + ")");
  const double yd = static_cast<double>(y);
  return yd * lp - std::exp(lp) - std::lgamma(yd + 1.0);
}

double misclass_prob(int x, int xstar, const std::vector<double>& z,
                     const MisclassModelParams& eta) {
  if (eta.mode == MisclassMode::OneSided && xstar == 0)
    return x == 0 ? 1.0 : 0.0;
  const double t = eta.eta.dot(eta.row(xstar, z));
  const double p1 = logistic(t);
  // complement via subtraction so the two probabilities sum to exactly 1
  return x == 1 ? p1 : 1.0 - p1;
}

double log_misclass_prob(int x, int xstar, const std::vector<double>& z,
                         const MisclassModelParams& eta) {
  if (eta.mode == MisclassMode::OneSided && xstar == 0)
    return x == 0 ? 0.0 : kNegInf;
  const double t = eta.eta.dot(eta.row(xstar, z));
  return x == 1 ? log_logistic(t) : log_logistic(-t);
}

}  // namespace mcpois
