#ifndef MCPOIS_KERNELS_HPP
#define MCPOIS_KERNELS_HPP

#include "mcpois/types.hpp"

namespace mcpois {

// log Pr(Y = y | x, z) under the Poisson outcome model with log-offset,
// including the log(y!) normalizing term.
double poisson_log_density(std::int64_t y, double offset, double x,
                           const std::vector<double>& z,
                           const OutcomeModelParams& beta);

// Pr(X = x | X* = xstar, z). One-sided mode with xstar = 0 returns the
// structural indicator I(x = 0) exactly.
double misclass_prob(int x, int xstar, const std::vector<double>& z,
                     const MisclassModelParams& eta);

// log of the above; -inf only at the one-sided structural zero.
double log_misclass_prob(int x, int xstar, const std::vector<double>& z,
                         const MisclassModelParams& eta);

}  // namespace mcpois

#endif
