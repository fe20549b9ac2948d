#include "mcpois/em.hpp"

#include <cassert>
#include <cmath>

#include "mcpois/comparators.hpp"
#include "mcpois/errors.hpp"
#include "mcpois/glm.hpp"
#include "mcpois/kernels.hpp"
#include "mcpois/numeric.hpp"

namespace mcpois {

namespace {

// Rows feeding the misclassification-model fit. One-sided: only X*=1 rows
// inform eta; two-sided: every row, with X* as a regressor.
bool informs_eta(const Observation& o, MisclassMode mode) {
  return mode == MisclassMode::TwoSided || o.xstar == 1;
}

std::vector<WeightedRow> eta_rows_queried(const Dataset& data) {
  MisclassModelParams probe;
  probe.mode = data.misclass_mode;
  std::vector<WeightedRow> rows;
  for (const auto& o : data.observations) {
    if (!o.queried || !informs_eta(o, data.misclass_mode)) continue;
    rows.push_back({static_cast<double>(*o.x), 1.0, probe.row(o.xstar, o.z), 0.0});
  }
  return rows;
}

MleFitResult naive_fallback(const Dataset& data, const DesignSpec& design) {
  ComparatorFit naive = fit_naive(data, design);
  MleFitResult result;
  result.beta_hat = {naive.beta_hat, design};
  result.eta_hat.mode = data.misclass_mode;
  result.eta_hat.eta = Eigen::VectorXd::Zero(
      MisclassModelParams::dimension(data.misclass_mode, data.n_covariates()));
  result.converged = true;
  result.fallback_used = true;
  result.covariance = naive.covariance;
  return result;
}

struct ExpandedRows {
  // Poisson: queried rows contribute one weight-1 row at observed x;
  // unqueried rows contribute an x=0 and an x=1 row weighted by phi.
  std::vector<WeightedRow> poisson;
  std::vector<std::pair<int, int>> poisson_src;  // (obs index, x)
  std::vector<WeightedRow> logistic;
  std::vector<std::pair<int, int>> logistic_src;
};

ExpandedRows build_expanded(const Dataset& data, const DesignSpec& design) {
  MisclassModelParams probe;
  probe.mode = data.misclass_mode;
  ExpandedRows out;
  for (int i = 0; i < static_cast<int>(data.observations.size()); ++i) {
    const auto& o = data.observations[i];
    const double y = static_cast<double>(o.y);
    const double lo = std::log(o.offset);
    if (o.queried) {
      out.poisson.push_back({y, 1.0, design.row(*o.x, o.z), lo});
      out.poisson_src.emplace_back(i, *o.x);
    } else {
      out.poisson.push_back({y, 0.0, design.row(0.0, o.z), lo});
      out.poisson_src.emplace_back(i, 0);
      out.poisson.push_back({y, 0.0, design.row(1.0, o.z), lo});
      out.poisson_src.emplace_back(i, 1);
    }
    if (!informs_eta(o, data.misclass_mode)) continue;
    const Eigen::VectorXd er = probe.row(o.xstar, o.z);
    if (o.queried) {
      out.logistic.push_back({static_cast<double>(*o.x), 1.0, er, 0.0});
      out.logistic_src.emplace_back(i, *o.x);
    } else {
      out.logistic.push_back({0.0, 0.0, er, 0.0});
      out.logistic_src.emplace_back(i, 0);
      out.logistic.push_back({1.0, 0.0, er, 0.0});
      out.logistic_src.emplace_back(i, 1);
    }
  }
  return out;
}

void refresh_weights(ExpandedRows& rows, const PhiVector& phi) {
  for (std::size_t r = 0; r < rows.poisson.size(); ++r) {
    const auto [i, x] = rows.poisson_src[r];
    rows.poisson[r].weight = x == 0 ? phi[i].first : phi[i].second;
  }
  for (std::size_t r = 0; r < rows.logistic.size(); ++r) {
    const auto [i, x] = rows.logistic_src[r];
    rows.logistic[r].weight = x == 0 ? phi[i].first : phi[i].second;
  }
}

}  // namespace

std::pair<OutcomeModelParams, MisclassModelParams> complete_case_init(
    const Dataset& data, const DesignSpec& design) {
  std::vector<WeightedRow> prow;
  for (const auto& o : data.observations) {
    if (!o.queried) continue;
    prow.push_back({static_cast<double>(o.y), 1.0, design.row(*o.x, o.z),
                    std::log(o.offset)});
  }
  GlmFit pf = fit_weighted_poisson(prow);
  GlmFit lf = fit_weighted_logistic(eta_rows_queried(data));

  OutcomeModelParams beta{pf.coefficients, design};
  MisclassModelParams eta;
  eta.mode = data.misclass_mode;
  eta.eta = lf.coefficients;
  return {beta, eta};
}

PhiVector e_step(const Dataset& data, const OutcomeModelParams& beta,
                 const MisclassModelParams& eta) {
  PhiVector phi(data.observations.size());
  for (std::size_t i = 0; i < data.observations.size(); ++i) {
    const auto& o = data.observations[i];
    if (o.queried) {
      phi[i] = {*o.x == 0 ? 1.0 : 0.0, *o.x == 1 ? 1.0 : 0.0};
      continue;
    }
    const double l0 = poisson_log_density(o.y, o.offset, 0.0, o.z, beta) +
                      log_misclass_prob(0, o.xstar, o.z, eta);
    const double l1m = log_misclass_prob(1, o.xstar, o.z, eta);
    if (l1m == kNegInf) {  // one-sided structural zero
      phi[i] = {1.0, 0.0};
      continue;
    }
    const double l1 = poisson_log_density(o.y, o.offset, 1.0, o.z, beta) + l1m;
    const double denom = log_sum_exp(l0, l1);
    if (denom == kNegInf)
      throw ValidationError("e_step: both joint densities vanished at observation " + o.id);
    const double p1 = std::exp(l1 - denom);
    phi[i] = {1.0 - p1, p1};
  }
  return phi;
}

std::pair<OutcomeModelParams, MisclassModelParams> m_step(
    const Dataset& data, const PhiVector& phi, const DesignSpec& design) {
  ExpandedRows rows = build_expanded(data, design);
  refresh_weights(rows, phi);
  GlmFit pf = fit_weighted_poisson(rows.poisson);
  GlmFit lf = fit_weighted_logistic(rows.logistic);
  MisclassModelParams eta;
  eta.mode = data.misclass_mode;
  eta.eta = lf.coefficients;
  return {{pf.coefficients, design}, eta};
}

double observed_data_loglik(const Dataset& data, const OutcomeModelParams& beta,
                            const MisclassModelParams& eta) {
  double ll = 0.0;
  for (const auto& o : data.observations) {
    if (o.queried) {
      const double lm = log_misclass_prob(*o.x, o.xstar, o.z, eta);
      if (lm == kNegInf)
        throw ValidationError("observation " + o.id +
                              ": queried x=1 with xstar=0 violates one-sided structure");
      ll += poisson_log_density(o.y, o.offset, *o.x, o.z, beta) + lm;
    } else {
      const double lm1 = log_misclass_prob(1, o.xstar, o.z, eta);
      const double l0 = poisson_log_density(o.y, o.offset, 0.0, o.z, beta) +
                        log_misclass_prob(0, o.xstar, o.z, eta);
      if (lm1 == kNegInf) {
        ll += l0;
      } else {
        const double l1 = poisson_log_density(o.y, o.offset, 1.0, o.z, beta) + lm1;
        ll += log_sum_exp(l0, l1);
      }
    }
  }
  return ll;
}

MleFitResult fit_mle(const Dataset& data, const DesignSpec& design,
                     const EmConfig& config) {
  data.validate();

  // Known small-sample failure mode: perfect separation in the queried
  // misclassification model (e.g. 100% PPV in the queried subset).
  if (detect_separation(eta_rows_queried(data)) == Separation::Complete) {
    if (config.separation_policy == SeparationPolicy::Error)
      throw SeparationError("complete separation in queried misclassification model");
    return naive_fallback(data, design);
  }

  OutcomeModelParams beta;
  MisclassModelParams eta;
  eta.mode = data.misclass_mode;
  if (config.init_strategy == InitStrategy::CompleteCase) {
    try {
      std::tie(beta, eta) = complete_case_init(data, design);
    } catch (const SeparationError&) {
      if (config.separation_policy == SeparationPolicy::Error) throw;
      return naive_fallback(data, design);
    }
  } else {
    beta.design = design;
    beta.beta = Eigen::VectorXd::Zero(design.dimension());
    eta.eta = Eigen::VectorXd::Zero(
        MisclassModelParams::dimension(data.misclass_mode, data.n_covariates()));
  }

  ExpandedRows rows = build_expanded(data, design);

  MleFitResult result;
  result.loglik_trace.reserve(64);
  double prev_ll = kNegInf;
  for (int iter = 1; iter <= config.max_iterations; ++iter) {
    PhiVector phi = e_step(data, beta, eta);
    refresh_weights(rows, phi);

    OutcomeModelParams beta_new;
    MisclassModelParams eta_new;
    eta_new.mode = data.misclass_mode;
    try {
      GlmFit pf = fit_weighted_poisson(rows.poisson, beta.beta);
      GlmFit lf = fit_weighted_logistic(rows.logistic, eta.eta);
      beta_new = {pf.coefficients, design};
      eta_new.eta = lf.coefficients;
    } catch (const SeparationError&) {
      if (config.separation_policy == SeparationPolicy::Error) throw;
      return naive_fallback(data, design);
    }

    const double ll = observed_data_loglik(data, beta_new, eta_new);
    result.loglik_trace.push_back(ll);
    result.iterations = iter;

    const double change =
        std::max((beta_new.beta - beta.beta).cwiseAbs().maxCoeff(),
                 (eta_new.eta - eta.eta).cwiseAbs().maxCoeff());
    beta = beta_new;
    eta = eta_new;
    if (change < config.tolerance && iter > 1 && std::abs(ll - prev_ll) < 1e-8) {
      result.converged = true;
      break;
    }
    prev_ll = ll;
  }

  result.beta_hat = beta;
  result.eta_hat = eta;
  return result;
}

}  // namespace mcpois
