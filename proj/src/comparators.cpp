#include "mcpois/comparators.hpp"

#include <cmath>

#include "mcpois/errors.hpp"
#include "mcpois/glm.hpp"
#include "mcpois/kernels.hpp"

namespace mcpois {

namespace {

enum class ExposureSource { True, Surrogate };

ComparatorFit poisson_comparator(const Dataset& data, const DesignSpec& design,
                                 ComparatorMethod method, ExposureSource source,
                                 bool queried_only) {
  std::vector<WeightedRow> rows;
  rows.reserve(data.observations.size());
  for (const auto& o : data.observations) {
    if (queried_only && !o.queried) continue;
    double x;
    if (source == ExposureSource::True) {
      if (!o.x)
        throw ValidationError("observation " + o.id + ": true exposure missing");
      x = static_cast<double>(*o.x);
    } else {
      x = static_cast<double>(o.xstar);
    }
    rows.push_back({static_cast<double>(o.y), 1.0, design.row(x, o.z),
                    std::log(o.offset)});
  }
  GlmFit glm = fit_weighted_poisson(rows);

  ComparatorFit fit;
  fit.method = method;
  fit.beta_hat = glm.coefficients;
  fit.covariance = glm.info_matrix.ldlt().solve(
      Eigen::MatrixXd::Identity(glm.info_matrix.rows(), glm.info_matrix.cols()));
  fit.se = fit.covariance.diagonal().cwiseSqrt();
  fit.n_used = static_cast<int>(rows.size());

  OutcomeModelParams params{glm.coefficients, design};
  double ll = 0.0;
  std::size_t r = 0;
  for (const auto& o : data.observations) {
    if (queried_only && !o.queried) continue;
    ll += poisson_log_density(o.y, o.offset, rows[r++].design_row(1), o.z, params);
  }
  fit.loglik = ll;
  return fit;
}

}  // namespace

ComparatorFit fit_gold(const Dataset& data, const DesignSpec& design) {
  return poisson_comparator(data, design, ComparatorMethod::Gold,
                            ExposureSource::True, false);
}

ComparatorFit fit_naive(const Dataset& data, const DesignSpec& design) {
  return poisson_comparator(data, design, ComparatorMethod::Naive,
                            ExposureSource::Surrogate, false);
}

ComparatorFit fit_complete_case(const Dataset& data, const DesignSpec& design) {
  if (std::none_of(data.observations.begin(), data.observations.end(),
                   [](const Observation& o) { return o.queried; }))
    throw ValidationError("complete case: no queried observations");
  return poisson_comparator(data, design, ComparatorMethod::CompleteCase,
                            ExposureSource::True, true);
}

}  // namespace mcpois
