#include "mcpois/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "mcpois/errors.hpp"
#include "mcpois/numeric.hpp"

namespace mcpois {

namespace {

constexpr int kMaxIter = 50;
constexpr int kMaxHalvings = 20;
constexpr double kDevTol = 1e-10;
constexpr double kCoefTol = 1e-10;

double softplus(double t) {
  return t > 0.0 ? t + std::log1p(std::exp(-t)) : std::log1p(std::exp(t));
}

void check_rank(const std::vector<WeightedRow>& rows, int p) {
  std::vector<int> active;
  for (int i = 0; i < static_cast<int>(rows.size()); ++i)
    if (rows[i].weight >= kWeightFloor) active.push_back(i);
  if (static_cast<int>(active.size()) < p)
    throw SingularDesignError("fewer positively weighted rows (" +
                              std::to_string(active.size()) + ") than parameters (" +
                              std::to_string(p) + ")");
  Eigen::MatrixXd a(active.size(), p);
  for (std::size_t r = 0; r < active.size(); ++r)
    a.row(r) = std::sqrt(rows[active[r]].weight) * rows[active[r]].design_row.transpose();
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  qr.setThreshold(1e-10);
  if (qr.rank() < p) {
    const int offending = qr.colsPermutation().indices()(qr.rank());
    throw SingularDesignError("design is rank deficient; column " +
                              std::to_string(offending) + " is collinear");
  }
}

struct Family {
  // mean and IRLS weight at linear predictor eta for one row
  virtual double mean(double eta) const = 0;
  virtual double irls_weight(double mu) const = 0;
  virtual double neg_loglik_term(double y, double eta) const = 0;
  virtual ~Family() = default;
};

struct PoissonFamily final : Family {
  double mean(double eta) const override { return std::exp(eta); }
  double irls_weight(double mu) const override { return mu; }
  double neg_loglik_term(double y, double eta) const override {
    return -(y * eta - std::exp(eta));
  }
};

struct LogisticFamily final : Family {
  double mean(double eta) const override { return logistic(eta); }
  double irls_weight(double mu) const override { return mu * (1.0 - mu); }
  double neg_loglik_term(double y, double eta) const override {
    return -(y * eta - softplus(eta));
  }
};

double neg_loglik(const std::vector<WeightedRow>& rows, const Family& fam,
                  const Eigen::VectorXd& beta) {
  double nll = 0.0;
  for (const auto& r : rows) {
    if (r.weight < kWeightFloor) continue;
    nll += r.weight * fam.neg_loglik_term(r.response, r.offset_log + beta.dot(r.design_row));
  }
  return nll;
}

Eigen::MatrixXd information(const std::vector<WeightedRow>& rows, const Family& fam,
                            const Eigen::VectorXd& beta) {
  const int p = static_cast<int>(beta.size());
  Eigen::MatrixXd info = Eigen::MatrixXd::Zero(p, p);
  for (const auto& r : rows) {
    if (r.weight < kWeightFloor) continue;
    const double mu = fam.mean(r.offset_log + beta.dot(r.design_row));
    info.selfadjointView<Eigen::Lower>().rankUpdate(r.design_row,
                                                    r.weight * fam.irls_weight(mu));
  }
  return info.selfadjointView<Eigen::Lower>();
}

GlmFit irls(const std::vector<WeightedRow>& rows, const Family& fam,
            Eigen::VectorXd beta, bool logistic_family) {
  const int p = static_cast<int>(beta.size());
  check_rank(rows, p);

  double nll = neg_loglik(rows, fam, beta);
  GlmFit fit;
  for (int iter = 1; iter <= kMaxIter; ++iter) {
    Eigen::MatrixXd xtwx = Eigen::MatrixXd::Zero(p, p);
    Eigen::VectorXd xtwz = Eigen::VectorXd::Zero(p);
    for (const auto& r : rows) {
      if (r.weight < kWeightFloor) continue;
      const double eta = r.offset_log + beta.dot(r.design_row);
      const double mu = fam.mean(eta);
      const double w = r.weight * fam.irls_weight(mu);
      if (w < 1e-300) continue;
      // working response, offset removed
      const double z = (eta - r.offset_log) + (r.response - mu) * r.weight / w;
      xtwx.selfadjointView<Eigen::Lower>().rankUpdate(r.design_row, w);
      xtwz.noalias() += w * z * r.design_row;
    }
    Eigen::VectorXd proposal =
        Eigen::MatrixXd(xtwx.selfadjointView<Eigen::Lower>()).ldlt().solve(xtwz);

    // step-halving on deviance increase
    Eigen::VectorXd direction = proposal - beta;
    double step = 1.0;
    Eigen::VectorXd candidate = proposal;
    double nll_new = neg_loglik(rows, fam, candidate);
    int halvings = 0;
    while ((!std::isfinite(nll_new) || nll_new > nll + 1e-13) && halvings < kMaxHalvings) {
      step *= 0.5;
      candidate = beta + step * direction;
      nll_new = neg_loglik(rows, fam, candidate);
      ++halvings;
    }
    fit.iterations = iter;
    if (!std::isfinite(nll_new) || nll_new > nll + 1e-13) {
      // no ascent direction left; accept the current iterate if flat
      if (std::abs(nll_new - nll) <= kDevTol * (std::abs(nll) + 1.0)) {
        fit.converged = true;
        break;
      }
      std::ostringstream msg;
      msg << "IRLS step-halving exhausted at iteration " << iter
          << " (last iterate: " << beta.transpose() << ")";
      throw ConvergenceError(msg.str());
    }
    const double coef_change = (candidate - beta).cwiseAbs().maxCoeff();
    const double dev_change = std::abs(nll - nll_new);
    beta = candidate;
    nll = nll_new;
    if (dev_change <= kDevTol * (std::abs(nll) + 1.0) || coef_change <= kCoefTol) {
      fit.converged = true;
      break;
    }
  }

  if (!fit.converged) {
    if (logistic_family && beta.cwiseAbs().maxCoeff() > 50.0)
      throw SeparationError("logistic fit diverging (quasi-complete separation suspected)");
    std::ostringstream msg;
    msg << "IRLS did not converge in " << kMaxIter
        << " iterations (last iterate: " << beta.transpose() << ")";
    throw ConvergenceError(msg.str());
  }

  fit.coefficients = beta;
  fit.deviance = 2.0 * nll;
  fit.info_matrix = information(rows, fam, beta);
  return fit;
}

}  // namespace

Separation detect_separation(const std::vector<WeightedRow>& rows) {
  std::vector<const WeightedRow*> active;
  for (const auto& r : rows)
    if (r.weight >= kWeightFloor) active.push_back(&r);
  if (active.empty()) return Separation::None;

  bool all_zero = true, all_one = true;
  for (const auto* r : active) {
    if (r->response >= 0.5)
      all_zero = false;
    else
      all_one = false;
  }
  if (all_zero || all_one) return Separation::Complete;

  const int p = static_cast<int>(active.front()->design_row.size());
  Separation worst = Separation::None;
  for (int j = 0; j < p; ++j) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    double max0 = -lo, min0 = lo, max1 = -lo, min1 = lo;
    for (const auto* r : active) {
      const double v = r->design_row(j);
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      if (r->response >= 0.5) {
        max1 = std::max(max1, v);
        min1 = std::min(min1, v);
      } else {
        max0 = std::max(max0, v);
        min0 = std::min(min0, v);
      }
    }
    if (lo == hi) continue;  // constant column cannot separate
    if (max0 < min1 || max1 < min0) return Separation::Complete;
    if (max0 <= min1 || max1 <= min0) worst = Separation::Quasi;
  }
  return worst;
}

GlmFit fit_weighted_poisson(const std::vector<WeightedRow>& rows,
                            std::optional<Eigen::VectorXd> init) {
  if (rows.empty()) throw ValidationError("fit_weighted_poisson: no rows");
  const int p = static_cast<int>(rows.front().design_row.size());
  Eigen::VectorXd beta;
  if (init) {
    beta = *init;
  } else {
    double sy = 0.0, so = 0.0;
    for (const auto& r : rows) {
      if (r.weight < kWeightFloor) continue;
      sy += r.weight * r.response;
      so += r.weight * std::exp(r.offset_log);
    }
    beta = Eigen::VectorXd::Zero(p);
    beta(0) = sy > 0.0 && so > 0.0 ? std::log(sy / so) : 0.0;
  }
  return irls(rows, PoissonFamily{}, beta, false);
}

GlmFit fit_weighted_logistic(const std::vector<WeightedRow>& rows,
                             std::optional<Eigen::VectorXd> init) {
  if (rows.empty()) throw ValidationError("fit_weighted_logistic: no rows");
  if (detect_separation(rows) == Separation::Complete)
    throw SeparationError("complete separation in logistic responses");
  const int p = static_cast<int>(rows.front().design_row.size());
  Eigen::VectorXd beta;
  if (init) {
    beta = *init;
  } else {
    double sy = 0.0, sw = 0.0;
    for (const auto& r : rows) {
      if (r.weight < kWeightFloor) continue;
      sy += r.weight * r.response;
      sw += r.weight;
    }
    const double pbar = std::clamp(sy / sw, 1e-6, 1.0 - 1e-6);
    beta = Eigen::VectorXd::Zero(p);
    beta(0) = std::log(pbar / (1.0 - pbar));
  }
  return irls(rows, LogisticFamily{}, beta, true);
}

}  // namespace mcpois
