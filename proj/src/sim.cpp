#include "mcpois/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>

#include "mcpois/comparators.hpp"
#include "mcpois/errors.hpp"
#include "mcpois/inference.hpp"
#include "mcpois/numeric.hpp"

namespace mcpois {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

void SimConfig::validate() const {
  if (n_obs <= 0) throw ValidationError("sim: n_obs must be positive");
  if (!(ppv > 0.0 && ppv < 1.0)) throw ValidationError("sim: ppv must lie in (0,1)");
  if (!(npv > 0.0 && npv < 1.0)) throw ValidationError("sim: npv must lie in (0,1)");
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("sim: q must lie in [0,1]");
  if (n_reps <= 0) throw ValidationError("sim: n_reps must be positive");
  if (workers <= 0) throw ValidationError("sim: workers must be positive");
}

namespace {

constexpr double kOffsetMean = 4165.0;
constexpr double kXstarSlopeOneSided = 0.39;
constexpr double kXstarSlopeTwoSided = 0.34;

struct BaseDraws {
  std::vector<double> z;
  std::vector<int> xstar;
};

BaseDraws draw_base(int n, Rng& rng) {
  std::gamma_distribution<double> gamma(0.6, 0.2);
  BaseDraws b;
  b.z.resize(n);
  b.xstar.resize(n);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    b.z[i] = gamma(rng);
    b.xstar[i] = unif(rng) < logistic(1.0 - b.z[i]) ? 1 : 0;
  }
  return b;
}

Dataset finish_dataset(const SimConfig& config, const BaseDraws& base,
                       const std::vector<int>& x, Rng& rng) {
  Dataset data;
  data.covariate_names = {"z"};
  data.misclass_mode = config.misclass_mode;
  data.observations.reserve(config.n_obs);
  std::poisson_distribution<std::int64_t> pop(kOffsetMean);
  for (int i = 0; i < config.n_obs; ++i) {
    std::int64_t offset = pop(rng);
    while (offset <= 0) offset = pop(rng);
    const double lambda =
        static_cast<double>(offset) *
        std::exp(config.beta0 + config.beta1 * x[i] + config.beta2 * base.z[i]);
    std::poisson_distribution<std::int64_t> outcome(lambda);
    Observation o;
    o.id = std::to_string(i);
    o.y = outcome(rng);
    o.offset = static_cast<double>(offset);
    o.xstar = base.xstar[i];
    o.x = x[i];
    o.z = {base.z[i]};
    o.queried = true;
    data.observations.push_back(std::move(o));
  }
  return data;
}

}  // namespace

Dataset generate_one_sided(const SimConfig& config, Rng& rng) {
  BaseDraws base = draw_base(config.n_obs, rng);
  const double eta0 = std::log(config.ppv / (1.0 - config.ppv));
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> x(config.n_obs, 0);
  for (int i = 0; i < config.n_obs; ++i)
    if (base.xstar[i] == 1)
      x[i] = unif(rng) < logistic(eta0 + kXstarSlopeOneSided * base.z[i]) ? 1 : 0;
  return finish_dataset(config, base, x, rng);
}

Dataset generate_two_sided(const SimConfig& config, Rng& rng) {
  BaseDraws base = draw_base(config.n_obs, rng);
  const double eta0 = std::log((1.0 - config.npv) / config.npv);

  // Solve eta1 so that the implied PPV over the generated X*=1 stratum
  // matches the configured target; the mean is monotone in eta1.
  auto implied_ppv = [&](double eta1) {
    double sum = 0.0;
    int count = 0;
    for (int i = 0; i < config.n_obs; ++i) {
      if (base.xstar[i] != 1) continue;
      sum += logistic(eta0 + eta1 + kXstarSlopeTwoSided * base.z[i]);
      ++count;
    }
    if (count == 0) throw ValidationError("sim: no xstar=1 rows generated");
    return sum / count;
  };
  double lo = -60.0, hi = 60.0;
  if (implied_ppv(lo) > config.ppv || implied_ppv(hi) < config.ppv)
    throw ValidationError("sim: target ppv unattainable under two-sided mechanism");
  for (int k = 0; k < 200; ++k) {
    const double mid = 0.5 * (lo + hi);
    (implied_ppv(mid) < config.ppv ? lo : hi) = mid;
  }
  const double eta1 = 0.5 * (lo + hi);

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<int> x(config.n_obs, 0);
  for (int i = 0; i < config.n_obs; ++i) {
    const double p =
        logistic(eta0 + eta1 * base.xstar[i] + kXstarSlopeTwoSided * base.z[i]);
    x[i] = unif(rng) < p ? 1 : 0;
  }
  return finish_dataset(config, base, x, rng);
}

Dataset generate(const SimConfig& config, Rng& rng) {
  return config.misclass_mode == MisclassMode::OneSided
             ? generate_one_sided(config, rng)
             : generate_two_sided(config, rng);
}

namespace {

// Fisher-Yates prefix of size k over the given indices.
std::vector<int> sample_without_replacement(std::vector<int> pool, int k, Rng& rng) {
  const int n = static_cast<int>(pool.size());
  if (k > n)
    throw ValidationError("query design: stratum of size " + std::to_string(n) +
                          " smaller than requested sample " + std::to_string(k));
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> pick(i, n - 1);
    std::swap(pool[i], pool[pick(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace

Dataset apply_query_design(const Dataset& data, double q, MisclassMode mode,
                           Rng& rng) {
  const int n = static_cast<int>(data.observations.size());
  std::vector<int> stratum0, stratum1;
  for (int i = 0; i < n; ++i)
    (data.observations[i].xstar == 1 ? stratum1 : stratum0).push_back(i);

  std::vector<int> keep;
  if (mode == MisclassMode::OneSided) {
    const int k = static_cast<int>(std::lround(n * q));
    keep = sample_without_replacement(stratum1, k, rng);
  } else {
    const int total = static_cast<int>(std::lround(n * q));
    const int k0 = static_cast<int>(std::floor(0.5 * n * q));
    const int k1 = total - k0;  // ceil share goes to the X*=1 stratum
    keep = sample_without_replacement(stratum0, k0, rng);
    std::vector<int> keep1 = sample_without_replacement(stratum1, k1, rng);
    keep.insert(keep.end(), keep1.begin(), keep1.end());
  }
  std::vector<char> queried(n, 0);
  for (int i : keep) queried[i] = 1;

  Dataset out = data;
  for (int i = 0; i < n; ++i) {
    if (!queried[i]) {
      out.observations[i].x.reset();
      out.observations[i].queried = false;
    }
  }
  return out;
}

ReplicateRecord run_one_replicate(const SimConfig& config, int rep) {
  ReplicateRecord rec;
  rec.rep = rep;
  Rng rng(derive_seed(config.seed, static_cast<std::uint64_t>(rep)));
  DesignSpec design{1, {}};
  try {
    Dataset full = generate(config, rng);
    Dataset observed = apply_query_design(full, config.q, config.misclass_mode, rng);

    ComparatorFit gold = fit_gold(full, design);
    rec.gold_est = gold.beta_hat(1);
    rec.gold_se = gold.se(1);

    ComparatorFit naive = fit_naive(observed, design);
    rec.naive_est = naive.beta_hat(1);
    rec.naive_se = naive.se(1);

    try {
      ComparatorFit cc = fit_complete_case(observed, design);
      rec.cc_est = cc.beta_hat(1);
      rec.cc_se = cc.se(1);
      rec.cc_ok = true;
    } catch (const SingularDesignError&) {
      rec.cc_ok = false;  // e.g. every queried unit exposed
    } catch (const SeparationError&) {
      rec.cc_ok = false;
    }

    EmConfig em;
    em.init_strategy = config.init_strategy;
    MleFitResult mle = fit_mle(observed, design, em);
    rec.mle_est = mle.beta_hat.beta(1);
    rec.mle_converged = mle.converged;
    rec.mle_fallback = mle.fallback_used;
    rec.mle_iterations = mle.iterations;
    rec.mle_trace_ok = true;
    for (std::size_t i = 1; i < mle.loglik_trace.size(); ++i)
      if (mle.loglik_trace[i] < mle.loglik_trace[i - 1] - 1e-8)
        rec.mle_trace_ok = false;
    if (mle.fallback_used) {
      rec.mle_se = std::sqrt(mle.covariance(1, 1));
    } else {
      Eigen::VectorXd theta(design.dimension() + mle.eta_hat.eta.size());
      theta << mle.beta_hat.beta, mle.eta_hat.eta;
      Eigen::MatrixXd hess = numerical_hessian(observed, design, theta);
      CovarianceResult cov = covariance_from_hessian(hess);
      rec.mle_se = cov.se(1);
    }
    rec.ok = true;
  } catch (const std::exception& e) {
    rec.ok = false;
    rec.error = e.what();
  }
  return rec;
}

namespace {

MethodSummary summarize_method(const std::vector<double>& estimates, double truth,
                               double gold_ese) {
  MethodSummary s;
  const int n = static_cast<int>(estimates.size());
  if (n == 0) return s;
  const double mean =
      std::accumulate(estimates.begin(), estimates.end(), 0.0) / n;
  if (truth != 0.0) {
    s.rel_bias = (mean - truth) / truth;
  } else {
    s.rel_bias = mean;
    s.bias_is_absolute = true;
  }
  if (n > 1) {
    double ss = 0.0;
    for (double e : estimates) ss += (e - mean) * (e - mean);
    s.ese = std::sqrt(ss / (n - 1));
  } else {
    s.ese = std::numeric_limits<double>::quiet_NaN();
  }
  s.re = s.ese > 0.0 ? (gold_ese / s.ese) * (gold_ese / s.ese)
                     : std::numeric_limits<double>::quiet_NaN();
  return s;
}

}  // namespace

SimSummary summarize(const std::vector<ReplicateRecord>& records,
                     const SimConfig& config) {
  std::vector<double> gold, naive, cc, mle, mle_se;
  int covered = 0;
  SimSummary s;
  const double zcrit = normal_quantile(0.975);
  for (const auto& r : records) {
    if (!r.ok) {
      ++s.n_failed;
      continue;
    }
    gold.push_back(r.gold_est);
    naive.push_back(r.naive_est);
    if (r.cc_ok) cc.push_back(r.cc_est);
    mle.push_back(r.mle_est);
    mle_se.push_back(r.mle_se);
    if (r.mle_fallback) ++s.n_fallback;
    if (r.mle_est - zcrit * r.mle_se <= config.beta1 &&
        config.beta1 <= r.mle_est + zcrit * r.mle_se)
      ++covered;
  }
  s.n_reps_used = static_cast<int>(gold.size());
  const double gold_ese_tmp = summarize_method(gold, config.beta1, 1.0).ese;
  s.gold = summarize_method(gold, config.beta1, gold_ese_tmp);
  s.naive = summarize_method(naive, config.beta1, gold_ese_tmp);
  s.cc = summarize_method(cc, config.beta1, gold_ese_tmp);
  s.mle = summarize_method(mle, config.beta1, gold_ese_tmp);
  if (!mle_se.empty())
    s.mle_ase =
        std::accumulate(mle_se.begin(), mle_se.end(), 0.0) / mle_se.size();
  s.mle_cp = s.n_reps_used > 0 ? static_cast<double>(covered) / s.n_reps_used : 0.0;
  return s;
}

SimSummary run_replicates(const SimConfig& config,
                          std::vector<ReplicateRecord>* records_out) {
  config.validate();
  std::vector<ReplicateRecord> records(config.n_reps);
  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int rep = next.fetch_add(1);
      if (rep >= config.n_reps) return;
      records[rep] = run_one_replicate(config, rep);
    }
  };
  const int nthreads = std::min(config.workers, config.n_reps);
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(nthreads);
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  SimSummary summary = summarize(records, config);
  if (records_out) *records_out = std::move(records);
  return summary;
}

}  // namespace mcpois
