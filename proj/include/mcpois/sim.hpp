#ifndef MCPOIS_SIM_HPP
#define MCPOIS_SIM_HPP

#include <cstdint>
#include <optional>
#include <random>
#include <vector>

#include "mcpois/em.hpp"
#include "mcpois/types.hpp"

namespace mcpois {

using Rng = std::mt19937_64;

// Counter-based per-replicate seed derivation (splitmix64 over master ^ index).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

struct SimConfig {
  int n_obs = 2200;
  double ppv = 0.6;
  double npv = 0.75;  // two-sided only
  double q = 0.1;
  double beta0 = -2.28;
  double beta1 = 0.18;
  double beta2 = 0.14;
  MisclassMode misclass_mode = MisclassMode::OneSided;
  int n_reps = 1000;
  std::uint64_t seed = 1;
  InitStrategy init_strategy = InitStrategy::CompleteCase;
  int workers = 1;

  void validate() const;
};

struct MethodSummary {
  double rel_bias = 0.0;
  bool bias_is_absolute = false;  // true when beta1 == 0
  double ese = 0.0;
  double re = 0.0;
};

struct SimSummary {
  MethodSummary gold, naive, cc, mle;
  double mle_ase = 0.0;
  double mle_cp = 0.0;
  int n_fallback = 0;
  int n_failed = 0;
  int n_reps_used = 0;
};

struct ReplicateRecord {
  int rep = 0;
  bool ok = false;
  std::string error;
  // beta1-hat and its SE per method
  double gold_est = 0.0, gold_se = 0.0;
  double naive_est = 0.0, naive_se = 0.0;
  double cc_est = 0.0, cc_se = 0.0;
  bool cc_ok = false;  // complete case is unestimable when queried x is constant
  double mle_est = 0.0, mle_se = 0.0;
  bool mle_converged = false;
  bool mle_fallback = false;
  bool mle_trace_ok = false;  // log-likelihood trace non-decreasing
  int mle_iterations = 0;
};

// Full data, every x observed and queried. Querying is applied separately.
Dataset generate_one_sided(const SimConfig& config, Rng& rng);
Dataset generate_two_sided(const SimConfig& config, Rng& rng);
Dataset generate(const SimConfig& config, Rng& rng);

// Redacts x outside the sampled phase-two subset. One-sided: nint(Nq) rows
// drawn from the X*=1 stratum; two-sided: floor(Nq/2) from X*=0 and
// ceil(Nq/2) from X*=1.
Dataset apply_query_design(const Dataset& data, double q, MisclassMode mode,
                           Rng& rng);

ReplicateRecord run_one_replicate(const SimConfig& config, int rep);

SimSummary summarize(const std::vector<ReplicateRecord>& records,
                     const SimConfig& config);

SimSummary run_replicates(const SimConfig& config,
                          std::vector<ReplicateRecord>* records_out = nullptr);

}  // namespace mcpois

#endif
