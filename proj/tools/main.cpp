#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "mcpois/comparators.hpp"
#include "mcpois/csv.hpp"
#include "mcpois/em.hpp"
#include "mcpois/errors.hpp"
#include "mcpois/geo.hpp"
#include "mcpois/inference.hpp"
#include "mcpois/manifest.hpp"
#include "mcpois/sim.hpp"

namespace fs = std::filesystem;
using namespace mcpois;

namespace {

constexpr int kExitValidation = 2;
constexpr int kExitConvergence = 3;
constexpr int kExitIntegrity = 4;

std::string now_iso8601() {
  const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::ostringstream out;
  out << std::put_time(std::gmtime(&t), "%FT%TZ");
  return out.str();
}

std::vector<std::string> split_list(const std::string& s, char sep = ',') {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

int default_workers() {
  if (const char* env = std::getenv("MCPOIS_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  const unsigned hc = std::thread::hardware_concurrency();
  return hc > 0 ? static_cast<int>(hc) : 1;
}

// ---------------------------------------------------------------- fit

struct FitOptions {
  std::string data_file;
  std::string y_col = "y", offset_col = "offset", xstar_col = "xstar";
  std::string x_col;
  std::string id_col;
  std::string covariates, interactions;
  std::string mode = "one-sided";
  std::string method = "all";
  std::string init = "complete-case";
  std::vector<std::string> pr_contrasts;
  std::string out_dir = ".";
};

struct LoadedData {
  Dataset data;
  DesignSpec design;
  std::vector<std::string> term_names;
  std::string exposure_name;
};

LoadedData load_fit_data(const FitOptions& opt) {
  CsvTable csv = read_csv(opt.data_file);
  const int jy = csv.require_column(opt.y_col);
  const int jo = csv.require_column(opt.offset_col);
  const int jxs = csv.require_column(opt.xstar_col);
  const int jx = opt.x_col.empty() ? -1 : csv.require_column(opt.x_col);
  const int jid = opt.id_col.empty() ? -1 : csv.require_column(opt.id_col);

  LoadedData out;
  out.data.misclass_mode =
      opt.mode == "two-sided" ? MisclassMode::TwoSided : MisclassMode::OneSided;
  out.data.covariate_names = split_list(opt.covariates);
  std::vector<int> jz;
  for (const auto& name : out.data.covariate_names)
    jz.push_back(csv.require_column(name));

  out.design.n_covariates = static_cast<int>(jz.size());
  for (const auto& name : split_list(opt.interactions)) {
    const auto it = std::find(out.data.covariate_names.begin(),
                              out.data.covariate_names.end(), name);
    if (it == out.data.covariate_names.end())
      throw ValidationError("interaction covariate not in --covariates: " + name);
    out.design.interactions.push_back(
        static_cast<int>(it - out.data.covariate_names.begin()));
  }
  out.exposure_name = opt.x_col.empty() ? opt.xstar_col : opt.x_col;
  out.term_names = out.design.term_names(out.exposure_name, out.data.covariate_names);

  for (std::size_t r = 0; r < csv.rows.size(); ++r) {
    const auto& row = csv.rows[r];
    Observation o;
    o.id = jid >= 0 ? row[jid] : std::to_string(r);
    o.y = static_cast<std::int64_t>(std::stoll(row[jy]));
    o.offset = std::stod(row[jo]);
    o.xstar = std::stoi(row[jxs]);
    if (jx >= 0) {
      if (auto v = parse_optional_double(row[jx])) o.x = static_cast<int>(*v);
    }
    o.queried = o.x.has_value();
    for (int j : jz) o.z.push_back(std::stod(row[j]));
    out.data.observations.push_back(std::move(o));
  }
  return out;
}

Eigen::VectorXd parse_contrast(const std::string& expr,
                               const std::vector<std::string>& term_names) {
  Eigen::VectorXd c = Eigen::VectorXd::Zero(term_names.size());
  for (const auto& term : split_list(expr, '+')) {
    const auto it = std::find(term_names.begin(), term_names.end(), term);
    if (it == term_names.end())
      throw ValidationError("unknown term in --pr-contrast: " + term);
    c(it - term_names.begin()) += 1.0;
  }
  return c;
}

void write_fit_report(const std::string& out_dir, const std::string& method,
                      const std::vector<std::string>& term_names,
                      const Eigen::VectorXd& beta, const Eigen::MatrixXd& cov,
                      const std::vector<std::pair<std::string, Eigen::VectorXd>>& contrasts,
                      double loglik, int iterations, bool converged, bool fallback,
                      int n_used) {
  CsvTable coef;
  coef.header = {"term", "estimate", "se", "ci_low", "ci_high"};
  for (int j = 0; j < beta.size(); ++j) {
    const double se = std::sqrt(std::max(0.0, cov(j, j)));
    auto [lo, hi] = wald_ci(beta(j), se);
    coef.rows.push_back({term_names[j], format_double(beta(j)), format_double(se),
                         format_double(lo), format_double(hi)});
  }
  write_csv(out_dir + "/fit_" + method + ".csv", coef);

  if (!contrasts.empty()) {
    CsvTable pr;
    pr.header = {"label", "pr", "ci_low", "ci_high"};
    for (const auto& [label, c] : contrasts) {
      PrSummary s = pr_summary(label, beta, cov, c);
      pr.rows.push_back({s.label, format_double(s.estimate),
                         format_double(s.ci_low), format_double(s.ci_high)});
    }
    write_csv(out_dir + "/fit_" + method + "_pr.csv", pr);
  }

  CsvTable meta;
  meta.header = {"loglik", "iterations", "converged", "fallback", "n_used"};
  meta.rows.push_back({format_double(loglik), std::to_string(iterations),
                       converged ? "1" : "0", fallback ? "1" : "0",
                       std::to_string(n_used)});
  write_csv(out_dir + "/fit_" + method + "_stats.csv", meta);
}

int cmd_fit(const FitOptions& opt) {
  LoadedData loaded = load_fit_data(opt);
  fs::create_directories(opt.out_dir);

  std::vector<std::pair<std::string, Eigen::VectorXd>> contrasts;
  for (const auto& expr : opt.pr_contrasts)
    contrasts.emplace_back(expr, parse_contrast(expr, loaded.term_names));

  const bool all = opt.method == "all";
  bool any_unconverged = false;

  auto run_comparator = [&](const std::string& name, auto&& fitter) {
    ComparatorFit fit = fitter(loaded.data, loaded.design);
    write_fit_report(opt.out_dir, name, loaded.term_names, fit.beta_hat,
                     fit.covariance, contrasts, fit.loglik, 0, true, false,
                     fit.n_used);
  };
  if (all || opt.method == "gold") run_comparator("gold", fit_gold);
  if (all || opt.method == "naive") run_comparator("naive", fit_naive);
  if (all || opt.method == "complete-case")
    run_comparator("complete_case", fit_complete_case);

  if (all || opt.method == "mle") {
    EmConfig em;
    em.init_strategy =
        opt.init == "zeros" ? InitStrategy::Zeros : InitStrategy::CompleteCase;
    MleFitResult mle = fit_mle(loaded.data, loaded.design, em);
    Eigen::MatrixXd beta_cov;
    double loglik;
    if (mle.fallback_used) {
      beta_cov = mle.covariance;
      loglik = fit_naive(loaded.data, loaded.design).loglik;
    } else {
      Eigen::VectorXd theta(loaded.design.dimension() + mle.eta_hat.eta.size());
      theta << mle.beta_hat.beta, mle.eta_hat.eta;
      CovarianceResult cov = covariance_from_hessian(
          numerical_hessian(loaded.data, loaded.design, theta));
      mle.covariance = cov.covariance;
      beta_cov = cov.covariance.topLeftCorner(loaded.design.dimension(),
                                              loaded.design.dimension());
      loglik = mle.loglik_trace.empty() ? 0.0 : mle.loglik_trace.back();
    }
    write_fit_report(opt.out_dir, "mle", loaded.term_names, mle.beta_hat.beta,
                     beta_cov, contrasts, loglik, mle.iterations, mle.converged,
                     mle.fallback_used,
                     static_cast<int>(loaded.data.observations.size()));
    if (!mle.converged) any_unconverged = true;
  }

  RunManifest manifest;
  manifest.command = "fit";
  manifest.config = {{"data", opt.data_file}, {"y", opt.y_col},
                     {"offset", opt.offset_col}, {"xstar", opt.xstar_col},
                     {"x", opt.x_col}, {"covariates", opt.covariates},
                     {"interactions", opt.interactions}, {"mode", opt.mode},
                     {"method", opt.method}, {"init", opt.init}};
  manifest.add_input(opt.data_file);
  manifest.timestamp = now_iso8601();
  manifest.write(opt.out_dir + "/manifest.json");

  return any_unconverged ? kExitConvergence : 0;
}

// ---------------------------------------------------------------- simulate

struct SimulateOptions {
  std::string setting = "one-sided";
  SimConfig config;
  std::string init = "complete-case";
  std::string out_dir = ".";
};

void write_summary_csv(const std::string& path, const SimulateOptions& opt,
                       const SimSummary& s) {
  CsvTable t;
  t.header = {"setting", "n", "ppv", "npv", "q", "beta1", "reps_used", "method",
              "bias", "bias_absolute", "ese", "ase", "cp", "re",
              "n_fallback", "n_failed"};
  auto row = [&](const std::string& method, const MethodSummary& m,
                 const std::string& ase, const std::string& cp) {
    t.rows.push_back({opt.setting, std::to_string(opt.config.n_obs),
                      format_double(opt.config.ppv), format_double(opt.config.npv),
                      format_double(opt.config.q), format_double(opt.config.beta1),
                      std::to_string(s.n_reps_used), method,
                      std::isnan(m.rel_bias) ? "" : format_double(m.rel_bias),
                      m.bias_is_absolute ? "1" : "0",
                      std::isnan(m.ese) ? "" : format_double(m.ese), ase, cp,
                      std::isnan(m.re) ? "" : format_double(m.re),
                      std::to_string(s.n_fallback), std::to_string(s.n_failed)});
  };
  row("gold", s.gold, "", "");
  row("naive", s.naive, "", "");
  row("complete_case", s.cc, "", "");
  row("mle", s.mle, format_double(s.mle_ase), format_double(s.mle_cp));
  write_csv(path, t);
}

int cmd_simulate(SimulateOptions opt) {
  opt.config.misclass_mode = opt.setting == "two-sided" ? MisclassMode::TwoSided
                                                        : MisclassMode::OneSided;
  opt.config.init_strategy =
      opt.init == "zeros" ? InitStrategy::Zeros : InitStrategy::CompleteCase;
  fs::create_directories(opt.out_dir);

  std::vector<ReplicateRecord> records;
  SimSummary summary = run_replicates(opt.config, &records);

  CsvTable reps;
  reps.header = {"rep", "ok", "gold_est", "gold_se", "naive_est", "naive_se",
                 "cc_est", "cc_se", "mle_est", "mle_se", "mle_converged",
                 "mle_fallback", "mle_trace_ok", "mle_iterations", "error"};
  for (const auto& r : records) {
    if (r.ok) {
      reps.rows.push_back({std::to_string(r.rep), "1", format_double(r.gold_est),
                           format_double(r.gold_se), format_double(r.naive_est),
                           format_double(r.naive_se),
                           r.cc_ok ? format_double(r.cc_est) : "",
                           r.cc_ok ? format_double(r.cc_se) : "",
                           format_double(r.mle_est),
                           format_double(r.mle_se), r.mle_converged ? "1" : "0",
                           r.mle_fallback ? "1" : "0", r.mle_trace_ok ? "1" : "0",
                           std::to_string(r.mle_iterations), ""});
    } else {
      reps.rows.push_back({std::to_string(r.rep), "0", "", "", "", "", "", "",
                           "", "", "", "", "", "", r.error});
    }
  }
  write_csv(opt.out_dir + "/replicates.csv", reps);
  write_summary_csv(opt.out_dir + "/summary.csv", opt, summary);

  RunManifest manifest;
  manifest.command = "simulate";
  manifest.seed = opt.config.seed;
  manifest.config = {{"setting", opt.setting},
                     {"n", std::to_string(opt.config.n_obs)},
                     {"ppv", format_double(opt.config.ppv)},
                     {"npv", format_double(opt.config.npv)},
                     {"q", format_double(opt.config.q)},
                     {"beta0", format_double(opt.config.beta0)},
                     {"beta1", format_double(opt.config.beta1)},
                     {"beta2", format_double(opt.config.beta2)},
                     {"reps", std::to_string(opt.config.n_reps)},
                     {"init", opt.init},
                     {"workers", std::to_string(opt.config.workers)}};
  manifest.timestamp = now_iso8601();
  manifest.write(opt.out_dir + "/manifest.json");
  return 0;
}

// ---------------------------------------------------------------- distances

int cmd_distances(const std::string& tracts_file, const std::string& retailers_file,
                  const std::string& routes_file, const std::string& thresholds_arg,
                  const std::string& out_file) {
  std::vector<double> thresholds;
  for (const auto& s : split_list(thresholds_arg)) thresholds.push_back(std::stod(s));

  CsvTable tcsv = read_csv(tracts_file);
  const int tid = tcsv.require_column("id");
  const int tlat = tcsv.require_column("lat");
  const int tlon = tcsv.require_column("lon");
  const int tmetro = tcsv.require_column("metro");
  const int tcases = tcsv.require_column("cases");
  const int tpop = tcsv.require_column("population");
  std::vector<Tract> tracts;
  for (const auto& row : tcsv.rows)
    tracts.push_back({row[tid], std::stod(row[tlat]), std::stod(row[tlon]),
                      std::stoi(row[tmetro]),
                      static_cast<std::int64_t>(std::stoll(row[tcases])),
                      static_cast<std::int64_t>(std::stoll(row[tpop]))});

  CsvTable rcsv = read_csv(retailers_file);
  const int rid = rcsv.require_column("id");
  const int rlat = rcsv.require_column("lat");
  const int rlon = rcsv.require_column("lon");
  std::vector<Retailer> retailers;
  for (const auto& row : rcsv.rows)
    retailers.push_back({row[rid], std::stod(row[rlat]), std::stod(row[rlon])});

  AccessTable access = build_access_table(tracts, retailers, thresholds);

  if (!routes_file.empty()) {
    CsvTable qcsv = read_csv(routes_file);
    const int qid = qcsv.require_column("id");
    const int qmi = qcsv.require_column("route_miles");
    std::vector<std::pair<std::string, double>> routes;
    for (const auto& row : qcsv.rows)
      routes.emplace_back(row[qid], std::stod(row[qmi]));
    merge_route_distances(access, routes);

    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      int pos = 0, truepos = 0;
      for (const auto& row : access.rows) {
        if (row.xstar[k] != 1 || !row.x[k]) continue;
        ++pos;
        if (*row.x[k] == 1) ++truepos;
      }
      if (pos > 0)
        std::cout << "PPV at " << thresholds[k] << " mi: " << truepos << "/" << pos
                  << " = " << 100.0 * truepos / pos << "%\n";
    }
  }

  CsvTable out;
  out.header = {"id", "metro", "cases", "population", "d_haversine", "d_route"};
  for (double thr : thresholds) {
    out.header.push_back("xstar_" + format_double(thr));
    out.header.push_back("x_" + format_double(thr));
  }
  for (const auto& row : access.rows) {
    std::vector<std::string> r = {row.tract_id, std::to_string(row.metro),
                                  std::to_string(row.y_cases),
                                  std::to_string(row.population),
                                  format_double(row.d_haversine),
                                  row.d_route ? format_double(*row.d_route) : ""};
    for (std::size_t k = 0; k < thresholds.size(); ++k) {
      r.push_back(std::to_string(row.xstar[k]));
      r.push_back(row.x[k] ? std::to_string(*row.x[k]) : "");
    }
    out.rows.push_back(std::move(r));
  }
  write_csv(out_file, out);

  RunManifest manifest;
  manifest.command = "distances";
  manifest.config = {{"tracts", tracts_file}, {"retailers", retailers_file},
                     {"routes", routes_file}, {"thresholds", thresholds_arg}};
  manifest.add_input(tracts_file);
  manifest.add_input(retailers_file);
  if (!routes_file.empty()) manifest.add_input(routes_file);
  manifest.timestamp = now_iso8601();
  manifest.write(out_file + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------- design

int cmd_design(const std::string& access_file, int n, std::uint64_t seed,
               double threshold, const std::string& out_file) {
  CsvTable csv = read_csv(access_file);
  const int jid = csv.require_column("id");
  const int jmetro = csv.require_column("metro");
  const int jxs = csv.require_column("xstar_" + format_double(threshold));

  AccessTable access;
  access.thresholds = {threshold};
  for (const auto& row : csv.rows) {
    AccessRow r;
    r.tract_id = row[jid];
    r.metro = std::stoi(row[jmetro]);
    r.xstar = {std::stoi(row[jxs])};
    r.x = {std::nullopt};
    access.rows.push_back(std::move(r));
  }

  std::mt19937_64 rng(seed);
  std::vector<std::string> chosen = draw_query_design(access, 0, n, rng);

  std::map<std::string, int> metro_of;
  for (const auto& row : access.rows) metro_of[row.tract_id] = row.metro;
  int n_metro = 0;
  CsvTable out;
  out.header = {"id", "stratum"};
  for (const auto& id : chosen) {
    const bool metro = metro_of[id] != 0;
    n_metro += metro;
    out.rows.push_back({id, metro ? "metro" : "non-metro"});
  }
  write_csv(out_file, out);
  std::cout << "selected " << chosen.size() << " tracts (" << n_metro << " metro, "
            << chosen.size() - n_metro << " non-metro)\n";

  RunManifest manifest;
  manifest.command = "design";
  manifest.seed = seed;
  manifest.config = {{"access", access_file}, {"n", std::to_string(n)},
                     {"threshold", format_double(threshold)}};
  manifest.add_input(access_file);
  manifest.timestamp = now_iso8601();
  manifest.write(out_file + ".manifest.json");
  return 0;
}

// ---------------------------------------------------------------- report

int cmd_report(const std::vector<std::string>& summary_files,
               const std::string& out_file) {
  CsvTable merged;
  merged.header = {"setting", "n", "ppv", "q",
                   "gold_bias", "gold_ese",
                   "naive_bias", "naive_ese",
                   "cc_bias", "cc_ese", "cc_re",
                   "mle_bias", "mle_ese", "mle_ase", "mle_cp", "mle_re"};
  for (const auto& path : summary_files) {
    CsvTable t = read_csv(path);
    for (const auto& col : {"setting", "n", "ppv", "q", "method", "bias", "ese",
                            "ase", "cp", "re"})
      t.require_column(col);
    std::map<std::string, std::vector<std::string>> by_method;
    for (const auto& row : t.rows) by_method[row[t.column("method")]] = row;
    if (by_method.size() != 4)
      throw ValidationError(path + ": expected one row per method");
    auto field = [&](const std::string& method, const std::string& col) {
      return by_method.at(method)[t.column(col)];
    };
    merged.rows.push_back({field("gold", "setting"), field("gold", "n"),
                           field("gold", "ppv"), field("gold", "q"),
                           field("gold", "bias"), field("gold", "ese"),
                           field("naive", "bias"), field("naive", "ese"),
                           field("complete_case", "bias"), field("complete_case", "ese"),
                           field("complete_case", "re"),
                           field("mle", "bias"), field("mle", "ese"),
                           field("mle", "ase"), field("mle", "cp"),
                           field("mle", "re")});
  }
  if (!out_file.empty()) write_csv(out_file, merged);

  // aligned plain-text view
  std::vector<std::size_t> widths(merged.header.size());
  auto shorten = [](const std::string& s) {
    if (s.empty()) return s;
    std::ostringstream o;
    o << std::setprecision(3) << std::stod(s);
    return o.str();
  };
  std::vector<std::vector<std::string>> pretty;
  for (const auto& row : merged.rows) {
    std::vector<std::string> p = row;
    for (std::size_t j = 4; j < p.size(); ++j) p[j] = shorten(p[j]);
    pretty.push_back(std::move(p));
  }
  for (std::size_t j = 0; j < merged.header.size(); ++j) {
    widths[j] = merged.header[j].size();
    for (const auto& row : pretty) widths[j] = std::max(widths[j], row[j].size());
  }
  auto print_row = [&](const std::vector<std::string>& row) {
    for (std::size_t j = 0; j < row.size(); ++j)
      std::cout << std::setw(static_cast<int>(widths[j]) + 2) << row[j];
    std::cout << '\n';
  };
  print_row(merged.header);
  for (const auto& row : pretty) print_row(row);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Poisson regression with a misclassified binary exposure under a two-phase query design"};
  app.require_subcommand(1);

  FitOptions fit_opt;
  auto* fit = app.add_subcommand("fit", "Fit outcome models to a data file");
  fit->add_option("--data", fit_opt.data_file)->required();
  fit->add_option("--y", fit_opt.y_col);
  fit->add_option("--offset", fit_opt.offset_col);
  fit->add_option("--xstar", fit_opt.xstar_col);
  fit->add_option("--x", fit_opt.x_col);
  fit->add_option("--id", fit_opt.id_col);
  fit->add_option("--covariates", fit_opt.covariates);
  fit->add_option("--interactions", fit_opt.interactions);
  fit->add_option("--mode", fit_opt.mode)
      ->check(CLI::IsMember({"one-sided", "two-sided"}));
  fit->add_option("--method", fit_opt.method)
      ->check(CLI::IsMember({"mle", "naive", "complete-case", "gold", "all"}));
  fit->add_option("--init", fit_opt.init)
      ->check(CLI::IsMember({"zeros", "complete-case"}));
  fit->add_option("--pr-contrast", fit_opt.pr_contrasts);
  fit->add_option("--out-dir", fit_opt.out_dir);

  SimulateOptions sim_opt;
  sim_opt.config.workers = default_workers();
  auto* sim = app.add_subcommand("simulate", "Run replicated operating-characteristic studies");
  sim->add_option("--setting", sim_opt.setting)
      ->check(CLI::IsMember({"one-sided", "two-sided"}));
  sim->add_option("--n", sim_opt.config.n_obs);
  sim->add_option("--ppv", sim_opt.config.ppv);
  sim->add_option("--npv", sim_opt.config.npv);
  sim->add_option("--q", sim_opt.config.q);
  sim->add_option("--beta0", sim_opt.config.beta0);
  sim->add_option("--beta1", sim_opt.config.beta1);
  sim->add_option("--beta2", sim_opt.config.beta2);
  sim->add_option("--reps", sim_opt.config.n_reps);
  sim->add_option("--seed", sim_opt.config.seed);
  sim->add_option("--init", sim_opt.init)
      ->check(CLI::IsMember({"zeros", "complete-case"}));
  sim->add_option("--workers", sim_opt.config.workers);
  sim->add_option("--out-dir", sim_opt.out_dir);

  std::string tracts_file, retailers_file, routes_file, thresholds = "0.5,1.0";
  std::string distances_out = "access.csv";
  auto* dist = app.add_subcommand("distances", "Build the access table from coordinates");
  dist->add_option("--tracts", tracts_file)->required();
  dist->add_option("--retailers", retailers_file)->required();
  dist->add_option("--routes", routes_file);
  dist->add_option("--thresholds", thresholds);
  dist->add_option("--out", distances_out);

  std::string access_file, design_out = "design.csv";
  int design_n = 77;
  std::uint64_t design_seed = 1;
  double design_threshold = 1.0;
  auto* design = app.add_subcommand("design", "Draw a stratified query sample");
  design->add_option("--access", access_file)->required();
  design->add_option("--n", design_n);
  design->add_option("--seed", design_seed);
  design->add_option("--threshold", design_threshold);
  design->add_option("--out", design_out);

  std::vector<std::string> report_files;
  std::string report_out;
  auto* report = app.add_subcommand("report", "Merge simulation summaries into a wide table");
  report->add_option("files", report_files)->required();
  report->add_option("--out", report_out);

  CLI11_PARSE(app, argc, argv);

  try {
    if (fit->parsed()) return cmd_fit(fit_opt);
    if (sim->parsed()) return cmd_simulate(sim_opt);
    if (dist->parsed())
      return cmd_distances(tracts_file, retailers_file, routes_file, thresholds,
                           distances_out);
    if (design->parsed())
      return cmd_design(access_file, design_n, design_seed, design_threshold,
                        design_out);
    if (report->parsed()) return cmd_report(report_files, report_out);
  } catch (const IntegrityError& e) {
    std::cerr << "integrity error: " << e.what() << '\n';
    return kExitIntegrity;
  } catch (const ConvergenceError& e) {
    std::cerr << "convergence error: " << e.what() << '\n';
    return kExitConvergence;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  return 0;
}
