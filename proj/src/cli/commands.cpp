#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "csv.hpp"
#include "tvspec/errors.hpp"

namespace tvspec::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string valid_dgp_names() { return "LS1, LS2, LS3, PS1, S1, S2"; }

DgpModel require_dgp(const std::string& name) {
  auto model = parse_dgp(name);
  if (!model) {
    throw UsageError("unknown DGP '" + name + "'; valid names: " + valid_dgp_names());
  }
  return *model;
}

Innovation require_innovation(const std::string& name) {
  auto kind = parse_innovation(name);
  if (!kind) throw UsageError("unknown innovation '" + name + "'; valid: a, b, c");
  return *kind;
}

// --seed, else TVSPEC_SEED, else 1.
std::uint64_t resolve_seed(const std::optional<std::uint64_t>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("TVSPEC_SEED"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end == nullptr || *end != '\0') {
      throw UsageError(std::string("TVSPEC_SEED is not an unsigned integer: ") + env);
    }
    return v;
  }
  return 1;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  return out;
}

json acceptance_json(const AcceptanceStats& a) {
  return json{{"k1", a.k1.rate()},
              {"k2", a.k2.rate()},
              {"atom_time", a.atom_time.rate()},
              {"atom_freq", a.atom_freq.rate()},
              {"sticks", a.sticks.rate()},
              {"tau", a.tau.rate()}};
}

json trace_summary(const std::vector<Draw>& draws) {
  if (draws.empty()) return nullptr;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double sum = 0.0;
  for (const auto& d : draws) {
    lo = std::min(lo, d.log_posterior);
    hi = std::max(hi, d.log_posterior);
    sum += d.log_posterior;
  }
  const double mean = sum / static_cast<double>(draws.size());
  return json{{"count", draws.size()},
              {"mean", mean},
              {"min", lo},
              {"max", hi},
              {"first", draws.front().log_posterior},
              {"last", draws.back().log_posterior},
              {"finite", std::isfinite(lo) && std::isfinite(hi)}};
}

}  // namespace

void write_estimate_outputs(const std::string& dir, const RunConfig& cfg,
                            const EstimateResult& result) {
  const fs::path root(dir);
  fs::create_directories(root);
  const auto& s = result.summary;

  {
    auto out = open_out(root / "surface.csv");
    out << "u,lambda,mean,median,q05,q95\n";
    for (std::size_t i = 0; i < s.time_grid.size(); ++i) {
      for (std::size_t j = 0; j < s.freq_grid.size(); ++j) {
        const auto k = s.index(i, j);
        write_row(out, {s.time_grid[i], s.freq_grid[j], s.mean[k], s.median[k], s.q05[k], s.q95[k]});
      }
    }
  }

  if (cfg.save_draws) {
    auto out = open_out(root / "draws.csv");
    const std::size_t L = result.chain.truncation;
    out << "draw,k1,k2,tau,log_tau,log_likelihood,log_posterior";
    for (std::size_t l = 1; l <= L; ++l) out << ",V_" << l;
    for (std::size_t l = 0; l <= L; ++l) out << ",Wt_" << l;
    for (std::size_t l = 0; l <= L; ++l) out << ",Wf_" << l;
    out << '\n';
    std::vector<double> row;
    for (std::size_t d = 0; d < result.chain.draws.size(); ++d) {
      const auto& draw = result.chain.draws[d];
      const auto& p = draw.params;
      row.assign({static_cast<double>(d + 1), static_cast<double>(p.k1),
                  static_cast<double>(p.k2), p.tau, draw.log_tau, draw.log_likelihood,
                  draw.log_posterior});
      row.insert(row.end(), p.measure.sticks.begin(), p.measure.sticks.end());
      row.insert(row.end(), p.measure.atom_time.begin(), p.measure.atom_time.end());
      row.insert(row.end(), p.measure.atom_freq.begin(), p.measure.atom_freq.end());
      write_row(out, row);
    }
  }

  json meta;
  meta["software"] = {{"name", "tvspec"}, {"version", kVersion}};
  meta["config"] = cfg;
  meta["seed"] = cfg.sampler.seed;
  meta["data"] = {{"original_length", result.original_length},
                  {"effective_length", result.periodograms.length},
                  {"grid_entries", result.grid.entries.size()},
                  {"grid_blocks", result.grid.blocks}};
  meta["truncation"] = {{"L", result.chain.truncation},
                        {"overridden", cfg.prior.truncation_override.has_value()}};
  meta["sampler_constants"] = {{"safe_proposal_sd", kSafeProposalSd},
                               {"adaptive_scale", kAdaptiveScale},
                               {"covariance_jitter", kCovarianceJitter},
                               {"adapt_mix_weight", cfg.sampler.adapt_mix_weight},
                               {"adapt_start", cfg.sampler.adapt_start},
                               {"tau_width_final", result.chain.tau_width}};
  meta["acceptance"] = {{"burn_in", acceptance_json(result.chain.burn_in_acceptance)},
                        {"post_burn_in", acceptance_json(result.chain.acceptance)}};
  meta["runtime_seconds"] = result.chain.runtime_seconds;
  meta["draw_count"] = s.draw_count;
  meta["bayes_factor_01"] = s.bayes_factor_01;
  meta["prior_prob_k1_equals_1"] = prior_prob_k1_equals_1(cfg.prior);
  meta["k1_pmf"] = s.k1_pmf;
  meta["k2_pmf"] = s.k2_pmf;
  meta["log_posterior_trace"] = trace_summary(result.chain.draws);
  meta["quantiles"] = {{"q05", "nearest rank: sorted[ceil(0.05 n) - 1]"},
                       {"q95", "nearest rank: sorted[ceil(0.95 n) - 1]"},
                       {"median", "mean of the two middle order statistics for even n"}};
  meta["time_axis"] =
      "u is rescaled time on the observed series; values outside [m/N, 1 - m/N] reuse the "
      "boundary estimate";
  if (cfg.truth) {
    const auto model = require_dgp(*cfg.truth);
    const auto report = posterior_mean_ase(result, model, cfg.prior.basis);
    meta["ase"] = {{"dgp", *cfg.truth}, {"full", report.full}, {"interior", report.interior}};
  }
  auto out = open_out(root / "metadata.json");
  out << meta.dump(2) << '\n';
}

namespace {

struct SimulateArgs {
  std::string dgp;
  std::string innov = "a";
  std::size_t length = 1500;
  std::optional<std::uint64_t> seed;
  std::string output;
};

int cmd_simulate(const SimulateArgs& a, std::ostream& out) {
  DgpSpec spec;
  spec.model = require_dgp(a.dgp);
  spec.innovation = require_innovation(a.innov);
  spec.length = a.length;
  const auto seed = resolve_seed(a.seed);
  Rng rng(seed);
  const auto series = simulate_dgp(spec, rng);
  auto file = open_out(a.output);
  file << "x\n";
  for (double v : series.values()) file << format_number(v) << '\n';
  out << "seed " << seed << '\n';
  return kExitOk;
}

struct PeriodogramArgs {
  std::string input;
  std::size_t m = 50;
  std::string output;
};

int cmd_periodogram(const PeriodogramArgs& a) {
  const TimeSeries series(read_series_csv(a.input));
  const auto pg = moving_periodograms(series, WindowConfig{a.m});
  auto file = open_out(a.output);
  file << "t,u,lambda_index,lambda,MI\n";
  for (std::size_t t = 1; t <= pg.length; ++t) {
    const auto j = mod_index(t, pg.m);
    write_row(file, {static_cast<double>(t), static_cast<double>(t) / static_cast<double>(pg.length),
                     static_cast<double>(j), pg.frequencies[j - 1], pg.ordinate(t)});
  }
  return kExitOk;
}

int cmd_estimate(RunConfig cfg, std::ostream& out, std::ostream& err) {
  if (cfg.input.empty()) throw UsageError("estimate needs --input (or \"input\" in --config)");
  if (cfg.chains == 0) throw UsageError("--chains must be at least 1");
  if (cfg.thinning < 1 || cfg.thinning > 3) throw UsageError("--thinning must be 1, 2 or 3");
  if (cfg.truth) require_dgp(*cfg.truth);
  try {
    cfg.prior.validate();
    cfg.sampler.validate();
  } catch (const InvalidArgument& e) {
    throw UsageError(e.what());
  }
  const TimeSeries series(read_series_csv(cfg.input));
  if (series.size() < min_series_length(cfg.m)) {
    throw DataError("series has " + std::to_string(series.size()) +
                    " values; m = " + std::to_string(cfg.m) + " needs at least " +
                    std::to_string(min_series_length(cfg.m)));
  }
  const auto base = cfg.to_estimate_config(series.size());

  if (cfg.chains == 1) {
    const auto result = estimate(series, base);
    write_estimate_outputs(cfg.output_dir, cfg, result);
    out << "draws " << result.summary.draw_count << '\n';
    out << "bayes_factor_01 " << format_number(result.summary.bayes_factor_01) << '\n';
    out << "output " << cfg.output_dir << '\n';
    return kExitOk;
  }

  // independent chains, seed + c, each in its own subdirectory
  std::vector<EstimateResult> results(cfg.chains);
  std::vector<std::exception_ptr> errors(cfg.chains);
  std::vector<std::thread> workers;
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    workers.emplace_back([&, c] {
      try {
        auto ecfg = base;
        ecfg.sampler.seed = cfg.sampler.seed + c;
        results[c] = estimate(series, ecfg);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    });
  }
  for (auto& w : workers) w.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  json index = json::array();
  for (std::size_t c = 0; c < cfg.chains; ++c) {
    auto ccfg = cfg;
    ccfg.sampler.seed = cfg.sampler.seed + c;
    ccfg.chains = 1;
    const auto dir = (fs::path(cfg.output_dir) / ("chain_" + std::to_string(c))).string();
    ccfg.output_dir = dir;
    write_estimate_outputs(dir, ccfg, results[c]);
    index.push_back({{"chain", c}, {"seed", ccfg.sampler.seed}, {"dir", "chain_" + std::to_string(c)},
                     {"bayes_factor_01", results[c].summary.bayes_factor_01}});
    out << "chain " << c << " bayes_factor_01 "
        << format_number(results[c].summary.bayes_factor_01) << '\n';
  }
  auto file = open_out(fs::path(cfg.output_dir) / "chains.json");
  file << json{{"software", {{"name", "tvspec"}, {"version", kVersion}}},
               {"config", cfg},
               {"chains", index}}
              .dump(2)
       << '\n';
  (void)err;
  return kExitOk;
}

struct AseArgs {
  std::string surface;
  std::string dgp;
  std::string column = "mean";
  std::size_t m = 50;
};

constexpr std::size_t kAseK = 99;

int cmd_ase(const AseArgs& a, std::ostream& out) {
  const auto model = require_dgp(a.dgp);
  const auto table = read_table_csv(a.surface);
  const auto& u = table.column("u");
  const auto& lam = table.column("lambda");
  const auto& est = table.column(a.column);
  const std::size_t rows = table.rows();
  if (rows == 0 || rows % (kAseK + 1) != 0) {
    throw DataError("surface has " + std::to_string(rows) + " rows; the ASE grid needs T x " +
                    std::to_string(kAseK + 1));
  }
  const std::size_t T = rows / (kAseK + 1);
  const auto times = ase_time_grid(T);
  const auto freqs = ase_freq_grid(kAseK);
  std::vector<double> truth(rows);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t j = 0; j <= kAseK; ++j) {
      const auto k = t * (kAseK + 1) + j;
      if (std::abs(u[k] - times[t]) > 1e-9 || std::abs(lam[k] - freqs[j]) > 1e-9) {
        throw DataError("grid mismatch at row " + std::to_string(k + 2) +
                        ": expected (u, lambda) = (t / T, j / 99) with T = " + std::to_string(T));
      }
      truth[k] = true_tv_psd(model, times[t], freqs[j]);
    }
  }
  out << "ase " << format_number(ase_from_values(est, truth, T, kAseK)) << '\n';
  if (2 * a.m < T) {
    out << "ase_interior "
        << format_number(ase_from_values(est, truth, T, kAseK, {a.m, T - a.m})) << '\n';
  }
  return kExitOk;
}

struct TruthArgs {
  std::string dgp;
  std::size_t length = 1500;
  std::string output;
};

int cmd_truth(const TruthArgs& a) {
  const auto model = require_dgp(a.dgp);
  if (a.length == 0) throw UsageError("--T must be positive");
  const auto times = ase_time_grid(a.length);
  const auto freqs = ase_freq_grid(kAseK);
  auto file = open_out(a.output);
  file << "u,lambda,mean\n";
  for (double u : times) {
    for (double l : freqs) write_row(file, {u, l, true_tv_psd(model, u, l)});
  }
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Bayesian estimation of time-varying spectral densities"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "Simulate a series from a named DGP");
  simulate->add_option("--dgp", sim.dgp, "LS1|LS2|LS3|PS1|S1|S2")->required();
  simulate->add_option("--innov", sim.innov, "Innovation family a|b|c");
  simulate->add_option("--T", sim.length, "Series length")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", sim.seed, "RNG seed (falls back to TVSPEC_SEED)");
  simulate->add_option("--output,-o", sim.output, "Output CSV")->required();

  PeriodogramArgs pga;
  auto* periodogram = app.add_subcommand("periodogram", "Moving periodogram ordinates");
  periodogram->add_option("--input", pga.input, "Input CSV (first column)")->required();
  periodogram->add_option("--m", pga.m, "Half-window")->check(CLI::PositiveNumber);
  periodogram->add_option("--output,-o", pga.output, "Output CSV")->required();

  RunConfig rc;
  std::string config_path;
  std::optional<std::uint64_t> est_seed;
  std::optional<std::size_t> est_L;
  auto* est = app.add_subcommand("estimate", "Run the sampler and summarize the posterior");
  est->add_option("--config", config_path, "JSON run config; flags override its fields");
  est->add_option("--input", rc.input, "Input CSV (first column)");
  est->add_option("--m", rc.m, "Half-window")->check(CLI::PositiveNumber);
  est->add_option("--thinning", rc.thinning, "Likelihood thinning factor")
      ->check(CLI::IsMember({1, 2, 3}));
  est->add_option("--iters", rc.sampler.n_iter, "MCMC iterations");
  est->add_option("--burnin", rc.sampler.burn_in, "Burn-in iterations");
  est->add_option("--thin", rc.sampler.mcmc_thin, "Keep every n-th draw after burn-in")
      ->check(CLI::PositiveNumber);
  est->add_option("--seed", est_seed, "RNG seed (falls back to TVSPEC_SEED)");
  est->add_option("--kmax", rc.prior.k_max, "Largest polynomial degree")
      ->check(CLI::PositiveNumber);
  std::string degree_tail;
  est->add_option("--degree-tail", degree_tail, "Degree prior beyond k_max: threshold|renormalize")
      ->check(CLI::IsMember({"threshold", "renormalize"}));
  est->add_option("--xi-l", rc.prior.basis.xi_left, "Left truncation point");
  est->add_option("--xi-r", rc.prior.basis.xi_right, "Right truncation point");
  est->add_option("--truncation-L", est_L, "Stick-breaking truncation level")
      ->check(CLI::PositiveNumber);
  est->add_option("--time-grid", rc.time_grid, "Number of time points")
      ->check(CLI::PositiveNumber);
  est->add_option("--freq-grid", rc.freq_grid, "Number of frequency points")
      ->check(CLI::PositiveNumber);
  est->add_flag("--ase-grid", rc.ase_grid, "Use the N x 100 grid (t/N, j/99)");
  est->add_option("--output-dir", rc.output_dir, "Output directory");
  est->add_flag("--save-draws", rc.save_draws, "Write retained draws to draws.csv");
  est->add_option("--chains", rc.chains, "Independent chains run concurrently")
      ->check(CLI::PositiveNumber);
  est->add_option("--truth", rc.truth, "DGP name; adds the posterior-mean ASE to metadata");

  AseArgs asa;
  auto* ase_cmd = app.add_subcommand("ase", "ASE of a surface CSV against a DGP's true tv-PSD");
  ase_cmd->add_option("--surface", asa.surface, "Surface CSV on the (t/T, j/99) grid")
      ->required();
  ase_cmd->add_option("--dgp", asa.dgp, "LS1|LS2|LS3|PS1|S1|S2")->required();
  ase_cmd->add_option("--column", asa.column, "Surface column to score");
  ase_cmd->add_option("--m", asa.m, "Half-window for the interior ASE");

  TruthArgs tra;
  auto* truth = app.add_subcommand("truth", "True tv-PSD of a DGP on the (t/T, j/99) grid");
  truth->add_option("--dgp", tra.dgp, "LS1|LS2|LS3|PS1|S1|S2")->required();
  truth->add_option("--T", tra.length, "Series length")->check(CLI::PositiveNumber);
  truth->add_option("--output,-o", tra.output, "Output CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(sim, out);
    if (periodogram->parsed()) return cmd_periodogram(pga);
    if (ase_cmd->parsed()) return cmd_ase(asa, out);
    if (truth->parsed()) return cmd_truth(tra);
    if (est->parsed()) {
      RunConfig cfg;
      bool config_seed = false;
      if (!config_path.empty()) {
        std::ifstream in(config_path);
        if (!in) throw DataError("cannot open config '" + config_path + "'");
        json doc;
        try {
          in >> doc;
          cfg = doc.get<RunConfig>();
          config_seed = doc.contains("sampler") && doc["sampler"].contains("seed") &&
                        !doc["sampler"]["seed"].is_null();
        } catch (const json::exception& e) {
          throw UsageError("bad config '" + config_path + "': " + e.what());
        } catch (const std::invalid_argument& e) {
          throw UsageError("bad config '" + config_path + "': " + e.what());
        }
      }
      // explicit flags win over the config document
      auto given = [&](const char* name) { return est->count(name) > 0; };
      if (given("--input")) cfg.input = rc.input;
      if (given("--m")) cfg.m = rc.m;
      if (given("--thinning")) cfg.thinning = rc.thinning;
      if (given("--iters")) cfg.sampler.n_iter = rc.sampler.n_iter;
      if (given("--burnin")) cfg.sampler.burn_in = rc.sampler.burn_in;
      if (given("--thin")) cfg.sampler.mcmc_thin = rc.sampler.mcmc_thin;
      if (given("--kmax")) cfg.prior.k_max = rc.prior.k_max;
      if (given("--degree-tail")) {
        cfg.prior.degree_tail =
            degree_tail == "threshold" ? DegreeTail::Threshold : DegreeTail::Renormalize;
      }
      if (given("--xi-l")) cfg.prior.basis.xi_left = rc.prior.basis.xi_left;
      if (given("--xi-r")) cfg.prior.basis.xi_right = rc.prior.basis.xi_right;
      if (est_L) cfg.prior.truncation_override = est_L;
      if (given("--time-grid")) cfg.time_grid = rc.time_grid;
      if (given("--freq-grid")) cfg.freq_grid = rc.freq_grid;
      if (given("--ase-grid")) cfg.ase_grid = rc.ase_grid;
      if (given("--output-dir")) cfg.output_dir = rc.output_dir;
      if (given("--save-draws")) cfg.save_draws = rc.save_draws;
      if (given("--chains")) cfg.chains = rc.chains;
      if (given("--truth")) cfg.truth = rc.truth;
      if (est_seed || !config_seed) cfg.sampler.seed = resolve_seed(est_seed);
      return cmd_estimate(cfg, out, err);
    }
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitUsage;
}

int run_cli(int argc, const char* const* argv) { return run_cli(argc, argv, std::cout, std::cerr); }

}  // namespace tvspec::cli
