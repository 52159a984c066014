#include "run_config.hpp"

#include "tvspec/inference.hpp"

namespace tvspec::cli {

using nlohmann::json;

EstimateConfig RunConfig::to_estimate_config(std::size_t n) const {
  EstimateConfig cfg;
  cfg.window.m = m;
  cfg.thinning = thinning;
  cfg.prior = prior;
  cfg.sampler = sampler;
  if (ase_grid) {
    cfg.time_grid = ase_time_grid(n);
    cfg.freq_grid = ase_freq_grid(99);
  } else {
    cfg.time_grid = uniform_grid(time_grid);
    cfg.freq_grid = uniform_grid(freq_grid);
  }
  return cfg;
}

void to_json(json& j, const RunConfig& cfg) {
  const auto& p = cfg.prior;
  const auto& s = cfg.sampler;
  j = json{
      {"input", cfg.input},
      {"output_dir", cfg.output_dir},
      {"m", cfg.m},
      {"thinning", cfg.thinning},
      {"time_grid", cfg.time_grid},
      {"freq_grid", cfg.freq_grid},
      {"ase_grid", cfg.ase_grid},
      {"save_draws", cfg.save_draws},
      {"chains", cfg.chains},
      {"truth", cfg.truth ? json(*cfg.truth) : json(nullptr)},
      {"prior",
       {{"k_max", p.k_max},
        {"degree_decay", p.degree_decay},
        {"degree_tail", p.degree_tail == DegreeTail::Threshold ? "threshold" : "renormalize"},
        {"dp_mass", p.dp_mass},
        {"tau_shape", p.tau_shape},
        {"tau_rate", p.tau_rate},
        {"xi_left", p.basis.xi_left},
        {"xi_right", p.basis.xi_right},
        {"min_truncation", p.min_truncation},
        {"truncation_override",
         p.truncation_override ? json(*p.truncation_override) : json(nullptr)}}},
      {"sampler",
       {{"n_iter", s.n_iter},
        {"burn_in", s.burn_in},
        {"mcmc_thin", s.mcmc_thin},
        {"k_poisson_rate", s.k_poisson_rate},
        {"adapt_start", s.adapt_start},
        {"adapt_mix_weight", s.adapt_mix_weight},
        {"tau_width_init", s.tau_width_init},
        {"tau_target_accept", s.tau_target_accept},
        {"seed", s.seed},
        {"k_init", s.k_init},
        {"stick_init", s.stick_init},
        {"tau_init", s.tau_init ? json(*s.tau_init) : json(nullptr)},
        {"basis_cache_capacity", s.basis_cache_capacity}}},
  };
}

namespace {

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (auto it = j.find(key); it != j.end() && !it->is_null()) out = it->get<T>();
}

template <typename T>
void read(const json& j, const char* key, std::optional<T>& out) {
  if (auto it = j.find(key); it != j.end()) {
    if (it->is_null()) {
      out.reset();
    } else {
      out = it->get<T>();
    }
  }
}

}  // namespace

void from_json(const json& j, RunConfig& cfg) {
  read(j, "input", cfg.input);
  read(j, "output_dir", cfg.output_dir);
  read(j, "m", cfg.m);
  read(j, "thinning", cfg.thinning);
  read(j, "time_grid", cfg.time_grid);
  read(j, "freq_grid", cfg.freq_grid);
  read(j, "ase_grid", cfg.ase_grid);
  read(j, "save_draws", cfg.save_draws);
  read(j, "chains", cfg.chains);
  read(j, "truth", cfg.truth);
  if (auto it = j.find("prior"); it != j.end()) {
    auto& p = cfg.prior;
    read(*it, "k_max", p.k_max);
    read(*it, "degree_decay", p.degree_decay);
    if (auto t = it->find("degree_tail"); t != it->end() && !t->is_null()) {
      const auto name = t->get<std::string>();
      if (name == "threshold") {
        p.degree_tail = DegreeTail::Threshold;
      } else if (name == "renormalize") {
        p.degree_tail = DegreeTail::Renormalize;
      } else {
        throw std::invalid_argument("degree_tail must be \"threshold\" or \"renormalize\"");
      }
    }
    read(*it, "dp_mass", p.dp_mass);
    read(*it, "tau_shape", p.tau_shape);
    read(*it, "tau_rate", p.tau_rate);
    read(*it, "xi_left", p.basis.xi_left);
    read(*it, "xi_right", p.basis.xi_right);
    read(*it, "min_truncation", p.min_truncation);
    read(*it, "truncation_override", p.truncation_override);
  }
  if (auto it = j.find("sampler"); it != j.end()) {
    auto& s = cfg.sampler;
    read(*it, "n_iter", s.n_iter);
    read(*it, "burn_in", s.burn_in);
    read(*it, "mcmc_thin", s.mcmc_thin);
    read(*it, "k_poisson_rate", s.k_poisson_rate);
    read(*it, "adapt_start", s.adapt_start);
    read(*it, "adapt_mix_weight", s.adapt_mix_weight);
    read(*it, "tau_width_init", s.tau_width_init);
    read(*it, "tau_target_accept", s.tau_target_accept);
    read(*it, "seed", s.seed);
    read(*it, "k_init", s.k_init);
    read(*it, "stick_init", s.stick_init);
    read(*it, "tau_init", s.tau_init);
    read(*it, "basis_cache_capacity", s.basis_cache_capacity);
  }
}

}  // namespace tvspec::cli
