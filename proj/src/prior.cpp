#include "tvspec/prior.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "tvspec/errors.hpp"

namespace tvspec {

void PriorConfig::validate() const {
  if (k_max < 1) throw InvalidArgument("k_max must be at least 1");
  if (!(degree_decay >= 0.0)) throw InvalidArgument("degree decay must be nonnegative");
  if (degree_tail == DegreeTail::Threshold && !(degree_decay > 0.0)) {
    throw InvalidArgument("a thresholded degree prior needs a positive decay (the tail must be summable)");
  }
  if (!(dp_mass > 0.0)) throw InvalidArgument("Dirichlet process mass must be positive");
  if (!(tau_shape > 0.0) || !(tau_rate > 0.0)) {
    throw InvalidArgument("Inverse-Gamma shape and rate must be positive");
  }
  if (truncation_override && *truncation_override < 1) {
    throw InvalidArgument("truncation level must be at least 1");
  }
  basis.validate();
}

namespace {

double unnormalized_log_rho(std::size_t k, double decay) {
  const double dk = static_cast<double>(k);
  return -decay * dk * std::log(dk);
}

}  // namespace

std::vector<double> degree_log_pmf(const PriorConfig& cfg) {
  std::vector<double> logp(cfg.k_max);
  for (std::size_t k = 1; k <= cfg.k_max; ++k) {
    logp[k - 1] = unnormalized_log_rho(k, cfg.degree_decay);
  }
  const double peak = *std::max_element(logp.begin(), logp.end());
  double total = 0.0;
  for (double v : logp) total += std::exp(v - peak);
  double tail = 0.0;
  if (cfg.degree_tail == DegreeTail::Threshold) {
    // terms decrease for k >= 1 once decay > 0
    for (std::size_t k = cfg.k_max + 1;; ++k) {
      const double term = std::exp(unnormalized_log_rho(k, cfg.degree_decay) - peak);
      tail += term;
      if (term < 1e-18 * (total + tail)) break;
    }
  }
  const double log_norm = peak + std::log(total + tail);
  for (double& v : logp) v -= log_norm;
  if (tail > 0.0) {
    const double top = std::exp(logp.back() + log_norm - peak) + tail;
    logp.back() = peak + std::log(top) - log_norm;
  }
  return logp;
}

double prior_prob_k1_equals_1(const PriorConfig& cfg) {
  return std::exp(degree_log_pmf(cfg).front());
}

std::size_t truncation_level(const PriorConfig& cfg, std::size_t m, std::size_t blocks) {
  if (cfg.truncation_override) return *cfg.truncation_override;
  const double root = std::cbrt(static_cast<double>(m * blocks));
  const auto rule = static_cast<std::size_t>(std::ceil(root - 1e-12));
  return std::max(cfg.min_truncation, rule);
}

double log_tau_prior(double log_tau, const PriorConfig& cfg) {
  const double a = cfg.tau_shape;
  const double b = cfg.tau_rate;
  return a * std::log(b) - std::lgamma(a) - (a + 1.0) * log_tau - b * std::exp(-log_tau);
}

double log_prior(const SurfaceParams& params, const PriorConfig& cfg) {
  if (params.k1 < 1 || params.k1 > cfg.k_max || params.k2 < 1 || params.k2 > cfg.k_max) {
    throw InvalidArgument("Bernstein degree outside 1..k_max");
  }
  const double mass = cfg.dp_mass;
  double total = 0.0;
  for (double v : params.measure.sticks) {
    total += (mass - 1.0) * std::log1p(-v) + std::log(mass);
  }
  const auto logp = degree_log_pmf(cfg);
  total += logp[params.k1 - 1] + logp[params.k2 - 1];
  total += log_tau_prior(std::log(params.tau), cfg);
  return total;
}

std::size_t sample_degree(const std::vector<double>& log_pmf, Rng& rng) {
  std::vector<double> weights(log_pmf.size());
  std::transform(log_pmf.begin(), log_pmf.end(), weights.begin(),
                 [](double v) { return std::exp(v); });
  std::discrete_distribution<std::size_t> dist(weights.begin(), weights.end());
  return dist(rng) + 1;
}

double sample_log_tau(const PriorConfig& cfg, Rng& rng) {
  // Gamma(a) = Gamma(a + 1) * U^{1/a}, kept in logs so tiny shapes do not underflow.
  std::gamma_distribution<double> gamma(cfg.tau_shape + 1.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = 0.0;
  while (u == 0.0) u = unif(rng);
  const double log_gamma_draw = std::log(gamma(rng)) + std::log(u) / cfg.tau_shape;
  return std::log(cfg.tau_rate) - log_gamma_draw;
}

PriorDraw sample_prior(const PriorConfig& cfg, std::size_t m, std::size_t blocks, Rng& rng) {
  cfg.validate();
  const auto logp = degree_log_pmf(cfg);
  PriorDraw draw;
  auto& p = draw.params;
  p.basis = cfg.basis;
  p.k1 = sample_degree(logp, rng);
  p.k2 = sample_degree(logp, rng);
  const std::size_t L = truncation_level(cfg, m, blocks);

  std::gamma_distribution<double> g1(1.0, 1.0);
  std::gamma_distribution<double> gm(cfg.dp_mass, 1.0);
  p.measure.sticks.resize(L);
  for (auto& v : p.measure.sticks) {
    // Beta(1, M) via gamma ratio; resample the measure-zero endpoints.
    do {
      const double x = g1(rng);
      const double y = gm(rng);
      v = x / (x + y);
    } while (!(v > 0.0 && v < 1.0));
  }
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  p.measure.atom_time.resize(L + 1);
  p.measure.atom_freq.resize(L + 1);
  for (std::size_t l = 0; l <= L; ++l) {
    p.measure.atom_time[l] = unif(rng);
    p.measure.atom_freq[l] = unif(rng);
  }
  draw.log_tau = sample_log_tau(cfg, rng);
  p.tau = std::exp(draw.log_tau);
  return draw;
}

}  // namespace tvspec
