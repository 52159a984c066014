#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "tvspec/signal.hpp"
#include "tvspec/surface.hpp"

namespace tvspec {

/// How the degree prior rho(k) on 1, 2, ... is cut at k_max.
enum class DegreeTail {
  Threshold,    ///< k is capped at k_max: the mass of k > k_max sits on k_max
  Renormalize,  ///< rho restricted to 1..k_max and renormalized
};

/// Hyperparameters of the bivariate Bernstein-Dirichlet prior.
///
/// Degrees follow rho(k) proportional to exp(-degree_decay * k ln k), cut at
/// k_max according to `degree_tail`. The Dirichlet process has mass `dp_mass` and a uniform base
/// measure on the unit square. tau is Inverse-Gamma with density proportional
/// to tau^{-shape-1} exp(-rate / tau); the rate is the conventional IG "scale".
struct PriorConfig {
  std::size_t k_max = 100;
  double degree_decay = 0.01;
  DegreeTail degree_tail = DegreeTail::Threshold;
  double dp_mass = 1.0;
  double tau_shape = 0.001;
  double tau_rate = 0.001;
  BetaBasisConfig basis;
  std::size_t min_truncation = 20;
  std::optional<std::size_t> truncation_override;

  void validate() const;
};

/// Log pmf of the degree prior on 1..k_max; entry k - 1 is ln P(k).
std::vector<double> degree_log_pmf(const PriorConfig& cfg);

/// Pi_0(k1 = 1) = 1 / sum_k exp(-c k ln k), the sum running over all k >= 1
/// (Threshold) or over 1..k_max (Renormalize).
double prior_prob_k1_equals_1(const PriorConfig& cfg);

/// L = max{min_truncation, ceil((m B)^{1/3})} unless overridden.
std::size_t truncation_level(const PriorConfig& cfg, std::size_t m, std::size_t blocks);

/// Inverse-Gamma log density of tau, written in ln tau to stay finite when
/// tau itself overflows.
double log_tau_prior(double log_tau, const PriorConfig& cfg);

/// ln of the prior density on the natural scale:
/// (M-1) sum ln(1 - V_l) + L ln M + ln rho(k1) + ln rho(k2) + ln pi(tau).
/// The uniform base measure contributes zero.
double log_prior(const SurfaceParams& params, const PriorConfig& cfg);

struct PriorDraw {
  SurfaceParams params;  ///< params.tau = exp(log_tau); may be +inf for extreme draws
  double log_tau = 0.0;
};

std::size_t sample_degree(const std::vector<double>& log_pmf, Rng& rng);
/// ln tau for tau ~ Inverse-Gamma(shape, rate), drawn without forming tau.
double sample_log_tau(const PriorConfig& cfg, Rng& rng);

PriorDraw sample_prior(const PriorConfig& cfg, std::size_t m, std::size_t blocks, Rng& rng);

}  // namespace tvspec
