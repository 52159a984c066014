#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "tvspec/likelihood.hpp"
#include "tvspec/prior.hpp"
#include "tvspec/signal.hpp"
#include "tvspec/surface.hpp"

namespace tvspec {

struct SamplerConfig {
  std::size_t n_iter = 110000;
  std::size_t burn_in = 60000;
  std::size_t mcmc_thin = 5;
  double k_poisson_rate = 1.0;
  std::size_t adapt_start = 200;
  double adapt_mix_weight = 0.05;
  double tau_width_init = 1.0;
  double tau_target_accept = 0.44;
  std::uint64_t seed = 1;
  /// false runs the chain on the prior alone.
  bool use_likelihood = true;
  std::size_t k_init = 20;
  double stick_init = 0.5;
  /// Defaults to the mean moving periodogram ordinate (1 without data).
  std::optional<double> tau_init;
  std::size_t basis_cache_capacity = 16;
  /// Every n iterations compare the cached log-posterior with a full
  /// recomputation and throw on drift above 1e-8. 0 disables.
  std::size_t verify_every = 0;
  std::size_t progress_every = 0;

  void validate() const;
};

enum class Block { AtomTime, AtomFreq, Sticks };

/// Proposal scale of the non-adaptive safe component, per coordinate
/// variance 0.01^2 / d.
inline constexpr double kSafeProposalSd = 0.01;
/// Optimal random-walk scaling 2.38^2 / d for the adaptive component.
inline constexpr double kAdaptiveScale = 2.38;
inline constexpr double kCovarianceJitter = 1e-10;

/// Per-block counters of proposals and acceptances.
struct MoveCounter {
  std::size_t proposed = 0;
  std::size_t accepted = 0;

  [[nodiscard]] double rate() const noexcept {
    return proposed == 0 ? 0.0 : static_cast<double>(accepted) / static_cast<double>(proposed);
  }
};

struct AcceptanceStats {
  MoveCounter k1, k2, atom_time, atom_freq, sticks, tau;
};

struct Draw {
  SurfaceParams params;
  double log_tau = 0.0;
  double log_likelihood = 0.0;
  /// Log-likelihood plus natural-scale log prior.
  double log_posterior = 0.0;
};

struct ChainProgress {
  std::size_t iteration = 0;
  std::size_t n_iter = 0;
  double log_posterior = 0.0;
  const AcceptanceStats* acceptance = nullptr;
};

using ProgressHook = std::function<void(const ChainProgress&)>;

struct ChainResult {
  std::vector<Draw> draws;
  std::size_t truncation = 0;
  AcceptanceStats burn_in_acceptance;
  AcceptanceStats acceptance;  ///< after burn-in
  double tau_width = 0.0;      ///< frozen width of the ln tau proposal
  double runtime_seconds = 0.0;
  double max_cache_drift = 0.0;
};

/// Running mean and covariance of one block's transformed coordinates.
class BlockAdaptation {
 public:
  explicit BlockAdaptation(std::size_t dim);

  void update(std::span<const double> z);
  [[nodiscard]] std::size_t count() const noexcept { return count_; }
  [[nodiscard]] Eigen::MatrixXd covariance() const;
  [[nodiscard]] const Eigen::VectorXd& mean() const noexcept { return mean_; }

 private:
  std::size_t count_ = 0;
  Eigen::VectorXd mean_;
  Eigen::MatrixXd m2_;
};

/// Random-walk increment for one block: with probability 1 - adapt_mix_weight
/// (once iteration >= adapt_start) N(0, 2.38^2 / d (Sigma + 1e-10 I)) from the
/// running covariance, otherwise N(0, 0.01^2 / d I).
Eigen::VectorXd propose_block_step(const BlockAdaptation& adaptation, std::size_t iteration,
                                   const SamplerConfig& cfg, Rng& rng);

/// State of one blocked Metropolis-Hastings chain over (k1, k2, W1, W2, V, ln tau).
///
/// W and V live on the logit scale and tau on the log scale; the target on
/// those coordinates carries the transform Jacobians. A null evaluator runs
/// the chain on the prior alone.
class Chain {
 public:
  Chain(const PriorConfig& prior, const SamplerConfig& cfg, std::size_t truncation,
        WhittleEvaluator* evaluator, Rng& rng);

  bool step_degree(int which, Rng& rng);
  bool step_block(Block block, Rng& rng);
  bool step_tau(Rng& rng);
  /// One full sweep followed by the adaptation updates for this iteration.
  void sweep(Rng& rng);

  /// MH decision for explicit proposals; `which` is 1 (time) or 2 (frequency).
  bool try_degree(int which, long proposal, Rng& rng);
  bool try_block(Block block, std::span<const double> z_proposal, Rng& rng);
  bool try_log_tau(double proposal, Rng& rng);

  [[nodiscard]] double log_target() const noexcept;
  /// Rebuilds every cached term from the current parameters.
  [[nodiscard]] double recompute_log_target();

  [[nodiscard]] Draw draw() const;
  [[nodiscard]] SurfaceParams params() const;
  [[nodiscard]] std::size_t k1() const noexcept { return k1_; }
  [[nodiscard]] std::size_t k2() const noexcept { return k2_; }
  [[nodiscard]] double log_tau() const noexcept { return log_tau_; }
  [[nodiscard]] std::span<const double> block_coordinates(Block block) const noexcept;
  [[nodiscard]] double tau_width() const noexcept { return tau_width_; }
  void set_tau_width(double w) noexcept { tau_width_ = w; }
  [[nodiscard]] std::size_t iteration() const noexcept { return iteration_; }
  [[nodiscard]] const AcceptanceStats& acceptance() const noexcept { return acceptance_; }
  void reset_acceptance() noexcept { acceptance_ = {}; }
  [[nodiscard]] const BlockAdaptation& adaptation(Block block) const noexcept;
  [[nodiscard]] std::size_t truncation() const noexcept { return sticks_z_.size(); }

 private:
  struct Terms {
    MixtureStats stats;
    double degree = 0.0;
    double atom_time = 0.0;
    double atom_freq = 0.0;
    double sticks = 0.0;
    double tau = 0.0;
  };

  [[nodiscard]] double total(const Terms& t, double log_tau) const;
  [[nodiscard]] MixtureStats compute_stats(std::size_t k1, std::size_t k2,
                                           std::span<const double> weights,
                                           std::span<const double> atom_time,
                                           std::span<const double> atom_freq) const;
  [[nodiscard]] double atom_term(std::span<const double> z) const;
  [[nodiscard]] double stick_term(std::span<const double> z) const;
  [[nodiscard]] double degree_term(std::size_t k1, std::size_t k2) const;
  [[nodiscard]] double tau_term(double log_tau) const;
  static bool accept(double log_ratio, Rng& rng);
  MoveCounter& counter_for(Block block) noexcept;

  PriorConfig prior_;
  SamplerConfig cfg_;
  WhittleEvaluator* evaluator_;
  std::vector<double> log_rho_;

  std::size_t k1_;
  std::size_t k2_;
  double log_tau_;
  std::vector<double> atom_time_z_, atom_freq_z_, sticks_z_;
  std::vector<double> atom_time_, atom_freq_, sticks_, weights_;
  Terms terms_;

  std::array<BlockAdaptation, 3> adaptation_;
  double tau_width_;
  std::size_t iteration_ = 0;
  AcceptanceStats acceptance_;
};

/// Runs n_iter sweeps and keeps every mcmc_thin-th post-burn-in state.
/// With use_likelihood = false the periodograms only size the truncation
/// level and the tau initialization.
ChainResult run_chain(const MovingPeriodogramSet& periodograms, const LikelihoodGrid& grid,
                      const PriorConfig& prior, const SamplerConfig& cfg, Rng& rng,
                      const ProgressHook& progress = {});

}  // namespace tvspec
