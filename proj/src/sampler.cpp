#include "tvspec/sampler.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "tvspec/errors.hpp"

namespace tvspec {

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

double logistic(double z) {
  return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double logit(double p) { return std::log(p) - std::log1p(-p); }

// ln sigma(z) + ln(1 - sigma(z)): the Jacobian of the logit transform.
double log_logit_jacobian(double z) { return -softplus(-z) - softplus(z); }

constexpr std::size_t block_index(Block b) noexcept { return static_cast<std::size_t>(b); }

}  // namespace

void SamplerConfig::validate() const {
  if (burn_in >= n_iter) throw InvalidArgument("burn-in must be smaller than the iteration count");
  if (mcmc_thin < 1) throw InvalidArgument("MCMC thinning interval must be at least 1");
  if (!(k_poisson_rate > 0.0)) throw InvalidArgument("Poisson rate must be positive");
  if (!(adapt_mix_weight >= 0.0 && adapt_mix_weight <= 1.0)) {
    throw InvalidArgument("adaptive mixture weight must lie in [0, 1]");
  }
  if (!(tau_width_init > 0.0)) throw InvalidArgument("tau proposal width must be positive");
  if (!(tau_target_accept > 0.0 && tau_target_accept < 1.0)) {
    throw InvalidArgument("target acceptance must lie in (0, 1)");
  }
  if (!(stick_init > 0.0 && stick_init < 1.0)) throw InvalidArgument("initial stick outside (0, 1)");
  if (tau_init && !(*tau_init > 0.0)) throw InvalidArgument("initial tau must be positive");
}

BlockAdaptation::BlockAdaptation(std::size_t dim)
    : mean_(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim))),
      m2_(Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(dim), static_cast<Eigen::Index>(dim))) {}

void BlockAdaptation::update(std::span<const double> z) {
  const Eigen::Map<const Eigen::VectorXd> x(z.data(), static_cast<Eigen::Index>(z.size()));
  ++count_;
  const Eigen::VectorXd delta = x - mean_;
  mean_ += delta / static_cast<double>(count_);
  m2_.noalias() += delta * (x - mean_).transpose();
}

Eigen::MatrixXd BlockAdaptation::covariance() const {
  if (count_ < 2) return Eigen::MatrixXd::Zero(m2_.rows(), m2_.cols());
  return m2_ / static_cast<double>(count_ - 1);
}

Chain::Chain(const PriorConfig& prior, const SamplerConfig& cfg, std::size_t truncation,
             WhittleEvaluator* evaluator, Rng& rng)
    : prior_(prior),
      cfg_(cfg),
      evaluator_(evaluator),
      log_rho_(degree_log_pmf(prior)),
      k1_(std::clamp<std::size_t>(cfg.k_init, 1, prior.k_max)),
      k2_(k1_),
      log_tau_(0.0),
      adaptation_{BlockAdaptation(truncation + 1), BlockAdaptation(truncation + 1),
                  BlockAdaptation(truncation)},
      tau_width_(cfg.tau_width_init) {
  prior_.validate();
  cfg_.validate();
  if (truncation < 1) throw InvalidArgument("truncation level must be at least 1");

  if (cfg_.tau_init) {
    log_tau_ = std::log(*cfg_.tau_init);
  } else if (evaluator_ != nullptr && evaluator_->mean_ordinate() > 0.0) {
    log_tau_ = std::log(evaluator_->mean_ordinate());
  }

  std::uniform_real_distribution<double> unif(0.0, 1.0);
  atom_time_.resize(truncation + 1);
  atom_freq_.resize(truncation + 1);
  for (std::size_t l = 0; l <= truncation; ++l) {
    // Atoms strictly inside (0, 1) so their logits exist.
    do atom_time_[l] = unif(rng); while (atom_time_[l] <= 0.0);
    do atom_freq_[l] = unif(rng); while (atom_freq_[l] <= 0.0);
  }
  sticks_.assign(truncation, cfg_.stick_init);
  auto to_logit = [](const std::vector<double>& v) {
    std::vector<double> z(v.size());
    std::transform(v.begin(), v.end(), z.begin(), logit);
    return z;
  };
  atom_time_z_ = to_logit(atom_time_);
  atom_freq_z_ = to_logit(atom_freq_);
  sticks_z_ = to_logit(sticks_);
  weights_ = stick_weights(sticks_);

  const double init = recompute_log_target();
  if (!std::isfinite(init)) {
    std::string culprit = "likelihood";
    if (!std::isfinite(terms_.tau)) culprit = "tau prior";
    if (!std::isfinite(terms_.degree)) culprit = "degree prior";
    throw InitializationError("non-finite log-posterior at initialization (" + culprit + ")");
  }
}

MixtureStats Chain::compute_stats(std::size_t k1, std::size_t k2, std::span<const double> weights,
                                  std::span<const double> atom_time,
                                  std::span<const double> atom_freq) const {
  if (evaluator_ == nullptr) return {};
  return evaluator_->mixture_stats(k1, k2, weights, atom_time, atom_freq);
}

double Chain::atom_term(std::span<const double> z) const {
  double s = 0.0;
  for (double v : z) s += log_logit_jacobian(v);
  return s;
}

double Chain::stick_term(std::span<const double> z) const {
  const double mass = prior_.dp_mass;
  double s = 0.0;
  for (double v : z) {
    // (M - 1) ln(1 - V) + ln M, plus the logit Jacobian.
    s += (mass - 1.0) * -softplus(v) + std::log(mass) + log_logit_jacobian(v);
  }
  return s;
}

double Chain::degree_term(std::size_t k1, std::size_t k2) const {
  return log_rho_[k1 - 1] + log_rho_[k2 - 1];
}

double Chain::tau_term(double log_tau) const {
  // Inverse-Gamma density of tau times the Jacobian tau of the log transform.
  return log_tau_prior(log_tau, prior_) + log_tau;
}

double Chain::total(const Terms& t, double log_tau) const {
  const double ll = evaluator_ == nullptr ? 0.0 : t.stats.log_likelihood(log_tau);
  return ll + t.degree + t.atom_time + t.atom_freq + t.sticks + t.tau;
}

double Chain::log_target() const noexcept { return total(terms_, log_tau_); }

double Chain::recompute_log_target() {
  terms_.stats = compute_stats(k1_, k2_, weights_, atom_time_, atom_freq_);
  terms_.degree = degree_term(k1_, k2_);
  terms_.atom_time = atom_term(atom_time_z_);
  terms_.atom_freq = atom_term(atom_freq_z_);
  terms_.sticks = stick_term(sticks_z_);
  terms_.tau = tau_term(log_tau_);
  return log_target();
}

bool Chain::accept(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  return std::log(unif(rng)) < log_ratio;
}

bool Chain::try_degree(int which, long proposal, Rng& rng) {
  MoveCounter& counter = which == 1 ? acceptance_.k1 : acceptance_.k2;
  ++counter.proposed;
  const std::size_t current = which == 1 ? k1_ : k2_;
  if (proposal < 1 || static_cast<std::size_t>(proposal) > prior_.k_max) return false;
  const auto k = static_cast<std::size_t>(proposal);
  if (k == current) {
    ++counter.accepted;
    return true;
  }
  Terms next = terms_;
  const std::size_t k1 = which == 1 ? k : k1_;
  const std::size_t k2 = which == 1 ? k2_ : k;
  try {
    next.stats = compute_stats(k1, k2, weights_, atom_time_, atom_freq_);
  } catch (const EvaluationError&) {
    return false;
  }
  next.degree = degree_term(k1, k2);
  if (!accept(total(next, log_tau_) - log_target(), rng)) return false;
  k1_ = k1;
  k2_ = k2;
  terms_ = next;
  ++counter.accepted;
  return true;
}

bool Chain::step_degree(int which, Rng& rng) {
  std::uniform_int_distribution<int> coin(0, 1);
  std::poisson_distribution<long> poisson(cfg_.k_poisson_rate);
  const long sign = coin(rng) == 0 ? -1 : 1;
  const long jump = poisson(rng);
  const auto current = static_cast<long>(which == 1 ? k1_ : k2_);
  return try_degree(which, current + sign * jump, rng);
}

MoveCounter& Chain::counter_for(Block block) noexcept {
  switch (block) {
    case Block::AtomTime: return acceptance_.atom_time;
    case Block::AtomFreq: return acceptance_.atom_freq;
    case Block::Sticks: break;
  }
  return acceptance_.sticks;
}

std::span<const double> Chain::block_coordinates(Block block) const noexcept {
  switch (block) {
    case Block::AtomTime: return atom_time_z_;
    case Block::AtomFreq: return atom_freq_z_;
    case Block::Sticks: break;
  }
  return sticks_z_;
}

const BlockAdaptation& Chain::adaptation(Block block) const noexcept {
  return adaptation_[block_index(block)];
}

bool Chain::try_block(Block block, std::span<const double> z_proposal, Rng& rng) {
  MoveCounter& counter = counter_for(block);
  ++counter.proposed;
  const auto current = block_coordinates(block);
  if (z_proposal.size() != current.size()) {
    throw InvalidArgument("block proposal has the wrong dimension");
  }
  std::vector<double> natural(z_proposal.size());
  for (std::size_t i = 0; i < natural.size(); ++i) {
    natural[i] = logistic(z_proposal[i]);
    if (!std::isfinite(z_proposal[i])) return false;
  }

  Terms next = terms_;
  std::vector<double> new_weights;
  try {
    switch (block) {
      case Block::AtomTime:
        next.stats = compute_stats(k1_, k2_, weights_, natural, atom_freq_);
        next.atom_time = atom_term(z_proposal);
        break;
      case Block::AtomFreq:
        next.stats = compute_stats(k1_, k2_, weights_, atom_time_, natural);
        next.atom_freq = atom_term(z_proposal);
        break;
      case Block::Sticks:
        for (double v : natural) {
          // Sticks that round to 0 or 1 cannot be represented; treat as rejected.
          if (!(v > 0.0 && v < 1.0)) return false;
        }
        new_weights = stick_weights(natural);
        next.stats = compute_stats(k1_, k2_, new_weights, atom_time_, atom_freq_);
        next.sticks = stick_term(z_proposal);
        break;
    }
  } catch (const EvaluationError&) {
    return false;
  }
  if (!accept(total(next, log_tau_) - log_target(), rng)) return false;

  switch (block) {
    case Block::AtomTime:
      atom_time_z_.assign(z_proposal.begin(), z_proposal.end());
      atom_time_ = std::move(natural);
      break;
    case Block::AtomFreq:
      atom_freq_z_.assign(z_proposal.begin(), z_proposal.end());
      atom_freq_ = std::move(natural);
      break;
    case Block::Sticks:
      sticks_z_.assign(z_proposal.begin(), z_proposal.end());
      sticks_ = std::move(natural);
      weights_ = std::move(new_weights);
      break;
  }
  terms_ = next;
  ++counter.accepted;
  return true;
}

Eigen::VectorXd propose_block_step(const BlockAdaptation& adaptation, std::size_t iteration,
                                   const SamplerConfig& cfg, Rng& rng) {
  const auto d = adaptation.mean().size();
  const double dd = static_cast<double>(d);
  std::normal_distribution<double> normal(0.0, 1.0);

  bool adaptive = false;
  if (iteration >= cfg.adapt_start) {
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    adaptive = unif(rng) >= cfg.adapt_mix_weight;
  }

  Eigen::VectorXd noise(d);
  for (Eigen::Index i = 0; i < d; ++i) noise[i] = normal(rng);

  Eigen::VectorXd step;
  if (adaptive) {
    Eigen::MatrixXd cov = adaptation.covariance();
    cov.diagonal().array() += kCovarianceJitter;
    Eigen::LLT<Eigen::MatrixXd> llt(cov);
    if (llt.info() == Eigen::Success) {
      step = llt.matrixL() * noise;
      step *= kAdaptiveScale / std::sqrt(dd);
      return step;
    }
  }
  step = (kSafeProposalSd / std::sqrt(dd)) * noise;
  return step;
}

bool Chain::step_block(Block block, Rng& rng) {
  const auto current = block_coordinates(block);
  const auto step = propose_block_step(adaptation_[block_index(block)], iteration_, cfg_, rng);
  std::vector<double> proposal(current.begin(), current.end());
  for (std::size_t i = 0; i < proposal.size(); ++i) proposal[i] += step[static_cast<Eigen::Index>(i)];
  return try_block(block, proposal, rng);
}

bool Chain::try_log_tau(double proposal, Rng& rng) {
  ++acceptance_.tau.proposed;
  if (!std::isfinite(proposal)) return false;
  Terms next = terms_;
  next.tau = tau_term(proposal);
  if (!accept(total(next, proposal) - log_target(), rng)) return false;
  log_tau_ = proposal;
  terms_ = next;
  ++acceptance_.tau.accepted;
  return true;
}

bool Chain::step_tau(Rng& rng) {
  std::uniform_real_distribution<double> unif(-0.5, 0.5);
  return try_log_tau(log_tau_ + tau_width_ * unif(rng), rng);
}

void Chain::sweep(Rng& rng) {
  step_degree(1, rng);
  step_degree(2, rng);
  step_block(Block::AtomTime, rng);
  step_block(Block::AtomFreq, rng);
  step_block(Block::Sticks, rng);
  const bool tau_accepted = step_tau(rng);

  ++iteration_;
  adaptation_[block_index(Block::AtomTime)].update(atom_time_z_);
  adaptation_[block_index(Block::AtomFreq)].update(atom_freq_z_);
  adaptation_[block_index(Block::Sticks)].update(sticks_z_);
  if (iteration_ <= cfg_.burn_in) {
    // Robbins-Monro on the log width; frozen once burn-in ends.
    const double gain = std::pow(static_cast<double>(iteration_), -0.6);
    const double hit = tau_accepted ? 1.0 : 0.0;
    tau_width_ *= std::exp(gain * (hit - cfg_.tau_target_accept));
  }
}

SurfaceParams Chain::params() const {
  SurfaceParams p;
  p.tau = std::exp(log_tau_);
  p.k1 = k1_;
  p.k2 = k2_;
  p.measure.sticks = sticks_;
  p.measure.atom_time = atom_time_;
  p.measure.atom_freq = atom_freq_;
  p.basis = prior_.basis;
  return p;
}

Draw Chain::draw() const {
  Draw d;
  d.params = params();
  d.log_tau = log_tau_;
  d.log_likelihood = evaluator_ == nullptr ? 0.0 : terms_.stats.log_likelihood(log_tau_);
  // Natural-scale prior: drop the logit and log Jacobians from the cached terms.
  double jacobian = log_tau_;
  for (double z : atom_time_z_) jacobian += log_logit_jacobian(z);
  for (double z : atom_freq_z_) jacobian += log_logit_jacobian(z);
  for (double z : sticks_z_) jacobian += log_logit_jacobian(z);
  d.log_posterior = log_target() - jacobian;
  return d;
}

ChainResult run_chain(const MovingPeriodogramSet& periodograms, const LikelihoodGrid& grid,
                      const PriorConfig& prior, const SamplerConfig& cfg, Rng& rng,
                      const ProgressHook& progress) {
  prior.validate();
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();

  const std::size_t truncation =
      truncation_level(prior, grid.m, full_block_count(grid.length, grid.m, grid.thinning));
  WhittleEvaluator evaluator(periodograms, grid, prior.basis, cfg.basis_cache_capacity);
  SamplerConfig chain_cfg = cfg;
  if (!chain_cfg.tau_init && evaluator.mean_ordinate() > 0.0) {
    chain_cfg.tau_init = evaluator.mean_ordinate();
  }
  Chain chain(prior, chain_cfg, truncation, cfg.use_likelihood ? &evaluator : nullptr, rng);

  ChainResult result;
  result.truncation = truncation;
  result.draws.reserve((cfg.n_iter - cfg.burn_in) / cfg.mcmc_thin);
  for (std::size_t it = 0; it < cfg.n_iter; ++it) {
    if (it == cfg.burn_in) {
      result.burn_in_acceptance = chain.acceptance();
      chain.reset_acceptance();
    }
    chain.sweep(rng);
    if (it >= cfg.burn_in && (it + 1 - cfg.burn_in) % cfg.mcmc_thin == 0) {
      result.draws.push_back(chain.draw());
    }
    if (cfg.verify_every > 0 && (it + 1) % cfg.verify_every == 0) {
      const double cached = chain.log_target();
      const double fresh = chain.recompute_log_target();
      const double drift = std::fabs(cached - fresh);
      result.max_cache_drift = std::max(result.max_cache_drift, drift);
      if (drift > 1e-8) {
        throw EvaluationError("cached log-posterior drifted by " + std::to_string(drift) +
                              " at iteration " + std::to_string(it + 1));
      }
    }
    if (progress && cfg.progress_every > 0 && (it + 1) % cfg.progress_every == 0) {
      progress({it + 1, cfg.n_iter, chain.log_target(), &chain.acceptance()});
    }
  }
  result.acceptance = chain.acceptance();
  result.tau_width = chain.tau_width();
  result.runtime_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace tvspec
