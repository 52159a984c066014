#pragma once

#include <cstddef>
#include <vector>

#include "tvspec/inference.hpp"
#include "tvspec/likelihood.hpp"
#include "tvspec/periodogram.hpp"
#include "tvspec/prior.hpp"
#include "tvspec/sampler.hpp"
#include "tvspec/signal.hpp"

namespace tvspec {

struct EstimateConfig {
  WindowConfig window;
  std::size_t thinning = 2;
  PriorConfig prior;
  SamplerConfig sampler;
  std::vector<double> time_grid = uniform_grid(201);
  std::vector<double> freq_grid = uniform_grid(101);
};

struct EstimateResult {
  std::size_t original_length = 0;
  MovingPeriodogramSet periodograms;
  LikelihoodGrid grid;
  ChainResult chain;
  PosteriorSummary summary;
};

/// moving periodograms -> likelihood grid -> MCMC -> posterior summary.
EstimateResult estimate(const TimeSeries& series, const EstimateConfig& cfg,
                        const ProgressHook& progress = {});

struct AseReport {
  double full = 0.0;      ///< all t = 1..N, boundary rows by constant extension
  double interior = 0.0;  ///< t = m..N - m only
};

/// ASE of the posterior mean against the true tv-PSD of `model` on the
/// N x 100 grid (t / N, j / 99).
AseReport posterior_mean_ase(const EstimateResult& result, DgpModel model,
                             const BetaBasisConfig& basis);

}  // namespace tvspec
