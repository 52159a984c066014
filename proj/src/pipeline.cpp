#include "tvspec/pipeline.hpp"

#include <algorithm>

namespace tvspec {

EstimateResult estimate(const TimeSeries& series, const EstimateConfig& cfg,
                        const ProgressHook& progress) {
  cfg.prior.validate();
  cfg.sampler.validate();
  EstimateResult out;
  out.original_length = series.size();
  out.periodograms = moving_periodograms(series, cfg.window);
  out.grid = build_grid(out.periodograms.length, cfg.window.m, cfg.thinning);
  Rng rng(cfg.sampler.seed);
  out.chain = run_chain(out.periodograms, out.grid, cfg.prior, cfg.sampler, rng, progress);
  const BoundaryMap boundary{series.size(), cfg.window.m};
  out.summary = summarize(out.chain.draws, cfg.time_grid, cfg.freq_grid, boundary, cfg.prior);
  return out;
}

AseReport posterior_mean_ase(const EstimateResult& result, DgpModel model,
                             const BetaBasisConfig& basis) {
  constexpr std::size_t K = 99;
  const std::size_t n = result.original_length;
  const std::size_t m = result.periodograms.m;
  const BoundaryMap boundary{n, m};
  const auto times = ase_time_grid(n);
  const auto freqs = ase_freq_grid(K);
  std::vector<double> u(times.size());
  std::transform(times.begin(), times.end(), u.begin(),
                 [&](double v) { return boundary.to_internal(v); });
  const auto estimate = posterior_mean_surface(result.chain.draws, u, freqs, basis);
  std::vector<double> truth(estimate.size());
  for (std::size_t t = 0; t < n; ++t) {
    for (std::size_t j = 0; j <= K; ++j) {
      truth[t * (K + 1) + j] = true_tv_psd(model, times[t], freqs[j]);
    }
  }
  AseReport report;
  report.full = ase_from_values(estimate, truth, n, K);
  report.interior = ase_from_values(estimate, truth, n, K, {m, n - m});
  return report;
}

}  // namespace tvspec
