#include "tvspec/likelihood.hpp"

#include <cmath>
#include <string>

#include "tvspec/errors.hpp"

namespace tvspec {

std::size_t full_block_count(std::size_t length, std::size_t m, std::size_t thinning) {
  if (length <= m) return 0;
  const std::size_t step = thinning * m;
  return (length - m + step - 1) / step;
}

LikelihoodGrid build_grid(std::size_t length, std::size_t m, std::size_t thinning) {
  if (m < 1) throw InvalidArgument("half-window m must be at least 1");
  if (thinning < 1 || thinning > 3) throw InvalidArgument("thinning factor must be 1, 2 or 3");
  if (length < m) {
    throw InvalidArgument("effective length " + std::to_string(length) +
                          " is smaller than m = " + std::to_string(m));
  }
  LikelihoodGrid grid;
  grid.thinning = thinning;
  grid.length = length;
  grid.m = m;
  const auto lambda = fourier_frequencies(m);
  const double dlen = static_cast<double>(length);
  for (std::size_t start = 0; start < length; start += thinning * m) {
    ++grid.blocks;
    for (std::size_t j = 1; j <= m && start + j <= length; ++j) {
      const std::size_t t = start + j;
      grid.entries.push_back({t, static_cast<double>(t) / dlen, j, lambda[j - 1]});
    }
  }
  return grid;
}

double log_dynamic_whittle(const SurfaceFn& surface, const MovingPeriodogramSet& periodograms,
                           const LikelihoodGrid& grid) {
  if (grid.length != periodograms.length || grid.m != periodograms.m) {
    throw InvalidArgument("likelihood grid does not match the periodogram set");
  }
  double total = 0.0;
  for (const auto& e : grid.entries) {
    const double f = surface(e.u, e.lambda);
    const double mi = periodograms.ordinates[e.t - 1];
    const double term = -std::log(f) - mi / f;
    if (!(f > 0.0) || !std::isfinite(term)) {
      throw EvaluationError("non-finite likelihood term at t = " + std::to_string(e.t) +
                            ", j = " + std::to_string(e.j));
    }
    total += term;
  }
  return total;
}

double MixtureStats::log_likelihood(double log_tau) const {
  return -static_cast<double>(count) * log_tau - sum_log_b - sum_ratio * std::exp(-log_tau);
}

namespace {

std::vector<double> entry_times(const LikelihoodGrid& grid) {
  std::vector<double> u;
  u.reserve(grid.entries.size());
  for (const auto& e : grid.entries) u.push_back(e.u);
  return u;
}

}  // namespace

WhittleEvaluator::WhittleEvaluator(const MovingPeriodogramSet& periodograms, LikelihoodGrid grid,
                                   const BetaBasisConfig& basis, std::size_t cache_capacity)
    : grid_(std::move(grid)),
      time_cache_(entry_times(grid_), basis, cache_capacity),
      freq_cache_(periodograms.frequencies, basis, cache_capacity) {
  if (grid_.length != periodograms.length || grid_.m != periodograms.m) {
    throw InvalidArgument("likelihood grid does not match the periodogram set");
  }
  ordinates_.reserve(grid_.entries.size());
  freq_index_.reserve(grid_.entries.size());
  double sum = 0.0;
  for (const auto& e : grid_.entries) {
    const double mi = periodograms.ordinates[e.t - 1];
    if (!std::isfinite(mi)) {
      throw InvalidArgument("non-finite periodogram ordinate at t = " + std::to_string(e.t));
    }
    ordinates_.push_back(mi);
    freq_index_.push_back(e.j - 1);
    sum += mi;
  }
  mean_ordinate_ = grid_.entries.empty() ? 0.0 : sum / static_cast<double>(grid_.entries.size());
}

MixtureStats WhittleEvaluator::mixture_stats(std::size_t k1, std::size_t k2,
                                             std::span<const double> weights,
                                             std::span<const double> atom_time,
                                             std::span<const double> atom_freq) {
  const auto time_table = time_cache_.get(k1);
  const auto freq_table = freq_cache_.get(k2);
  const std::size_t n_atoms = weights.size();
  bin1_.resize(n_atoms);
  bin2_.resize(n_atoms);
  for (std::size_t l = 0; l < n_atoms; ++l) {
    bin1_[l] = atom_bin(k1, atom_time[l]) - 1;
    bin2_[l] = atom_bin(k2, atom_freq[l]) - 1;
  }

  MixtureStats stats;
  stats.count = ordinates_.size();
  for (std::size_t e = 0; e < ordinates_.size(); ++e) {
    const double* bu = time_table->row(e);
    const double* bf = freq_table->row(freq_index_[e]);
    double b = 0.0;
    for (std::size_t l = 0; l < n_atoms; ++l) {
      b += weights[l] * bu[bin1_[l]] * bf[bin2_[l]];
    }
    stats.sum_log_b += std::log(b);
    stats.sum_ratio += ordinates_[e] / b;
  }
  if (!std::isfinite(stats.sum_log_b) || !std::isfinite(stats.sum_ratio)) {
    throw EvaluationError("mixture surface is not strictly positive on the likelihood grid");
  }
  return stats;
}

}  // namespace tvspec
