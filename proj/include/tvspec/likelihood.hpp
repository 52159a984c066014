#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "tvspec/periodogram.hpp"
#include "tvspec/surface.hpp"

namespace tvspec {

struct GridEntry {
  std::size_t t = 0;       ///< internal time index, 1..T
  double u = 0.0;          ///< t / T
  std::size_t j = 0;       ///< frequency index mod(t)
  double lambda = 0.0;     ///< lambda_j
};

/// Index set of the (thinned) dynamic Whittle likelihood.
struct LikelihoodGrid {
  std::size_t thinning = 1;
  std::size_t length = 0;  ///< T
  std::size_t m = 0;
  std::size_t blocks = 0;  ///< blocks generated, including a trailing partial one
  std::vector<GridEntry> entries;
};

/// ceil((T - m) / (i m)): the full-block count B_i.
[[nodiscard]] std::size_t full_block_count(std::size_t length, std::size_t m, std::size_t thinning);

/// Blocks l = 1, 2, ... start at t = i (l - 1) m + 1 and contribute
/// t = i (l - 1) m + j for j = 1..m; entries past T are dropped and generation
/// stops at the first block starting beyond T. With i = 1 this is {1..T}.
LikelihoodGrid build_grid(std::size_t length, std::size_t m, std::size_t thinning);

using SurfaceFn = std::function<double(double u, double lambda)>;

/// sum over grid entries of -ln f(u, lambda_j) - MI_t / f(u, lambda_j).
/// Throws EvaluationError naming (t, j) for the first non-finite term.
double log_dynamic_whittle(const SurfaceFn& surface, const MovingPeriodogramSet& periodograms,
                           const LikelihoodGrid& grid);

/// Sufficient statistics of the mixture part b of f = tau * b on the grid.
/// The log-likelihood in ln tau is then -n ln tau - sum_log_b - sum_ratio / tau.
struct MixtureStats {
  double sum_log_b = 0.0;
  double sum_ratio = 0.0;  ///< sum MI_t / b
  std::size_t count = 0;

  [[nodiscard]] double log_likelihood(double log_tau) const;
};

/// Likelihood evaluator with per-degree basis tables precomputed on the
/// fixed grid. Exclusively owned by one chain.
class WhittleEvaluator {
 public:
  WhittleEvaluator(const MovingPeriodogramSet& periodograms, LikelihoodGrid grid,
                   const BetaBasisConfig& basis, std::size_t cache_capacity = 16);

  /// `weights` are p_0..p_L; atoms are W_0..W_L.
  MixtureStats mixture_stats(std::size_t k1, std::size_t k2, std::span<const double> weights,
                             std::span<const double> atom_time,
                             std::span<const double> atom_freq);

  [[nodiscard]] const LikelihoodGrid& grid() const noexcept { return grid_; }
  [[nodiscard]] double mean_ordinate() const noexcept { return mean_ordinate_; }
  [[nodiscard]] std::size_t table_builds() const noexcept {
    return time_cache_.builds() + freq_cache_.builds();
  }

 private:
  LikelihoodGrid grid_;
  std::vector<double> ordinates_;        // MI_t per entry
  std::vector<std::size_t> freq_index_;  // j - 1 per entry
  BasisCache time_cache_;
  BasisCache freq_cache_;
  double mean_ordinate_ = 0.0;
  std::vector<std::size_t> bin1_;
  std::vector<std::size_t> bin2_;
};

}  // namespace tvspec
