#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tvspec/likelihood.hpp"
#include "tvspec/prior.hpp"
#include "tvspec/sampler.hpp"

namespace tvspec {

/// Maps rescaled time on the original axis (length N) to the internal time
/// of the moving-periodogram surface, clamping outside [m/N, 1 - m/N]; this is
/// a constant extension of the estimate at both ends.
struct BoundaryMap {
  std::size_t original_length = 0;
  std::size_t m = 0;

  [[nodiscard]] double to_internal(double v) const noexcept;
};

/// Pointwise posterior summaries on a time x frequency grid. Surfaces are
/// row-major with time as the slow index.
struct PosteriorSummary {
  std::vector<double> time_grid;
  std::vector<double> freq_grid;
  std::vector<double> mean;
  std::vector<double> median;
  std::vector<double> q05;
  std::vector<double> q95;
  std::vector<double> k1_pmf;  ///< entry k - 1 is the posterior mass of k1 = k
  std::vector<double> k2_pmf;
  double bayes_factor_01 = 0.0;
  std::size_t draw_count = 0;

  [[nodiscard]] std::size_t index(std::size_t i_time, std::size_t i_freq) const noexcept {
    return i_time * freq_grid.size() + i_freq;
  }
};

/// `count` evenly spaced points from 0 to 1 inclusive.
std::vector<double> uniform_grid(std::size_t count);

/// Nearest-rank (type 1) quantile of an unsorted sample; reorders `values`.
double nearest_rank_quantile(std::vector<double>& values, double prob);
/// Sample median, averaging the two middle values for even sizes; reorders `values`.
double sample_median(std::vector<double>& values);

/// Posterior mean of f at internal times `u_points` x `freq_points`,
/// aggregating draws that share (k1, k2) into one weight matrix.
std::vector<double> posterior_mean_surface(std::span<const Draw> draws,
                                           std::span<const double> u_points,
                                           std::span<const double> freq_points,
                                           const BetaBasisConfig& basis);

/// Posterior mean, median and 5%/95% quantiles with the boundary map applied
/// to `time_grid`. Throws InvalidArgument for an empty sample.
PosteriorSummary summarize(std::span<const Draw> draws, std::span<const double> time_grid,
                           std::span<const double> freq_grid, const BoundaryMap& boundary,
                           const PriorConfig& prior);

/// Posterior-to-prior probability ratio of k1 = 1.
double savage_dickey_bf(std::span<const Draw> draws, const PriorConfig& prior);

/// Rows of the ASE time grid t / T that enter the average (1-based, inclusive).
struct AseRange {
  std::size_t first = 1;
  std::size_t last = 0;  ///< 0 means T
};

/// (1 / (rows (K + 1))) sum_t sum_{j=0}^{K} (ln estimate - ln truth)^2 at
/// (t / T, j / K). Throws EvaluationError on a nonpositive value.
double ase(const SurfaceFn& estimate, const SurfaceFn& truth, std::size_t length,
           std::size_t K = 99, AseRange range = {});

/// Same average over precomputed row-major T x (K + 1) values.
double ase_from_values(std::span<const double> estimate, std::span<const double> truth,
                       std::size_t length, std::size_t K = 99, AseRange range = {});

/// Time grid t / T for t = 1..T and frequency grid j / K for j = 0..K.
std::vector<double> ase_time_grid(std::size_t length);
std::vector<double> ase_freq_grid(std::size_t K = 99);

}  // namespace tvspec
