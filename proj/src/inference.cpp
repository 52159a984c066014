#include "tvspec/inference.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>

#include <Eigen/Dense>

#include "tvspec/errors.hpp"

namespace tvspec {

double BoundaryMap::to_internal(double v) const noexcept {
  const double n = static_cast<double>(original_length);
  const double eff = static_cast<double>(original_length - 2 * m);
  return std::clamp((v * n - static_cast<double>(m)) / eff, 0.0, 1.0);
}

std::vector<double> uniform_grid(std::size_t count) {
  if (count == 0) return {};
  if (count == 1) return {0.0};
  std::vector<double> g(count);
  for (std::size_t i = 0; i < count; ++i) {
    g[i] = static_cast<double>(i) / static_cast<double>(count - 1);
  }
  return g;
}

double nearest_rank_quantile(std::vector<double>& values, double prob) {
  if (values.empty()) throw InvalidArgument("quantile of an empty sample");
  const double n = static_cast<double>(values.size());
  auto rank = static_cast<std::size_t>(std::ceil(prob * n - 1e-9));
  rank = std::clamp<std::size_t>(rank, 1, values.size());
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double sample_median(std::vector<double>& values) {
  if (values.empty()) throw InvalidArgument("median of an empty sample");
  const std::size_t n = values.size();
  auto upper = values.begin() + static_cast<std::ptrdiff_t>(n / 2);
  std::nth_element(values.begin(), upper, values.end());
  if (n % 2 == 1) return *upper;
  const double hi = *upper;
  const double lo = *std::max_element(values.begin(), upper);
  return 0.5 * (lo + hi);
}

namespace {

// Per-draw atom bins and scaled weights tau * p_l, computed once.
struct CompiledDraw {
  std::size_t k1 = 1;
  std::size_t k2 = 1;
  std::vector<std::size_t> bin1;
  std::vector<std::size_t> bin2;
  std::vector<double> weight;
};

CompiledDraw compile(const Draw& d) {
  CompiledDraw c;
  const auto& p = d.params;
  c.k1 = p.k1;
  c.k2 = p.k2;
  const auto w = stick_weights(p.measure.sticks);
  c.bin1.resize(w.size());
  c.bin2.resize(w.size());
  c.weight.resize(w.size());
  for (std::size_t l = 0; l < w.size(); ++l) {
    c.bin1[l] = atom_bin(p.k1, p.measure.atom_time[l]) - 1;
    c.bin2[l] = atom_bin(p.k2, p.measure.atom_freq[l]) - 1;
    c.weight[l] = p.tau * w[l];
  }
  return c;
}

Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>> as_matrix(
    const BasisTable& t) {
  return {t.row(0), static_cast<Eigen::Index>(t.size()), static_cast<Eigen::Index>(t.degree())};
}

void check_grid(std::span<const double> grid, const char* name) {
  for (double g : grid) {
    if (!(g >= 0.0 && g <= 1.0)) {
      throw InvalidArgument(std::string(name) + " grid values must lie in [0, 1]");
    }
  }
}

}  // namespace

std::vector<double> posterior_mean_surface(std::span<const Draw> draws,
                                           std::span<const double> u_points,
                                           std::span<const double> freq_points,
                                           const BetaBasisConfig& basis) {
  if (draws.empty()) throw InvalidArgument("posterior sample is empty");
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const double inv_n = 1.0 / static_cast<double>(draws.size());

  std::map<std::pair<std::size_t, std::size_t>, Eigen::MatrixXd> grouped;
  for (const auto& d : draws) {
    const auto c = compile(d);
    auto [it, inserted] = grouped.try_emplace({c.k1, c.k2});
    if (inserted) it->second = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(c.k1),
                                                      static_cast<Eigen::Index>(c.k2));
    for (std::size_t l = 0; l < c.weight.size(); ++l) {
      it->second(static_cast<Eigen::Index>(c.bin1[l]), static_cast<Eigen::Index>(c.bin2[l])) +=
          c.weight[l] * inv_n;
    }
  }

  BasisCache time_cache({u_points.begin(), u_points.end()}, basis, 4);
  BasisCache freq_cache({freq_points.begin(), freq_points.end()}, basis, 4);
  RowMatrix mean = RowMatrix::Zero(static_cast<Eigen::Index>(u_points.size()),
                                   static_cast<Eigen::Index>(freq_points.size()));
  for (const auto& [degrees, weights] : grouped) {
    const auto a = time_cache.get(degrees.first);
    const auto b = freq_cache.get(degrees.second);
    mean.noalias() += as_matrix(*a) * weights * as_matrix(*b).transpose();
  }
  return {mean.data(), mean.data() + mean.size()};
}

PosteriorSummary summarize(std::span<const Draw> draws, std::span<const double> time_grid,
                           std::span<const double> freq_grid, const BoundaryMap& boundary,
                           const PriorConfig& prior) {
  if (draws.empty()) throw InvalidArgument("posterior sample is empty");
  check_grid(time_grid, "time");
  check_grid(freq_grid, "frequency");

  PosteriorSummary s;
  s.time_grid.assign(time_grid.begin(), time_grid.end());
  s.freq_grid.assign(freq_grid.begin(), freq_grid.end());
  s.draw_count = draws.size();

  std::vector<double> u(time_grid.size());
  std::transform(time_grid.begin(), time_grid.end(), u.begin(),
                 [&](double v) { return boundary.to_internal(v); });

  s.mean = posterior_mean_surface(draws, u, freq_grid, prior.basis);

  std::vector<CompiledDraw> compiled;
  compiled.reserve(draws.size());
  for (const auto& d : draws) compiled.push_back(compile(d));

  const std::size_t nt = time_grid.size();
  const std::size_t nf = freq_grid.size();
  const std::size_t n = draws.size();
  s.median.resize(nt * nf);
  s.q05.resize(nt * nf);
  s.q95.resize(nt * nf);

  // One table per degree for the whole run: the time cache holds single rows.
  BasisCache freq_cache(s.freq_grid, prior.basis, prior.k_max);
  std::vector<double> values(nf * n);
  std::vector<double> column(n);
  std::vector<double> scaled;
  for (std::size_t i = 0; i < nt; ++i) {
    if (i > 0 && u[i] == u[i - 1]) {
      for (std::size_t f = 0; f < nf; ++f) {
        s.median[s.index(i, f)] = s.median[s.index(i - 1, f)];
        s.q05[s.index(i, f)] = s.q05[s.index(i - 1, f)];
        s.q95[s.index(i, f)] = s.q95[s.index(i - 1, f)];
      }
      continue;
    }
    BasisCache row_cache({u[i]}, prior.basis, prior.k_max);
    for (std::size_t d = 0; d < n; ++d) {
      const auto& c = compiled[d];
      const auto a = row_cache.get(c.k1);
      const auto b = freq_cache.get(c.k2);
      const double* arow = a->row(0);
      scaled.resize(c.weight.size());
      for (std::size_t l = 0; l < c.weight.size(); ++l) scaled[l] = c.weight[l] * arow[c.bin1[l]];
      for (std::size_t f = 0; f < nf; ++f) {
        const double* brow = b->row(f);
        double v = 0.0;
        for (std::size_t l = 0; l < scaled.size(); ++l) v += scaled[l] * brow[c.bin2[l]];
        values[f * n + d] = v;
      }
    }
    for (std::size_t f = 0; f < nf; ++f) {
      column.assign(values.begin() + static_cast<std::ptrdiff_t>(f * n),
                    values.begin() + static_cast<std::ptrdiff_t>((f + 1) * n));
      s.q05[s.index(i, f)] = nearest_rank_quantile(column, 0.05);
      s.q95[s.index(i, f)] = nearest_rank_quantile(column, 0.95);
      s.median[s.index(i, f)] = sample_median(column);
    }
  }

  s.k1_pmf.assign(prior.k_max, 0.0);
  s.k2_pmf.assign(prior.k_max, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (const auto& d : draws) {
    s.k1_pmf[d.params.k1 - 1] += inv_n;
    s.k2_pmf[d.params.k2 - 1] += inv_n;
  }
  s.bayes_factor_01 = savage_dickey_bf(draws, prior);
  return s;
}

double savage_dickey_bf(std::span<const Draw> draws, const PriorConfig& prior) {
  if (draws.empty()) throw InvalidArgument("posterior sample is empty");
  const auto hits = std::count_if(draws.begin(), draws.end(),
                                  [](const Draw& d) { return d.params.k1 == 1; });
  const double posterior = static_cast<double>(hits) / static_cast<double>(draws.size());
  return posterior / prior_prob_k1_equals_1(prior);
}

std::vector<double> ase_time_grid(std::size_t length) {
  std::vector<double> g(length);
  for (std::size_t t = 1; t <= length; ++t) {
    g[t - 1] = static_cast<double>(t) / static_cast<double>(length);
  }
  return g;
}

std::vector<double> ase_freq_grid(std::size_t K) {
  std::vector<double> g(K + 1);
  for (std::size_t j = 0; j <= K; ++j) g[j] = static_cast<double>(j) / static_cast<double>(K);
  return g;
}

namespace {

std::pair<std::size_t, std::size_t> resolve(AseRange range, std::size_t length) {
  const std::size_t last = range.last == 0 ? length : range.last;
  if (length == 0 || range.first < 1 || range.first > last || last > length) {
    throw InvalidArgument("invalid ASE time range");
  }
  return {range.first, last};
}

double squared_log_error(double est, double truth, std::size_t t, std::size_t j) {
  if (!(est > 0.0) || !(truth > 0.0) || !std::isfinite(est) || !std::isfinite(truth)) {
    throw EvaluationError("nonpositive surface value in ASE at t = " + std::to_string(t) +
                          ", j = " + std::to_string(j));
  }
  const double d = std::log(est) - std::log(truth);
  return d * d;
}

}  // namespace

double ase(const SurfaceFn& estimate, const SurfaceFn& truth, std::size_t length, std::size_t K,
           AseRange range) {
  const auto [first, last] = resolve(range, length);
  if (K == 0) throw InvalidArgument("ASE needs K >= 1");
  double total = 0.0;
  for (std::size_t t = first; t <= last; ++t) {
    const double u = static_cast<double>(t) / static_cast<double>(length);
    for (std::size_t j = 0; j <= K; ++j) {
      const double lambda = static_cast<double>(j) / static_cast<double>(K);
      total += squared_log_error(estimate(u, lambda), truth(u, lambda), t, j);
    }
  }
  return total / (static_cast<double>(last - first + 1) * static_cast<double>(K + 1));
}

double ase_from_values(std::span<const double> estimate, std::span<const double> truth,
                       std::size_t length, std::size_t K, AseRange range) {
  const auto [first, last] = resolve(range, length);
  const std::size_t cols = K + 1;
  if (estimate.size() != length * cols || truth.size() != length * cols) {
    throw InvalidArgument("ASE value arrays must hold T x (K + 1) entries");
  }
  double total = 0.0;
  for (std::size_t t = first; t <= last; ++t) {
    for (std::size_t j = 0; j <= K; ++j) {
      const std::size_t idx = (t - 1) * cols + j;
      total += squared_log_error(estimate[idx], truth[idx], t, j);
    }
  }
  return total / (static_cast<double>(last - first + 1) * static_cast<double>(cols));
}

}  // namespace tvspec
