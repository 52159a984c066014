#include "tvspec/surface.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tvspec/errors.hpp"
#include "tvspec/special.hpp"

namespace tvspec {

void BetaBasisConfig::validate() const {
  if (!(0.0 < xi_left && xi_left < xi_right && xi_right < 1.0)) {
    throw InvalidArgument("basis truncation requires 0 < xi_left < xi_right < 1");
  }
}

void StickBreakingMeasure::validate() const {
  const std::size_t n_atoms = sticks.size() + 1;
  if (atom_time.size() != n_atoms || atom_freq.size() != n_atoms) {
    throw InvalidArgument("stick-breaking measure needs L sticks and L + 1 atoms per coordinate");
  }
  for (double v : sticks) {
    if (!(v > 0.0 && v < 1.0)) throw InvalidArgument("stick outside (0, 1)");
  }
  for (std::size_t l = 0; l < n_atoms; ++l) {
    if (!(atom_time[l] >= 0.0 && atom_time[l] <= 1.0) ||
        !(atom_freq[l] >= 0.0 && atom_freq[l] <= 1.0)) {
      throw InvalidArgument("atom outside the unit square");
    }
  }
}

void SurfaceParams::validate(std::size_t k_max) const {
  if (!(tau > 0.0) || !std::isfinite(tau)) throw InvalidArgument("tau must be positive and finite");
  if (k1 < 1 || k1 > k_max || k2 < 1 || k2 > k_max) {
    throw InvalidArgument("Bernstein degrees must lie in 1.." + std::to_string(k_max));
  }
  basis.validate();
  measure.validate();
}

std::vector<double> stick_weights(std::span<const double> sticks) {
  std::vector<double> p(sticks.size() + 1);
  double remaining = 1.0;
  for (std::size_t l = 0; l < sticks.size(); ++l) {
    const double v = sticks[l];
    if (!(v > 0.0 && v < 1.0)) {
      throw InvalidArgument("stick " + std::to_string(l + 1) + " outside (0, 1)");
    }
    p[l + 1] = remaining * v;
    remaining *= 1.0 - v;
  }
  p[0] = remaining;
  return p;
}

std::size_t atom_bin(std::size_t k, double w) noexcept {
  const double scaled = std::ceil(static_cast<double>(k) * w);
  if (!(scaled >= 1.0)) return 1;
  return std::min(k, static_cast<std::size_t>(scaled));
}

namespace {

// ln c(a, b) - ln B(a, b): log of the constant in front of y^{a-1}(1-y)^{b-1}.
double log_truncated_constant(double a, double b, const BetaBasisConfig& cfg) {
  const double mass = special::beta_interval_mass(a, b, cfg.xi_left, cfg.xi_right);
  return std::log(cfg.xi_right - cfg.xi_left) - std::log(mass) - special::log_beta_function(a, b);
}

}  // namespace

double truncated_beta_density(double x, std::size_t a, std::size_t b, const BetaBasisConfig& cfg) {
  if (a < 1 || b < 1) {
    throw InvalidArgument("truncated beta shapes must be at least 1");
  }
  const double y = cfg.xi_left + x * (cfg.xi_right - cfg.xi_left);
  const double da = static_cast<double>(a);
  const double db = static_cast<double>(b);
  return std::exp(log_truncated_constant(da, db, cfg) + (da - 1.0) * std::log(y) +
                  (db - 1.0) * std::log1p(-y));
}

double evaluate_surface(const SurfaceParams& params, double u, double lambda) {
  const auto p = stick_weights(params.measure.sticks);
  const auto& m = params.measure;
  double total = 0.0;
  for (std::size_t l = 0; l < p.size(); ++l) {
    const std::size_t j1 = atom_bin(params.k1, m.atom_time[l]);
    const std::size_t j2 = atom_bin(params.k2, m.atom_freq[l]);
    total += p[l] * truncated_beta_density(u, j1, params.k1 - j1 + 1, params.basis) *
             truncated_beta_density(lambda, j2, params.k2 - j2 + 1, params.basis);
  }
  return params.tau * total;
}

WeightMatrix weights_from_measure(std::size_t k1, std::size_t k2,
                                  const StickBreakingMeasure& measure) {
  WeightMatrix w{k1, k2, std::vector<double>(k1 * k2, 0.0)};
  const auto p = stick_weights(measure.sticks);
  for (std::size_t l = 0; l < p.size(); ++l) {
    const std::size_t j1 = atom_bin(k1, measure.atom_time[l]);
    const std::size_t j2 = atom_bin(k2, measure.atom_freq[l]);
    w.values[(j1 - 1) * k2 + (j2 - 1)] += p[l];
  }
  return w;
}

double evaluate_bernstein_mixture(double tau, const WeightMatrix& weights,
                                  const BetaBasisConfig& basis, double u, double lambda) {
  double total = 0.0;
  for (std::size_t j1 = 1; j1 <= weights.k1; ++j1) {
    const double bu = truncated_beta_density(u, j1, weights.k1 - j1 + 1, basis);
    for (std::size_t j2 = 1; j2 <= weights.k2; ++j2) {
      const double w = weights(j1, j2);
      if (w == 0.0) continue;
      total += w * bu * truncated_beta_density(lambda, j2, weights.k2 - j2 + 1, basis);
    }
  }
  return tau * total;
}

BasisTable::BasisTable(std::span<const double> points, std::size_t k, const BetaBasisConfig& cfg)
    : n_(points.size()), k_(k), values_(points.size() * k) {
  if (k < 1) throw InvalidArgument("basis degree must be at least 1");
  std::vector<double> log_const(k);
  for (std::size_t j = 1; j <= k; ++j) {
    log_const[j - 1] =
        log_truncated_constant(static_cast<double>(j), static_cast<double>(k - j + 1), cfg);
  }
  for (std::size_t i = 0; i < n_; ++i) {
    const double y = cfg.xi_left + points[i] * (cfg.xi_right - cfg.xi_left);
    const double ly = std::log(y);
    const double l1y = std::log1p(-y);
    double* out = values_.data() + i * k;
    for (std::size_t j = 1; j <= k; ++j) {
      out[j - 1] = std::exp(log_const[j - 1] + static_cast<double>(j - 1) * ly +
                            static_cast<double>(k - j) * l1y);
    }
  }
}

BasisCache::BasisCache(std::vector<double> points, BetaBasisConfig cfg, std::size_t capacity)
    : points_(std::move(points)), cfg_(cfg), capacity_(std::max<std::size_t>(capacity, 1)) {
  cfg_.validate();
}

std::shared_ptr<const BasisTable> BasisCache::get(std::size_t k) {
  if (auto it = tables_.find(k); it != tables_.end()) {
    order_.splice(order_.begin(), order_, it->second.second);
    return it->second.first;
  }
  auto table = std::make_shared<const BasisTable>(points_, k, cfg_);
  ++builds_;
  order_.push_front(k);
  tables_.emplace(k, std::make_pair(table, order_.begin()));
  while (tables_.size() > capacity_) {
    tables_.erase(order_.back());
    order_.pop_back();
  }
  return table;
}

}  // namespace tvspec
