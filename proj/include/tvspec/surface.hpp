#pragma once

#include <cstddef>
#include <list>
#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

namespace tvspec {

/// Truncation window [xi_left, xi_right] of the dilated beta basis.
struct BetaBasisConfig {
  double xi_left = 0.1;
  double xi_right = 0.9;

  /// Throws InvalidArgument unless 0 < xi_left < xi_right < 1.
  void validate() const;
};

/// Truncated Sethuraman representation G = sum_{l=0}^{L} p_l delta_{W_l}.
///
/// `sticks` holds V_1..V_L; the atom vectors hold W_0..W_L for the time and
/// frequency coordinates.
struct StickBreakingMeasure {
  std::vector<double> sticks;
  std::vector<double> atom_time;
  std::vector<double> atom_freq;

  [[nodiscard]] std::size_t truncation() const noexcept { return sticks.size(); }
  /// Throws InvalidArgument on size mismatch, sticks outside (0,1) or atoms outside [0,1].
  void validate() const;
};

/// One tv-PSD surface f(u, lambda) = tau * b(u, lambda; k1, k2, G).
struct SurfaceParams {
  double tau = 1.0;
  std::size_t k1 = 1;
  std::size_t k2 = 1;
  StickBreakingMeasure measure;
  BetaBasisConfig basis;

  void validate(std::size_t k_max) const;
};

/// p_1 = V_1, p_l = V_l prod_{r<l}(1 - V_r); p_0 is the leftover mass
/// prod_l (1 - V_l) = 1 - sum_{l>=1} p_l. Result has size L + 1, p_0 first.
std::vector<double> stick_weights(std::span<const double> sticks);

/// Bernstein bin of an atom coordinate: max(1, ceil(k * w)), capped at k.
[[nodiscard]] std::size_t atom_bin(std::size_t k, double w) noexcept;

/// c * Beta(xi_l + x (xi_r - xi_l); a, b) with c making the density integrate
/// to one on [0, 1].
double truncated_beta_density(double x, std::size_t a, std::size_t b,
                              const BetaBasisConfig& cfg = {});

/// Stick-breaking form: tau * sum_l p_l B_{k1}(u; j1(l)) B_{k2}(lambda; j2(l)).
double evaluate_surface(const SurfaceParams& params, double u, double lambda);

/// Bin masses w(j1, j2) of the measure on the k1 x k2 grid, row-major.
struct WeightMatrix {
  std::size_t k1 = 0;
  std::size_t k2 = 0;
  std::vector<double> values;

  [[nodiscard]] double operator()(std::size_t j1, std::size_t j2) const {
    return values[(j1 - 1) * k2 + (j2 - 1)];
  }
};

WeightMatrix weights_from_measure(std::size_t k1, std::size_t k2,
                                  const StickBreakingMeasure& measure);

/// Double-sum form over the k1 x k2 Bernstein grid.
double evaluate_bernstein_mixture(double tau, const WeightMatrix& weights,
                                  const BetaBasisConfig& basis, double u, double lambda);

/// Values of the degree-k truncated basis on a fixed set of points:
/// value(i, j) = truncated_beta_density(points[i]; j, k - j + 1).
class BasisTable {
 public:
  BasisTable(std::span<const double> points, std::size_t k, const BetaBasisConfig& cfg);

  [[nodiscard]] std::size_t degree() const noexcept { return k_; }
  [[nodiscard]] std::size_t size() const noexcept { return n_; }
  /// Row of k values for point i; entry j - 1 holds basis function j.
  [[nodiscard]] const double* row(std::size_t i) const noexcept { return values_.data() + i * k_; }
  [[nodiscard]] double operator()(std::size_t i, std::size_t j) const noexcept {
    return values_[i * k_ + (j - 1)];
  }

 private:
  std::size_t n_;
  std::size_t k_;
  std::vector<double> values_;
};

/// Memo of BasisTables for one point set, keyed by degree, least recently
/// used entries evicted beyond `capacity`. Not synchronized: one writer.
class BasisCache {
 public:
  BasisCache(std::vector<double> points, BetaBasisConfig cfg, std::size_t capacity = 16);

  std::shared_ptr<const BasisTable> get(std::size_t k);

  [[nodiscard]] std::span<const double> points() const noexcept { return points_; }
  [[nodiscard]] std::size_t builds() const noexcept { return builds_; }

 private:
  std::vector<double> points_;
  BetaBasisConfig cfg_;
  std::size_t capacity_;
  std::size_t builds_ = 0;
  std::list<std::size_t> order_;  // most recent first
  std::unordered_map<std::size_t,
                     std::pair<std::shared_ptr<const BasisTable>, std::list<std::size_t>::iterator>>
      tables_;
};

}  // namespace tvspec
