#pragma once

#include <cstddef>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tvspec {

using Rng = std::mt19937_64;

/// Ordered, finite, nonempty real-valued observations.
class TimeSeries {
 public:
  /// Throws InvalidArgument if `values` is empty or contains NaN/inf.
  explicit TimeSeries(std::vector<double> values);

  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }
  [[nodiscard]] double operator[](std::size_t i) const noexcept { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Zero-mean, unit-variance innovation families (a), (b), (c).
enum class Innovation { Gaussian, StudentT3, Pareto };

enum class DgpModel { LS1, LS2, LS3, PS1, S1, S2 };

struct DgpSpec {
  DgpModel model = DgpModel::LS1;
  Innovation innovation = Innovation::Gaussian;
  std::size_t length = 1500;
};

/// Raw Pareto(shape 4, scale 1) moments used for standardization.
inline constexpr double kParetoMean = 4.0 / 3.0;
inline constexpr double kParetoSd = 0.47140452079103168;  // sqrt(2/9)
inline constexpr double kStudentT3Sd = 1.7320508075688772;  // sqrt(3)

double sample_innovation(Innovation kind, Rng& rng);

/// Draws `spec.length + 2` innovations (two pre-period values first) and
/// runs the recursion.
TimeSeries simulate_dgp(const DgpSpec& spec, Rng& rng);

/// Runs the recursion on a caller-provided innovation stream
/// (w_{-1}, w_0, w_1, ..., w_T); `innovations.size()` must be T + 2.
/// AR terms start from X_0 = 0.
std::vector<double> run_dgp_recursion(DgpModel model, std::span<const double> innovations);

/// Time-varying ARMA coefficients at rescaled time u, in the convention
///   X_t = ar * X_{t-1} + w_t + ma1 * w_{t-1} + ma2 * w_{t-2}.
struct TvArmaCoefficients {
  double ar = 0.0;
  double ma1 = 0.0;
  double ma2 = 0.0;
};

TvArmaCoefficients dgp_coefficients(DgpModel model, double u);

/// Coefficients at integer time t of a length-T realization. Only PS1 differs
/// from dgp_coefficients(model, t/T): its switch uses t <= floor(T/2).
TvArmaCoefficients dgp_coefficients_at(DgpModel model, std::size_t t, std::size_t length);

/// f(u, lambda) = (1/2pi) |1 + ma1 e^{-i pi lambda} + ma2 e^{-2 i pi lambda}|^2
///                / |1 - ar e^{-i pi lambda}|^2
double true_tv_psd(DgpModel model, double u, double lambda);

/// Same formula for arbitrary coefficients (white noise: all zero).
double arma_psd(const TvArmaCoefficients& c, double lambda);

[[nodiscard]] bool is_stationary(DgpModel model) noexcept;

std::string_view to_string(DgpModel model) noexcept;
std::string_view to_string(Innovation kind) noexcept;
std::optional<DgpModel> parse_dgp(std::string_view name) noexcept;
/// Accepts the letters a/b/c as well as gaussian/t3/pareto.
std::optional<Innovation> parse_innovation(std::string_view name) noexcept;

}  // namespace tvspec
