#include "tvspec/signal.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <string>

#include "tvspec/errors.hpp"

namespace tvspec {

TimeSeries::TimeSeries(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) {
    throw InvalidArgument("time series must contain at least one value");
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      throw InvalidArgument("time series value at index " + std::to_string(i) +
                            " is not finite");
    }
  }
}

double sample_innovation(Innovation kind, Rng& rng) {
  switch (kind) {
    case Innovation::Gaussian: {
      std::normal_distribution<double> normal(0.0, 1.0);
      return normal(rng);
    }
    case Innovation::StudentT3: {
      std::student_t_distribution<double> t3(3.0);
      return t3(rng) / kStudentT3Sd;
    }
    case Innovation::Pareto: {
      // Inverse CDF of Pareto(shape 4, scale 1): (1 - U)^{-1/4}.
      std::uniform_real_distribution<double> unif(0.0, 1.0);
      const double x = std::pow(1.0 - unif(rng), -0.25);
      return (x - kParetoMean) / kParetoSd;
    }
  }
  return 0.0;
}

TvArmaCoefficients dgp_coefficients(DgpModel model, double u) {
  using std::numbers::pi;
  switch (model) {
    case DgpModel::LS1:
      return {0.0, 1.122 * (1.0 - 1.718 * std::sin(pi / 2.0 * u)), -0.81};
    case DgpModel::LS2:
      return {0.0, 1.1 * std::cos(1.5 - std::cos(4.0 * pi * u)), 0.0};
    case DgpModel::LS3:
      return {1.2 * u - 0.6, 0.0, 0.0};
    case DgpModel::PS1:
      return {u <= 0.5 ? -0.5 : 0.5, 0.0, 0.0};
    case DgpModel::S1:
      return {0.75, 0.8, 0.0};
    case DgpModel::S2:
      return {0.0, -0.36, 0.85};
  }
  return {};
}

TvArmaCoefficients dgp_coefficients_at(DgpModel model, std::size_t t, std::size_t length) {
  if (model == DgpModel::PS1) {
    return {t <= length / 2 ? -0.5 : 0.5, 0.0, 0.0};
  }
  return dgp_coefficients(model, static_cast<double>(t) / static_cast<double>(length));
}

std::vector<double> run_dgp_recursion(DgpModel model, std::span<const double> innovations) {
  if (innovations.size() < 3) {
    throw InvalidArgument("innovation stream must hold T + 2 >= 3 values");
  }
  const std::size_t length = innovations.size() - 2;
  std::vector<double> x(length);
  double prev = 0.0;
  for (std::size_t t = 1; t <= length; ++t) {
    // innovations[t + 1] is w_t; w_{t-1}, w_{t-2} sit just before it.
    const double w0 = innovations[t + 1];
    const double w1 = innovations[t];
    const double w2 = innovations[t - 1];
    const auto c = dgp_coefficients_at(model, t, length);
    const double value = c.ar * prev + w0 + c.ma1 * w1 + c.ma2 * w2;
    x[t - 1] = value;
    prev = value;
  }
  return x;
}

TimeSeries simulate_dgp(const DgpSpec& spec, Rng& rng) {
  if (spec.length < 1) {
    throw InvalidArgument("DGP length must be at least 1");
  }
  std::vector<double> w(spec.length + 2);
  for (auto& v : w) {
    v = sample_innovation(spec.innovation, rng);
  }
  return TimeSeries(run_dgp_recursion(spec.model, w));
}

double arma_psd(const TvArmaCoefficients& c, double lambda) {
  using std::numbers::pi;
  const std::complex<double> z = std::polar(1.0, -pi * lambda);
  const std::complex<double> ma = 1.0 + c.ma1 * z + c.ma2 * z * z;
  const std::complex<double> ar = 1.0 - c.ar * z;
  return std::norm(ma) / std::norm(ar) / (2.0 * pi);
}

double true_tv_psd(DgpModel model, double u, double lambda) {
  return arma_psd(dgp_coefficients(model, u), lambda);
}

bool is_stationary(DgpModel model) noexcept {
  return model == DgpModel::S1 || model == DgpModel::S2;
}

std::string_view to_string(DgpModel model) noexcept {
  switch (model) {
    case DgpModel::LS1: return "LS1";
    case DgpModel::LS2: return "LS2";
    case DgpModel::LS3: return "LS3";
    case DgpModel::PS1: return "PS1";
    case DgpModel::S1: return "S1";
    case DgpModel::S2: return "S2";
  }
  return "?";
}

std::string_view to_string(Innovation kind) noexcept {
  switch (kind) {
    case Innovation::Gaussian: return "a";
    case Innovation::StudentT3: return "b";
    case Innovation::Pareto: return "c";
  }
  return "?";
}

std::optional<DgpModel> parse_dgp(std::string_view name) noexcept {
  for (auto m : {DgpModel::LS1, DgpModel::LS2, DgpModel::LS3, DgpModel::PS1, DgpModel::S1,
                 DgpModel::S2}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<Innovation> parse_innovation(std::string_view name) noexcept {
  if (name == "a" || name == "gaussian") return Innovation::Gaussian;
  if (name == "b" || name == "t3") return Innovation::StudentT3;
  if (name == "c" || name == "pareto") return Innovation::Pareto;
  return std::nullopt;
}

}  // namespace tvspec
