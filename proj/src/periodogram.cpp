#include "tvspec/periodogram.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "tvspec/errors.hpp"

namespace tvspec {

std::vector<double> fourier_frequencies(std::size_t m) {
  if (m == 0) {
    throw InvalidArgument("half-window m must be at least 1");
  }
  std::vector<double> lambda(m);
  const double denom = static_cast<double>(2 * m + 1);
  for (std::size_t j = 1; j <= m; ++j) {
    lambda[j - 1] = 2.0 * static_cast<double>(j) / denom;
  }
  return lambda;
}

MovingPeriodogramSet moving_periodograms(const TimeSeries& x, const WindowConfig& cfg) {
  const std::size_t m = cfg.m;
  if (m == 0) {
    throw InvalidArgument("half-window m must be at least 1");
  }
  if (x.size() < min_series_length(m)) {
    throw InvalidArgument("series of length " + std::to_string(x.size()) +
                          " is too short for m = " + std::to_string(m) +
                          "; at least " + std::to_string(min_series_length(m)) +
                          " samples are required");
  }

  MovingPeriodogramSet out;
  out.m = m;
  out.length = x.size() - 2 * m;
  out.frequencies = fourier_frequencies(m);
  out.ordinates.resize(out.length);

  const std::size_t width = 2 * m + 1;
  const double norm = 2.0 * std::numbers::pi * static_cast<double>(width);

  // Per-frequency twiddle tables: cos/sin(pi * nu * lambda_j), nu = 0..2m.
  std::vector<double> cos_table(m * width);
  std::vector<double> sin_table(m * width);
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t nu = 0; nu < width; ++nu) {
      // pi * nu * 2(j+1)/(2m+1), reduced modulo 2pi through the integer product.
      const std::size_t k = (nu * (j + 1)) % width;
      const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(width);
      cos_table[j * width + nu] = std::cos(angle);
      sin_table[j * width + nu] = std::sin(angle);
    }
  }

  const auto values = x.values();
  for (std::size_t t = 1; t <= out.length; ++t) {
    const std::size_t j = mod_index(t, m) - 1;
    const double* c = cos_table.data() + j * width;
    const double* s = sin_table.data() + j * width;
    const double* window = values.data() + (t - 1);
    double re = 0.0;
    double im = 0.0;
    for (std::size_t nu = 0; nu < width; ++nu) {
      re += window[nu] * c[nu];
      im -= window[nu] * s[nu];
    }
    out.ordinates[t - 1] = (re * re + im * im) / norm;
  }
  return out;
}

}  // namespace tvspec
