#pragma once

#include <cstddef>
#include <vector>

#include "tvspec/signal.hpp"

namespace tvspec {

struct WindowConfig {
  std::size_t m = 50;  ///< half-window; windows span 2m + 1 samples
};

/// Moving periodogram ordinates MI_1..MI_T of a series of length N = T + 2m.
///
/// Internal time t (1-based) uses the window x[t .. t + 2m] of the observed
/// samples, i.e. it is centred on original sample t + m. Ordinate t is taken at
/// frequency lambda_{mod(t)}.
struct MovingPeriodogramSet {
  std::size_t m = 0;
  std::size_t length = 0;            ///< effective length T = N - 2m
  std::vector<double> ordinates;     ///< ordinates[t - 1] = MI_t
  std::vector<double> frequencies;   ///< frequencies[j - 1] = lambda_j

  [[nodiscard]] double ordinate(std::size_t t) const { return ordinates.at(t - 1); }
};

/// lambda_j = 2j / (2m + 1), j = 1..m.
std::vector<double> fourier_frequencies(std::size_t m);

/// 1 + ((t - 1) mod m): the frequency index used at internal time t.
[[nodiscard]] constexpr std::size_t mod_index(std::size_t t, std::size_t m) noexcept {
  return 1 + ((t - 1) % m);
}

/// Smallest series length for which at least one ordinate exists.
[[nodiscard]] constexpr std::size_t min_series_length(std::size_t m) noexcept {
  return 2 * m + 2;
}

/// Direct complex summation in ascending window order; there is no FFT
/// shortcut because every window uses a different frequency.
MovingPeriodogramSet moving_periodograms(const TimeSeries& x, const WindowConfig& cfg);

}  // namespace tvspec
