#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "tvspec/errors.hpp"
#include "tvspec/likelihood.hpp"
#include "tvspec/surface.hpp"

using namespace tvspec;

namespace {

MovingPeriodogramSet noise_periodograms(std::size_t n, std::size_t m, std::uint64_t seed) {
  Rng rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  std::vector<double> xs(n);
  for (auto& v : xs) v = z(rng);
  return moving_periodograms(TimeSeries(xs), {m});
}

SurfaceParams random_params(std::size_t k1, std::size_t k2, std::size_t L, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SurfaceParams p;
  p.tau = 0.5 + u(rng);
  p.k1 = k1;
  p.k2 = k2;
  for (std::size_t l = 0; l < L; ++l) p.measure.sticks.push_back(0.05 + 0.9 * u(rng));
  for (std::size_t l = 0; l <= L; ++l) {
    p.measure.atom_time.push_back(u(rng));
    p.measure.atom_freq.push_back(u(rng));
  }
  return p;
}

}  // namespace

TEST_CASE("unthinned grid covers 1..T") {
  auto g = build_grid(100, 10, 1);
  REQUIRE(g.entries.size() == 100);
  for (std::size_t i = 0; i < 100; ++i) {
    CHECK(g.entries[i].t == i + 1);
    CHECK(g.entries[i].j == i % 10 + 1);
  }
  auto h = build_grid(95, 10, 1);
  REQUIRE(h.entries.size() == 95);
  CHECK(h.entries.back().j == 5);
  std::set<std::size_t> ts;
  for (const auto& e : h.entries) ts.insert(e.t);
  CHECK(ts.size() == 95);
  CHECK(*ts.begin() == 1);
  CHECK(*ts.rbegin() == 95);
}

TEST_CASE("thinned grid with i = 2") {
  auto g = build_grid(1500, 50, 2);
  CHECK(full_block_count(1500, 50, 2) == 15);
  CHECK(g.blocks == 15);
  REQUIRE(g.entries.size() == 750);
  for (std::size_t l = 0; l < 15; ++l) {
    for (std::size_t j = 1; j <= 50; ++j) {
      const auto& e = g.entries[l * 50 + j - 1];
      CHECK(e.t == 100 * l + j);
      CHECK(e.j == j);
      CHECK(e.u == doctest::Approx(e.t / 1500.0));
    }
  }
}

TEST_CASE("thinning cost") {
  Rng rng(1);
  std::uniform_int_distribution<std::size_t> mt(2, 40);
  for (int rep = 0; rep < 30; ++rep) {
    const std::size_t m = mt(rng);
    const std::size_t T = m + std::uniform_int_distribution<std::size_t>(1, 2000)(rng);
    const double n1 = static_cast<double>(build_grid(T, m, 1).entries.size());
    for (std::size_t i : {2, 3}) {
      const double ni = static_cast<double>(build_grid(T, m, i).entries.size());
      CHECK(std::abs(ni - n1 / i) <= m);
    }
  }
  CHECK_THROWS_AS(build_grid(100, 10, 4), InvalidArgument);
  CHECK_THROWS_AS(build_grid(5, 10, 1), InvalidArgument);
}

TEST_CASE("constant surface closed form and its maximizer") {
  auto pg = noise_periodograms(400, 20, 2);
  auto g = build_grid(pg.length, 20, 2);
  double sum = 0.0;
  for (const auto& e : g.entries) sum += pg.ordinate(e.t);
  const double n = static_cast<double>(g.entries.size());
  for (double c : {0.05, 0.16, 1.0, 7.5}) {
    const double ll = log_dynamic_whittle([c](double, double) { return c; }, pg, g);
    CHECK(ll == doctest::Approx(-n * std::log(c) - sum / c).epsilon(1e-12));
  }
  const double best = sum / n;
  const double at_best = -n * std::log(best) - n;
  for (int s = -50; s <= 50; ++s) {
    if (s == 0) continue;
    const double c = best * std::exp(s / 100.0);
    CHECK(log_dynamic_whittle([c](double, double) { return c; }, pg, g) < at_best);
  }
}

TEST_CASE("matches a literal product") {
  auto pg = noise_periodograms(70, 5, 3);
  REQUIRE(pg.length == 60);
  auto g = build_grid(60, 5, 1);
  Rng rng(4);
  auto p = random_params(6, 9, 20, rng);
  auto f = [&](double u, double l) { return evaluate_surface(p, u, l); };
  double prod = 1.0;
  for (std::size_t t = 1; t <= 60; ++t) {
    const double lam = 2.0 * (1 + (t - 1) % 5) / 11.0;
    const double ft = f(t / 60.0, lam);
    prod *= std::exp(-pg.ordinate(t) / ft) / ft;
  }
  const double ll = log_dynamic_whittle(f, pg, g);
  CHECK(std::abs(ll - std::log(prod)) < 1e-10);
  CHECK(std::exp(ll) == doctest::Approx(prod).epsilon(1e-8));
}

TEST_CASE("one ordinate shifted by delta") {
  auto pg = noise_periodograms(200, 8, 5);
  auto g = build_grid(pg.length, 8, 1);
  Rng rng(6);
  auto p = random_params(4, 5, 20, rng);
  auto f = [&](double u, double l) { return evaluate_surface(p, u, l); };
  const double base = log_dynamic_whittle(f, pg, g);
  auto shifted = pg;
  const std::size_t t = 37;
  const double delta = 0.3;
  shifted.ordinates[t - 1] += delta;
  const auto& e = g.entries[t - 1];
  CHECK(base - log_dynamic_whittle(f, shifted, g) ==
        doctest::Approx(delta / f(e.u, e.lambda)).epsilon(1e-9));
}

TEST_CASE("evaluator statistics reproduce the direct likelihood") {
  auto pg = noise_periodograms(600, 25, 7);
  auto g = build_grid(pg.length, 25, 2);
  WhittleEvaluator ev(pg, g, {}, 4);
  Rng rng(8);
  double mean = 0.0;
  for (double v : pg.ordinates) mean += v;
  CHECK(ev.mean_ordinate() > 0.0);
  for (auto [k1, k2] : {std::pair{1, 1}, {3, 17}, {40, 2}, {100, 100}}) {
    auto p = random_params(k1, k2, 20, rng);
    auto w = stick_weights(p.measure.sticks);
    auto st = ev.mixture_stats(k1, k2, w, p.measure.atom_time, p.measure.atom_freq);
    CHECK(st.count == g.entries.size());
    const double direct =
        log_dynamic_whittle([&](double u, double l) { return evaluate_surface(p, u, l); }, pg, g);
    CHECK(st.log_likelihood(std::log(p.tau)) == doctest::Approx(direct).epsilon(1e-11));
  }
}

TEST_CASE("non-finite terms name the entry") {
  auto pg = noise_periodograms(100, 5, 9);
  auto g = build_grid(pg.length, 5, 1);
  auto f = [](double u, double) { return u > 0.5 ? 0.0 : 1.0; };
  try {
    (void)log_dynamic_whittle(f, pg, g);
    FAIL("expected throw");
  } catch (const EvaluationError& e) {
    CHECK(std::string(e.what()).find("t = 46") != std::string::npos);
  }
}
