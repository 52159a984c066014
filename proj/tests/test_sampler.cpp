#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "tvspec/errors.hpp"
#include "tvspec/sampler.hpp"

using namespace tvspec;

namespace {

MovingPeriodogramSet ls1_periodograms(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  auto x = simulate_dgp({DgpModel::LS1, Innovation::Gaussian, n}, rng);
  return moving_periodograms(x, {10});
}

double ks_uniform(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  double d = 0.0;
  const double n = static_cast<double>(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) {
    d = std::max({d, (i + 1) / n - xs[i], xs[i] - i / n});
  }
  return d * std::sqrt(n);
}

}  // namespace

TEST_CASE("identity and out-of-range moves") {
  auto pg = ls1_periodograms(300, 1);
  auto grid = build_grid(pg.length, 10, 1);
  WhittleEvaluator ev(pg, grid, {});
  PriorConfig prior;
  SamplerConfig cfg;
  cfg.k_init = 1;
  Rng rng(2);
  Chain chain(prior, cfg, 20, &ev, rng);
  for (int i = 0; i < 50; ++i) {
    CHECK(chain.try_degree(1, 1, rng));
    CHECK(chain.k1() == 1);
  }
  CHECK_FALSE(chain.try_degree(1, 0, rng));
  CHECK_FALSE(chain.try_degree(2, 101, rng));
  CHECK(chain.k1() == 1);
  for (auto b : {Block::AtomTime, Block::AtomFreq, Block::Sticks}) {
    const auto z = chain.block_coordinates(b);
    const std::vector<double> same(z.begin(), z.end());
    for (int i = 0; i < 20; ++i) CHECK(chain.try_block(b, same, rng));
  }
  const double lt = chain.log_tau();
  for (int i = 0; i < 20; ++i) CHECK(chain.try_log_tau(lt, rng));

  // vanishing width: every tau proposal is (numerically) the current state
  chain.set_tau_width(1e-300);
  for (int i = 0; i < 200; ++i) CHECK(chain.step_tau(rng));
}

TEST_CASE("tau width adapts during burn-in only") {
  PriorConfig prior;
  prior.tau_shape = 4.0;
  prior.tau_rate = 4.0;
  SamplerConfig cfg;
  cfg.n_iter = 3000;
  cfg.burn_in = 1000;
  Rng rng(3);
  Chain chain(prior, cfg, 20, nullptr, rng);
  for (int i = 0; i < 1000; ++i) chain.sweep(rng);
  const double frozen = chain.tau_width();
  CHECK(frozen != cfg.tau_width_init);
  for (int i = 0; i < 500; ++i) chain.sweep(rng);
  CHECK(chain.tau_width() == frozen);
}

TEST_CASE("tau move on a near-Gaussian target with unit width") {
  // IG(16, 16): ln tau is log-gamma with sd sqrt(trigamma(16)) ~ 0.25
  PriorConfig prior;
  prior.tau_shape = 16.0;
  prior.tau_rate = 16.0;
  SamplerConfig cfg;
  Rng rng(4);
  Chain chain(prior, cfg, 20, nullptr, rng);
  chain.set_tau_width(1.0);
  int acc = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) acc += chain.step_tau(rng);
  const double rate = static_cast<double>(acc) / n;
  CHECK(rate > 0.2);
  CHECK(rate < 0.8);
}

TEST_CASE("flat degree target gives a uniform k1 marginal") {
  // Poisson(1) steps over 100 states mix slowly: 1e5 steps leave a
  // median TV near 0.06, so the kernel is checked over 1e6 steps here.
  PriorConfig prior;
  prior.degree_decay = 0.0;
  prior.degree_tail = DegreeTail::Renormalize;
  SamplerConfig cfg;
  Rng rng(5);
  Chain chain(prior, cfg, 20, nullptr, rng);
  const std::size_t n = 1'000'000;
  std::vector<double> counts(100, 0.0);
  for (std::size_t it = 0; it < n; ++it) {
    chain.step_degree(1, rng);
    counts[chain.k1() - 1] += 1.0;
  }
  double tv = 0.0;
  for (double c : counts) tv += std::abs(c / n - 0.01);
  CHECK(0.5 * tv <= 0.05);
}

TEST_CASE("prior-only atoms are uniform") {
  PriorConfig prior;
  prior.degree_decay = 0.0;
  prior.degree_tail = DegreeTail::Renormalize;
  SamplerConfig cfg;
  cfg.n_iter = 120'000;
  cfg.burn_in = 20'000;
  Rng rng(5);
  Chain chain(prior, cfg, 20, nullptr, rng);
  for (std::size_t it = 0; it < cfg.burn_in; ++it) chain.sweep(rng);
  std::vector<double> w_time, w_freq;
  for (std::size_t it = cfg.burn_in; it < cfg.n_iter; ++it) {
    chain.sweep(rng);
    if (it % 100 == 99) {
      auto p = chain.params();
      w_time.push_back(p.measure.atom_time[3]);
      w_freq.push_back(p.measure.atom_freq[11]);
    }
  }
  // Kolmogorov-Smirnov at level 0.01 on thinned draws
  CHECK(ks_uniform(w_time) < 1.63);
  CHECK(ks_uniform(w_freq) < 1.63);
}

TEST_CASE("two-state degree space matches hand-computed odds") {
  // k_max = 2, rho(1) / rho(2) = exp(c 2 ln 2) = 4 for c = 1
  PriorConfig prior;
  prior.k_max = 2;
  prior.degree_decay = 1.0;
  prior.degree_tail = DegreeTail::Renormalize;
  SamplerConfig cfg;
  Rng rng(6);
  Chain chain(prior, cfg, 20, nullptr, rng);
  const std::size_t batches = 50, per = 2000;
  std::vector<double> means;
  for (std::size_t b = 0; b < batches; ++b) {
    double ones = 0.0;
    for (std::size_t i = 0; i < per; ++i) {
      chain.sweep(rng);
      ones += chain.k1() == 1 ? 1.0 : 0.0;
    }
    means.push_back(ones / per);
  }
  const double mean = std::accumulate(means.begin(), means.end(), 0.0) / batches;
  double var = 0.0;
  for (double m : means) var += (m - mean) * (m - mean);
  const double se = std::sqrt(var / (batches - 1) / batches);
  CHECK(std::abs(mean - 0.8) < 3.0 * se + 1e-3);
}

TEST_CASE("adaptive proposal on a correlated Gaussian") {
  const Eigen::Index d = 10;
  Eigen::MatrixXd cov(d, d);
  for (Eigen::Index i = 0; i < d; ++i) {
    for (Eigen::Index j = 0; j < d; ++j) cov(i, j) = std::pow(0.9, std::abs(i - j)) * std::sqrt((1.0 + i) * (1.0 + j));
  }
  const Eigen::MatrixXd prec = cov.inverse();
  auto logp = [&](const Eigen::VectorXd& x) { return -0.5 * x.dot(prec * x); };
  SamplerConfig cfg;
  BlockAdaptation ad(static_cast<std::size_t>(d));
  Rng rng(7);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  std::size_t accepted = 0, proposed = 0;
  const std::size_t n = 40000;
  for (std::size_t it = 0; it < n; ++it) {
    const Eigen::VectorXd y = x + propose_block_step(ad, it, cfg, rng);
    const bool ok = std::log(unif(rng)) < logp(y) - logp(x);
    if (ok) x = y;
    if (it >= n / 2) {
      ++proposed;
      accepted += ok;
    }
    ad.update(std::span<const double>(x.data(), static_cast<std::size_t>(d)));
  }
  const double rate = static_cast<double>(accepted) / proposed;
  CHECK(rate > 0.1);
  CHECK(rate < 0.5);
  // the empirical covariance has found the target's scale
  CHECK(ad.covariance()(d - 1, d - 1) == doctest::Approx(cov(d - 1, d - 1)).epsilon(0.3));
}

TEST_CASE("seeded chains are reproducible and the cache does not drift") {
  auto pg = ls1_periodograms(400, 8);
  auto grid = build_grid(pg.length, 10, 2);
  PriorConfig prior;
  SamplerConfig cfg;
  cfg.n_iter = 10'000;
  cfg.burn_in = 5000;
  cfg.mcmc_thin = 10;
  cfg.verify_every = 500;
  Rng a(9), b(9);
  auto ra = run_chain(pg, grid, prior, cfg, a);
  auto rb = run_chain(pg, grid, prior, cfg, b);
  REQUIRE(ra.draws.size() == 500);
  REQUIRE(rb.draws.size() == 500);
  for (std::size_t i = 0; i < ra.draws.size(); ++i) {
    const auto& x = ra.draws[i];
    const auto& y = rb.draws[i];
    CHECK(x.log_tau == y.log_tau);
    CHECK(x.params.k1 == y.params.k1);
    CHECK(x.params.k2 == y.params.k2);
    CHECK(x.params.measure.sticks == y.params.measure.sticks);
    CHECK(x.params.measure.atom_time == y.params.measure.atom_time);
    CHECK(x.log_posterior == y.log_posterior);
  }
  CHECK(ra.max_cache_drift <= 1e-8);
  for (const auto& d : ra.draws) {
    CHECK(std::isfinite(d.log_posterior));
    CHECK(std::isfinite(d.log_likelihood));
  }
}

TEST_CASE("draw log-posterior is likelihood plus natural-scale prior") {
  auto pg = ls1_periodograms(300, 10);
  auto grid = build_grid(pg.length, 10, 1);
  WhittleEvaluator ev(pg, grid, {});
  PriorConfig prior;
  SamplerConfig cfg;
  Rng rng(11);
  Chain chain(prior, cfg, 20, &ev, rng);
  for (int i = 0; i < 300; ++i) chain.sweep(rng);
  const auto d = chain.draw();
  const double ll = log_dynamic_whittle(
      [&](double u, double l) { return evaluate_surface(d.params, u, l); }, pg, grid);
  CHECK(d.log_likelihood == doctest::Approx(ll).epsilon(1e-10));
  CHECK(d.log_posterior == doctest::Approx(ll + log_prior(d.params, prior)).epsilon(1e-10));
}

TEST_CASE("retention schedule") {
  auto pg = ls1_periodograms(200, 12);
  auto grid = build_grid(pg.length, 10, 1);
  SamplerConfig cfg;
  cfg.n_iter = 2000;
  cfg.burn_in = 1000;
  cfg.mcmc_thin = 1;
  Rng rng(13);
  CHECK(run_chain(pg, grid, {}, cfg, rng).draws.size() == 1000);
  cfg.mcmc_thin = 7;
  CHECK(run_chain(pg, grid, {}, cfg, rng).draws.size() == 142);
  cfg.burn_in = 2000;
  CHECK_THROWS_AS(cfg.validate(), InvalidArgument);
}
