#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include "tvspec/errors.hpp"
#include "tvspec/pipeline.hpp"

namespace py = pybind11;
using namespace tvspec;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  return py::array_t<double>(static_cast<py::ssize_t>(v.size()), v.data());
}

py::array_t<double> to_matrix(const std::vector<double>& v, std::size_t rows, std::size_t cols) {
  py::array_t<double> out({static_cast<py::ssize_t>(rows), static_cast<py::ssize_t>(cols)});
  std::copy(v.begin(), v.end(), out.mutable_data());
  return out;
}

DgpModel dgp(const std::string& name) {
  auto m = parse_dgp(name);
  if (!m) throw InvalidArgument("unknown DGP " + name);
  return *m;
}

DegreeTail degree_tail(const std::string& name) {
  if (name == "threshold") return DegreeTail::Threshold;
  if (name == "renormalize") return DegreeTail::Renormalize;
  throw InvalidArgument("degree_tail must be 'threshold' or 'renormalize'");
}

PriorConfig make_prior(std::size_t k_max, const std::string& tail) {
  PriorConfig p;
  p.k_max = k_max;
  p.degree_tail = degree_tail(tail);
  return p;
}

}  // namespace

PYBIND11_MODULE(_tvspec, mod) {
  mod.doc() = "Bayesian nonparametric estimation of time-varying spectral densities";

  py::register_exception<EvaluationError>(mod, "EvaluationError", PyExc_RuntimeError);
  py::register_exception<InitializationError>(mod, "InitializationError", PyExc_RuntimeError);

  mod.def(
      "simulate",
      [](const std::string& model, std::size_t length, std::uint64_t seed, const std::string& innov) {
        auto kind = parse_innovation(innov);
        if (!kind) throw InvalidArgument("unknown innovation " + innov);
        Rng rng(seed);
        auto x = simulate_dgp({dgp(model), *kind, length}, rng);
        return to_array({x.values().begin(), x.values().end()});
      },
      py::arg("model"), py::arg("length"), py::arg("seed"), py::arg("innov") = "a");

  mod.def(
      "moving_periodograms",
      [](std::vector<double> x, std::size_t m) {
        auto pg = moving_periodograms(TimeSeries(std::move(x)), {m});
        return to_array(pg.ordinates);
      },
      py::arg("x"), py::arg("m") = 50,
      "MI_1..MI_T of a series of length T + 2m.");

  mod.def("fourier_frequencies", [](std::size_t m) { return to_array(fourier_frequencies(m)); },
          py::arg("m"));

  mod.def(
      "build_grid",
      [](std::size_t length, std::size_t m, std::size_t thinning) {
        auto g = build_grid(length, m, thinning);
        py::list out;
        for (const auto& e : g.entries) out.append(py::make_tuple(e.t, e.j));
        return out;
      },
      py::arg("length"), py::arg("m"), py::arg("thinning"),
      "(t, j) pairs entering the thinned likelihood.");

  mod.def(
      "true_tv_psd", [](const std::string& model, double u, double lam) { return true_tv_psd(dgp(model), u, lam); },
      py::arg("model"), py::arg("u"), py::arg("lam"));

  mod.def(
      "prior_prob_k1_equals_1",
      [](std::size_t k_max, const std::string& tail) {
        return prior_prob_k1_equals_1(make_prior(k_max, tail));
      },
      py::arg("k_max") = 100, py::arg("degree_tail") = "threshold");

  mod.def(
      "estimate",
      [](std::vector<double> x, std::size_t m, std::size_t thinning, std::size_t n_iter,
         std::size_t burn_in, std::size_t mcmc_thin, std::uint64_t seed, std::size_t k_max,
         const std::string& tail, std::size_t time_grid, std::size_t freq_grid,
         std::optional<std::string> truth) {
        EstimateConfig cfg;
        cfg.window.m = m;
        cfg.thinning = thinning;
        cfg.prior = make_prior(k_max, tail);
        cfg.sampler.n_iter = n_iter;
        cfg.sampler.burn_in = burn_in;
        cfg.sampler.mcmc_thin = mcmc_thin;
        cfg.sampler.seed = seed;
        cfg.time_grid = uniform_grid(time_grid);
        cfg.freq_grid = uniform_grid(freq_grid);
        const TimeSeries series(std::move(x));
        EstimateResult r;
        {
          py::gil_scoped_release release;
          r = estimate(series, cfg);
        }
        const auto& s = r.summary;
        const auto rows = s.time_grid.size(), cols = s.freq_grid.size();
        py::dict out;
        out["u"] = to_array(s.time_grid);
        out["lam"] = to_array(s.freq_grid);
        out["mean"] = to_matrix(s.mean, rows, cols);
        out["median"] = to_matrix(s.median, rows, cols);
        out["q05"] = to_matrix(s.q05, rows, cols);
        out["q95"] = to_matrix(s.q95, rows, cols);
        out["k1_pmf"] = to_array(s.k1_pmf);
        out["k2_pmf"] = to_array(s.k2_pmf);
        out["bayes_factor_01"] = s.bayes_factor_01;
        out["draw_count"] = s.draw_count;
        out["truncation"] = r.chain.truncation;
        std::vector<double> log_tau;
        for (const auto& d : r.chain.draws) log_tau.push_back(d.log_tau);
        out["log_tau"] = to_array(log_tau);
        if (truth) {
          auto rep = posterior_mean_ase(r, dgp(*truth), cfg.prior.basis);
          out["ase"] = rep.full;
          out["ase_interior"] = rep.interior;
        }
        return out;
      },
      py::arg("x"), py::arg("m") = 50, py::arg("thinning") = 2, py::arg("n_iter") = 110000,
      py::arg("burn_in") = 60000, py::arg("mcmc_thin") = 5, py::arg("seed") = 1,
      py::arg("k_max") = 100, py::arg("degree_tail") = "threshold", py::arg("time_grid") = 201,
      py::arg("freq_grid") = 101, py::arg("truth") = py::none(),
      "Runs the sampler and returns posterior summaries of the tv-PSD.");

  mod.attr("__version__") = "0.1.0";
}
