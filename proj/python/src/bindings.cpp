#include <pybind11/complex.h>
#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "feller/analytic.hpp"
#include "feller/cli.hpp"
#include "feller/experiments.hpp"
#include "feller/sampler.hpp"

namespace py = pybind11;
using namespace feller;

namespace {

ProcessParams process(double sigma2, double x0, double t0) {
  ProcessParams p{sigma2, x0, t0};
  p.validate();
  return p;
}

SimConfig sim_config(double sigma2, double x0, double tn, double dt, std::size_t n_paths,
                     std::uint64_t seed, double t0) {
  SimConfig cfg;
  cfg.seed = seed;
  cfg.n_paths = n_paths;
  cfg.tn = tn;
  cfg.dt = dt;
  cfg.process = {sigma2, x0, t0};
  cfg.validate();
  return cfg;
}

py::object optional_index(const std::optional<std::size_t>& v) {
  return v ? py::object(py::int_(*v)) : py::object(py::none());
}

}  // namespace

PYBIND11_MODULE(_feller, m) {
  m.doc() = "Exact simulation and closed-form analysis of Feller diffusion.";

  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  m.def(
      "absorption_probability",
      [](double sigma2, double x0, double t, double t0) {
        return absorption_probability(process(sigma2, x0, t0), t);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("t"), py::arg("t0") = 0.0);
  m.def(
      "survival_probability",
      [](double sigma2, double x0, double t, double t0) {
        return survival_probability(process(sigma2, x0, t0), t);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("t"), py::arg("t0") = 0.0);
  m.def(
      "characteristic_function",
      [](double sigma2, double x0, double k, double t, double t0) {
        return characteristic_function(process(sigma2, x0, t0), k, t);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("k"), py::arg("t"), py::arg("t0") = 0.0);
  m.def(
      "transition_density",
      [](double sigma2, double x0, double x, double t, double t0) {
        const auto d = transition_density(process(sigma2, x0, t0), x, t);
        return py::make_tuple(d.atom, d.continuous);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("x"), py::arg("t"), py::arg("t0") = 0.0,
      "Returns (atom mass at 0, continuous density at x).");
  m.def(
      "hitting_time_density",
      [](double sigma2, double x0, py::array_t<double> t, double t0) {
        const auto p = process(sigma2, x0, t0);
        return py::vectorize([&p](double s) { return hitting_time_density(p, s); })(t);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("t"), py::arg("t0") = 0.0);
  m.def(
      "typical_hitting_time",
      [](double sigma2, double x0, double t0) { return typical_hitting_time(process(sigma2, x0, t0)); },
      py::arg("sigma2"), py::arg("x0"), py::arg("t0") = 0.0);
  m.def(
      "truncated_mean_hitting_time",
      [](double sigma2, double x0, double horizon, double t0) {
        return truncated_mean_hitting_time(process(sigma2, x0, t0), horizon).value;
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("horizon"), py::arg("t0") = 0.0);
  m.def(
      "ci_half_width",
      [](double sigma2, double x0, double t, std::size_t n_paths, double alpha, double t0) {
        return ci_half_width(process(sigma2, x0, t0), t, n_paths, alpha);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("t"), py::arg("n_paths"), py::arg("alpha") = 0.05,
      py::arg("t0") = 0.0);

  m.def(
      "simulate_paths",
      [](double sigma2, double x0, double tn, double dt, std::size_t n_paths, std::uint64_t seed,
         double t0, unsigned workers) {
        const auto cfg = sim_config(sigma2, x0, tn, dt, n_paths, seed, t0);
        EnsembleOptions eo;
        eo.workers = workers;
        PathEnsemble ens;
        {
          py::gil_scoped_release release;
          ens = generate_ensemble(cfg, eo);
        }
        const std::size_t n = ens.times.size();
        py::array_t<double> times(static_cast<py::ssize_t>(n), ens.times.data());
        py::array_t<double> positions({static_cast<py::ssize_t>(n_paths), static_cast<py::ssize_t>(n)});
        auto view = positions.mutable_unchecked<2>();
        for (std::size_t i = 0; i < n_paths; ++i)
          for (std::size_t j = 0; j < n; ++j) view(i, j) = ens.positions[i][j];
        py::list absorbed;
        for (const auto& a : ens.absorbed_at) absorbed.append(optional_index(a));
        return py::make_tuple(times, positions, absorbed);
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("tn"), py::arg("dt") = 1.0,
      py::arg("n_paths") = 100, py::arg("seed") = 0, py::arg("t0") = 0.0, py::arg("workers") = 0,
      "Returns (times, positions[n_paths, n_times], absorbed_at indices or None).");

  m.def(
      "table",
      [](int id, std::uint64_t seed, std::size_t n_paths, bool analytic) {
        const auto preset = table_preset(id, seed, n_paths);
        ExperimentOptions opts;
        opts.simulate = !analytic;
        py::list rows;
        if (preset.kind == TableKind::survival) {
          SurvivalReport r;
          {
            py::gil_scoped_release release;
            r = run_survival_experiment(preset.cfgs, preset.checkpoints, preset.sweep, opts);
          }
          for (const auto& row : r.rows) {
            py::dict d;
            d["param"] = row.parameter;
            d["t"] = row.time;
            d["theoretical"] = row.theoretical;
            d["simulated"] = row.simulated;
            d["std_error"] = row.std_error;
            rows.append(d);
          }
        } else {
          MeanPositionReport r;
          {
            py::gil_scoped_release release;
            r = run_mean_position_experiment(preset.cfgs, preset.checkpoints, preset.alpha, opts);
          }
          for (const auto& row : r.rows) {
            py::dict d;
            d["x0"] = row.x0;
            d["t"] = row.time;
            d["mean"] = row.mean;
            d["ci_lower"] = row.ci_lower;
            d["ci_upper"] = row.ci_upper;
            d["covers_x0"] = row.covers_x0;
            rows.append(d);
          }
        }
        return rows;
      },
      py::arg("id"), py::arg("seed") = 0, py::arg("n_paths") = 10000, py::arg("analytic") = false,
      "Rows of table preset 1-6 as dicts.");

  m.def(
      "hitting_times",
      [](double sigma2, double x0, double tn, double dt, std::size_t n_paths, std::uint64_t seed,
         std::size_t n_bins) {
        const auto cfg = sim_config(sigma2, x0, tn, dt, n_paths, seed, 0.0);
        HittingTimeOptions ho;
        ho.n_bins = n_bins;
        HittingTimeResult r;
        {
          py::gil_scoped_release release;
          r = run_hitting_time_experiment(cfg, ho);
        }
        std::vector<double> density;
        for (std::size_t i = 0; i < r.histogram.n_bins(); ++i) density.push_back(r.histogram.value(i));
        py::dict d;
        d["edges"] = r.histogram.edges;
        d["counts"] = r.histogram.counts;
        d["density"] = density;
        d["f_theory"] = r.overlay;
        d["tstar"] = r.typical_time;
        d["censored"] = r.censored;
        return d;
      },
      py::arg("sigma2"), py::arg("x0"), py::arg("tn"), py::arg("dt") = 1.0,
      py::arg("n_paths") = 10000, py::arg("seed") = 0, py::arg("n_bins") = 80);

  m.def(
      "run_cli",
      [](std::vector<std::string> args) {
        args.insert(args.begin(), "feller");
        std::ostringstream out, err;
        int code;
        {
          py::gil_scoped_release release;
          code = cli::run(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), "Runs the command line in-process; returns (exit code, stdout, stderr).");
}
