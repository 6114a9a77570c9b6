#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "hrs/checkpoint.hpp"
#include "hrs/experiment.hpp"
#include "hrs/metrics.hpp"
#include "hrs/model.hpp"
#include "hrs/render.hpp"
#include "hrs/sal.hpp"
#include "hrs/scheduler.hpp"

namespace py = pybind11;

namespace {

std::vector<double> to_vector(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
    std::vector<double> out(static_cast<std::size_t>(a.size()));
    std::copy(a.data(), a.data() + a.size(), out.begin());
    return out;
}

hrs::SalParams make_params(double revenue, double cost, double penalty, double tau) {
    hrs::SalParams sp;
    sp.revenue = revenue;
    sp.overprovision_cost = cost;
    sp.sla_penalty = penalty;
    sp.tau = tau;
    return sp;
}

//! Checkpoint-backed forecaster with its own render cache.
struct PyForecaster {
    hrs::Forecaster model;
    hrs::RenderCache cache;

    py::array_t<double> predict(
        py::array_t<double, py::array::c_style | py::array::forcecast> values,
        py::array_t<std::int64_t, py::array::c_style | py::array::forcecast> timestamps) {
        hrs::SeriesWindow w;
        w.lookback = to_vector(values);
        w.timestamps.assign(timestamps.data(), timestamps.data() + timestamps.size());
        if (w.lookback.empty()) throw std::invalid_argument("predict: empty lookback");
        w.lookback_min = *std::min_element(w.lookback.begin(), w.lookback.end());
        w.lookback_max = *std::max_element(w.lookback.begin(), w.lookback.end());
        const std::vector<double> yhat = model.predict(w, &cache);
        return py::array_t<double>(static_cast<py::ssize_t>(yhat.size()), yhat.data());
    }
};

}  // namespace

PYBIND11_MODULE(_hrs, m) {
    m.doc() = "Hybrid-representation load forecasting core";

    m.def(
        "synth_series",
        [](std::size_t length, std::int64_t interval, double base, double daily_amplitude,
           double weekly_amplitude, double burst_rate, double burst_scale, double noise_std,
           std::uint64_t seed) {
            hrs::SynthConfig cfg;
            cfg.length = length;
            cfg.interval = interval;
            cfg.base = base;
            cfg.daily_amplitude = daily_amplitude;
            cfg.weekly_amplitude = weekly_amplitude;
            cfg.burst_rate = burst_rate;
            cfg.burst_scale = burst_scale;
            cfg.noise_std = noise_std;
            cfg.seed = seed;
            const hrs::Series s = hrs::synth_generate(cfg);
            return py::make_tuple(
                py::array_t<double>(static_cast<py::ssize_t>(s.values.size()), s.values.data()),
                py::array_t<std::int64_t>(static_cast<py::ssize_t>(s.timestamps.size()),
                                          s.timestamps.data()));
        },
        py::arg("length") = 1080, py::arg("interval") = 3600, py::arg("base") = 300.0,
        py::arg("daily_amplitude") = 80.0, py::arg("weekly_amplitude") = 30.0,
        py::arg("burst_rate") = 1.5, py::arg("burst_scale") = 150.0, py::arg("noise_std") = 15.0,
        py::arg("seed") = 1, "Seeded synthetic bursty-load series as (values, timestamps)");

    m.def(
        "render_window",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> values,
           std::size_t height, std::size_t expansion, std::size_t line_width,
           std::array<double, 3> line, std::array<double, 3> background) {
            hrs::RenderConfig cfg;
            cfg.height = height;
            cfg.expansion = expansion;
            cfg.line_width = line_width;
            cfg.line = line;
            cfg.background = background;
            const hrs::ImageTensor img = hrs::render_series(to_vector(values), cfg);
            py::array_t<double> out({img.channels(), img.height, img.width});
            std::copy(img.data.begin(), img.data.end(), out.mutable_data());
            return out;
        },
        py::arg("values"), py::arg("height") = 32, py::arg("expansion") = 2,
        py::arg("line_width") = 2, py::arg("line") = std::array<double, 3>{1.0, 1.0, 1.0},
        py::arg("background") = std::array<double, 3>{0.0, 0.0, 0.0},
        "3-channel polyline raster of one window");

    m.def(
        "sal_exact",
        [](double actual, double predicted, double revenue, double cost, double penalty) {
            return hrs::sal_exact(actual, predicted, make_params(revenue, cost, penalty, 1.0));
        },
        py::arg("actual"), py::arg("predicted"), py::arg("revenue") = 0.0065,
        py::arg("cost") = 0.0035, py::arg("penalty") = 4.0);

    m.def(
        "uo_ratio",
        [](double revenue, double cost, double penalty) {
            return make_params(revenue, cost, penalty, 1.0).uo_ratio();
        },
        py::arg("revenue") = 0.0065, py::arg("cost") = 0.0035, py::arg("penalty") = 4.0);

    m.def(
        "apl",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> actual,
           py::array_t<double, py::array::c_style | py::array::forcecast> predicted,
           double revenue, double cost, double penalty) {
            return hrs::apl(to_vector(actual), to_vector(predicted),
                            make_params(revenue, cost, penalty, 1.0));
        },
        py::arg("actual"), py::arg("predicted"), py::arg("revenue") = 0.0065,
        py::arg("cost") = 0.0035, py::arg("penalty") = 4.0);

    m.def("sla_violations",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> actual,
             py::array_t<double, py::array::c_style | py::array::forcecast> predicted) {
              const auto [count, rate] = hrs::sla_violations(to_vector(actual), to_vector(predicted));
              return py::make_tuple(count, rate);
          });

    m.def("under_over_proportions",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> actual,
             py::array_t<double, py::array::c_style | py::array::forcecast> predicted) {
              const auto [under, over] =
                  hrs::under_over_proportions(to_vector(actual), to_vector(predicted));
              return py::make_tuple(under, over);
          });

    m.def("coefficient_of_variation",
          [](py::array_t<double, py::array::c_style | py::array::forcecast> values) {
              return hrs::coefficient_of_variation(to_vector(values));
          });

    m.def("decompose_timestamp", [](std::int64_t t) {
        const auto f = hrs::decompose_timestamp(t);
        return py::array_t<double>(static_cast<py::ssize_t>(f.size()), f.data());
    });

    py::class_<PyForecaster>(m, "Forecaster")
        .def_static("load",
                    [](const std::string& path) {
                        auto f = std::make_unique<PyForecaster>();
                        f->model = hrs::load_forecaster(path);
                        return f;
                    })
        .def("predict", &PyForecaster::predict, py::arg("values"), py::arg("timestamps"))
        .def_property_readonly("lookback",
                               [](const PyForecaster& f) { return f.model.config.lookback; })
        .def_property_readonly("horizon",
                               [](const PyForecaster& f) { return f.model.config.horizon; })
        .def_property_readonly("kind", [](const PyForecaster& f) {
            return hrs::model_kind_name(f.model.kind);
        });

    m.def(
        "greedy_simulate",
        [](py::array_t<double, py::array::c_style | py::array::forcecast> demand_forecast,
           std::vector<std::vector<double>> workload_forecasts, std::vector<double> capacities,
           py::array_t<double, py::array::c_style | py::array::forcecast> actual_demand,
           std::vector<std::vector<double>> actual_workloads, double revenue, double cost,
           double penalty) {
            if (capacities.size() != workload_forecasts.size() ||
                capacities.size() != actual_workloads.size()) {
                throw std::invalid_argument("greedy_simulate: fleet sizes disagree");
            }
            std::vector<hrs::Server> fleet(capacities.size());
            for (std::size_t i = 0; i < fleet.size(); ++i) {
                fleet[i].id = i;
                fleet[i].capacity = capacities[i];
                fleet[i].workload = actual_workloads[i];
            }
            const auto plan =
                hrs::greedy_schedule(to_vector(demand_forecast), workload_forecasts, fleet);
            const auto outcome = hrs::evaluate_plan(plan, to_vector(actual_demand), fleet,
                                                    make_params(revenue, cost, penalty, 1.0));
            py::dict out;
            out["under_loss"] = outcome.under_loss;
            out["over_loss"] = outcome.over_loss;
            out["total_loss"] = outcome.total_loss;
            out["sla_events"] = outcome.sla_events;
            out["served"] = outcome.served;
            out["unserved"] = outcome.unserved;
            return out;
        },
        py::arg("demand_forecast"), py::arg("workload_forecasts"), py::arg("capacities"),
        py::arg("actual_demand"), py::arg("actual_workloads"), py::arg("revenue") = 0.0065,
        py::arg("cost") = 0.0035, py::arg("penalty") = 4.0,
        "Greedy placement of forecast demand, evaluated against realized load");

    m.def(
        "run",
        [](const std::string& subcommand, const std::string& config_text,
           const std::string& out_dir, const std::string& checkpoint) {
            const hrs::KvConfig kv = hrs::KvConfig::parse_text(config_text);
            if (subcommand == "synth") return hrs::run_synth(kv, out_dir);
            if (subcommand == "train") return hrs::run_train(kv, out_dir);
            if (subcommand == "eval") return hrs::run_eval(kv, checkpoint, out_dir);
            if (subcommand == "simulate") return hrs::run_simulate(kv, checkpoint, out_dir);
            if (subcommand == "ablate") return hrs::run_ablate(kv, out_dir);
            throw std::invalid_argument("run: unknown subcommand '" + subcommand + "'");
        },
        py::arg("subcommand"), py::arg("config_text") = "", py::arg("out_dir") = "out",
        py::arg("checkpoint") = "", "Config-driven pipeline entry, mirrors the CLI");
}
