#include "hrs/experiment.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hrs/checkpoint.hpp"
#include "hrs/svg.hpp"

namespace hrs {

namespace {

std::array<double, 3> parse_triple(const std::string& text, const std::string& key) {
    std::array<double, 3> out{};
    if (std::sscanf(text.c_str(), "%lf %lf %lf", &out[0], &out[1], &out[2]) != 3) {
        throw std::runtime_error("config: key '" + key + "' wants three numbers, got: " + text);
    }
    return out;
}

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

//! Collects output files and finishes with the run manifest.
class ArtifactWriter {
public:
    ArtifactWriter(std::string dir, const KvConfig& kv, std::uint64_t seed)
        : dir_(std::move(dir)), kv_(kv), seed_(seed) {
        std::filesystem::create_directories(dir_);
    }

    std::string path(const std::string& name) const { return dir_ + "/" + name; }

    std::ofstream open(const std::string& name) {
        paths_.push_back(path(name));
        std::ofstream out(paths_.back());
        if (!out) throw std::runtime_error("run: cannot open " + paths_.back() + " for writing");
        return out;
    }

    void note(const std::string& name) { paths_.push_back(path(name)); }

    std::vector<std::string> finish() {
        write_manifest(path("manifest.txt"), kv_, seed_, paths_);
        paths_.push_back(path("manifest.txt"));
        return paths_;
    }

private:
    std::string dir_;
    const KvConfig& kv_;
    std::uint64_t seed_;
    std::vector<std::string> paths_;
};

}  // namespace

ExperimentConfig parse_experiment(const KvConfig& kv) {
    ExperimentConfig ec;
    ec.seed = kv.get_uint("run.seed", 1);

    // Dataset.
    const std::string source = kv.get("dataset.source", "synth");
    if (source == "synth") {
        ec.dataset.source = DatasetSpec::Source::synth;
    } else if (source == "csv") {
        ec.dataset.source = DatasetSpec::Source::csv;
        ec.dataset.csv_path = kv.require("dataset.csv_path");
    } else {
        throw std::runtime_error("config: dataset.source must be 'synth' or 'csv'");
    }
    SynthConfig& sy = ec.dataset.synth;
    sy.length = kv.get_uint("dataset.length", sy.length);
    sy.interval = kv.get_int("dataset.interval", sy.interval);
    if (kv.has("dataset.start")) {
        if (!parse_timestamp(kv.require("dataset.start"), sy.start)) {
            throw std::runtime_error("config: dataset.start is not a timestamp");
        }
    }
    sy.base = kv.get_double("dataset.base", sy.base);
    sy.daily_amplitude = kv.get_double("dataset.daily_amplitude", sy.daily_amplitude);
    sy.weekly_amplitude = kv.get_double("dataset.weekly_amplitude", sy.weekly_amplitude);
    sy.burst_rate = kv.get_double("dataset.burst_rate", sy.burst_rate);
    sy.burst_scale = kv.get_double("dataset.burst_scale", sy.burst_scale);
    sy.noise_std = kv.get_double("dataset.noise_std", sy.noise_std);
    sy.seed = kv.get_uint("dataset.seed", ec.seed);
    ec.dataset.csv_value_column = kv.get("dataset.value_column", ec.dataset.csv_value_column);
    ec.dataset.csv_timestamp_column =
        kv.get("dataset.timestamp_column", ec.dataset.csv_timestamp_column);
    if (kv.has("dataset.split")) {
        ec.dataset.split_ratios = parse_triple(kv.require("dataset.split"), "dataset.split");
    }
    ec.dataset.stride = kv.get_uint("dataset.stride", ec.dataset.stride);

    // Model.
    const std::string kind = kv.get("model.kind", "hrs");
    if (!model_kind_from_name(kind, ec.model_kind)) {
        throw std::runtime_error("config: model.kind must be 'hrs' or 'linear'");
    }
    HrsConfig& m = ec.model;
    m.lookback = kv.get_uint("model.lookback", 24);
    m.horizon = kv.get_uint("model.horizon", 24);
    m.embed_dim = kv.get_uint("model.embed_dim", 8);
    m.fused_tokens = kv.get_uint("model.fused_tokens", 32);
    m.conv_kernel_h = kv.get_uint("model.conv_kernel_h", 8);
    m.conv_kernel_w = kv.get_uint("model.conv_kernel_w", 8);
    m.conv_stride_h = kv.get_uint("model.conv_stride_h", m.conv_kernel_h);
    m.conv_stride_w = kv.get_uint("model.conv_stride_w", m.conv_kernel_w);
    m.conv1d_kernel = kv.get_uint("model.conv1d_kernel", 3);
    m.timestamp_fields = kv.get_uint("model.timestamp_fields", kTimestampFields);
    m.token_hidden = kv.get_uint("model.token_hidden", 0);
    m.dim_hidden = kv.get_uint("model.dim_hidden", 0);
    if (kv.has("model.ablation")) {
        if (!ablation_from_name(kv.require("model.ablation"), m.ablation)) {
            throw std::runtime_error(
                "config: model.ablation must be one of none|vfem|nfem|ffm|mdm");
        }
    }

    // Render.
    RenderConfig& r = m.render;
    r.height = kv.get_uint("render.height", r.height);
    r.expansion = kv.get_uint("render.expansion", r.expansion);
    r.line_width = kv.get_uint("render.line_width", r.line_width);
    if (kv.has("render.line_color")) {
        const auto c = parse_triple(kv.require("render.line_color"), "render.line_color");
        r.line = {c[0], c[1], c[2]};
    }
    if (kv.has("render.background_color")) {
        const auto c =
            parse_triple(kv.require("render.background_color"), "render.background_color");
        r.background = {c[0], c[1], c[2]};
    }

    // Training.
    TrainConfig& t = ec.train;
    const std::string loss = kv.get("train.loss", "sal");
    if (!loss_kind_from_name(loss, t.loss)) {
        throw std::runtime_error("config: train.loss must be 'mse' or 'sal'");
    }
    t.learning_rate = kv.get_double("train.learning_rate", t.learning_rate);
    t.batch_size = kv.get_uint("train.batch_size", t.batch_size);
    t.max_epochs = kv.get_uint("train.max_epochs", t.max_epochs);
    t.patience = kv.get_uint("train.patience", t.patience);
    t.seed = kv.get_uint("train.seed", ec.seed);

    // SAL coefficients.
    SalParams& sp = ec.sal;
    sp.revenue = kv.get_double("sal.revenue", sp.revenue);
    sp.overprovision_cost = kv.get_double("sal.overprovision_cost", sp.overprovision_cost);
    sp.sla_penalty = kv.get_double("sal.sla_penalty", sp.sla_penalty);
    sp.tau = kv.get_double("sal.tau", 0.0);  // non-positive -> scale-aware default
    sp.validate();
    t.sal = sp;

    // Scheduling scenario; demand reuses the synthetic generator settings.
    ScenarioConfig& sc = ec.scenario;
    sc.servers = kv.get_uint("scenario.servers", sc.servers);
    sc.horizon = kv.get_uint("scenario.horizon", sc.horizon);
    sc.seed = kv.get_uint("scenario.seed", ec.seed);
    sc.capacity_min = kv.get_double("scenario.capacity_min", sc.capacity_min);
    sc.capacity_max = kv.get_double("scenario.capacity_max", sc.capacity_max);
    sc.workload_base = kv.get_double("scenario.workload_base", sc.workload_base);
    sc.workload_daily_amplitude =
        kv.get_double("scenario.workload_daily_amplitude", sc.workload_daily_amplitude);
    sc.workload_noise_std = kv.get_double("scenario.workload_noise_std", sc.workload_noise_std);
    sc.demand = ec.dataset.synth;
    return ec;
}

Series load_series(const DatasetSpec& spec) {
    if (spec.source == DatasetSpec::Source::synth) return synth_generate(spec.synth);
    return load_csv(spec.csv_path, spec.csv_value_column, spec.csv_timestamp_column).series;
}

SplitDataset load_dataset(const ExperimentConfig& ec) {
    const Series series = load_series(ec.dataset);
    const auto windows =
        window_dataset(series, ec.model.lookback, ec.model.horizon, ec.dataset.stride);
    return split(windows, ec.dataset.split_ratios, ec.model.lookback, ec.model.horizon);
}

std::map<std::string, std::string> parse_record(const std::string& line) {
    std::map<std::string, std::string> out;
    std::istringstream is(line);
    std::string token;
    while (is >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos) out[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return out;
}

std::vector<std::string> run_synth(const KvConfig& kv, const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    if (ec.dataset.source != DatasetSpec::Source::synth) {
        throw std::runtime_error("synth: dataset.source must be 'synth'");
    }
    const Series series = synth_generate(ec.dataset.synth);
    ArtifactWriter w(out_dir, kv, ec.seed);
    write_csv(w.path("series.csv"), series, ec.dataset.csv_value_column,
              ec.dataset.csv_timestamp_column);
    w.note("series.csv");
    return w.finish();
}

std::vector<std::string> run_render(const KvConfig& kv, const std::string& out_dir,
                                    std::size_t window_index) {
    const ExperimentConfig ec = parse_experiment(kv);
    const Series series = load_series(ec.dataset);
    const auto windows =
        window_dataset(series, ec.model.lookback, ec.model.horizon, ec.dataset.stride);
    if (window_index >= windows.size()) {
        throw std::runtime_error("render: window index " + std::to_string(window_index) +
                                 " out of range (have " + std::to_string(windows.size()) + ")");
    }
    const ImageTensor img = render_series(windows[window_index].lookback, ec.model.render);
    ArtifactWriter w(out_dir, kv, ec.seed);
    const std::string name = "window_" + std::to_string(window_index) + ".ppm";
    write_ppm(img, 0, w.path(name));
    w.note(name);
    return w.finish();
}

namespace {

void write_history(std::ofstream& out, const TrainResult& res) {
    for (std::size_t i = 0; i < res.history.size(); ++i) {
        out << "epoch=" << (i + 1) << " train_loss=" << fmt17(res.history[i].train_loss)
            << " val_loss=" << fmt17(res.history[i].val_loss) << "\n";
    }
    out << "best_epoch=" << (res.best_epoch + 1) << " best_val=" << fmt17(res.best_val) << "\n";
}

void write_forecast_track(std::ofstream& out, const Forecaster& f,
                          const std::vector<SeriesWindow>& test) {
    // Non-overlapping horizon stitching gives one continuous track.
    RenderCache cache;
    const std::size_t step = f.config.horizon;
    for (std::size_t i = 0; i < test.size();) {
        const SeriesWindow& w = test[i];
        const auto yhat = f.predict(w, &cache);
        for (std::size_t j = 0; j < w.horizon.size(); ++j) {
            const std::int64_t t =
                w.timestamps.back() + static_cast<std::int64_t>(j + 1) *
                                          (w.timestamps[1] - w.timestamps[0]);
            out << "t=" << t << " actual=" << fmt17(w.horizon[j])
                << " predicted=" << fmt17(yhat[j]) << "\n";
        }
        // Advance by one horizon worth of windows when the stride allows.
        std::size_t next = i + 1;
        while (next < test.size() && test[next].offset < w.offset + step) ++next;
        if (next == i) break;
        i = next;
    }
}

}  // namespace

std::vector<std::string> run_train(const KvConfig& kv, const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    const SplitDataset ds = load_dataset(ec);
    const TrainResult res = train(ec.model_kind, ec.model, ec.train, ds);
    ArtifactWriter w(out_dir, kv, ec.seed);
    save_forecaster(w.path("checkpoint.bin"), res.forecaster);
    w.note("checkpoint.bin");
    auto hist = w.open("history.txt");
    write_history(hist, res);
    hist.close();
    return w.finish();
}

std::vector<std::string> run_eval(const KvConfig& kv, const std::string& checkpoint_path,
                                  const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    const Forecaster f = load_forecaster(checkpoint_path);
    ExperimentConfig eval_ec = ec;
    eval_ec.model = f.config;  // windows must match the checkpoint's geometry
    const SplitDataset ds = load_dataset(eval_ec);
    const EvalReport report = evaluate(f, ds.test, ec.sal);
    ArtifactWriter w(out_dir, kv, ec.seed);
    auto ev = w.open("eval.txt");
    ev << report_record(report) << "\n";
    ev.close();
    auto fc = w.open("forecasts.txt");
    write_forecast_track(fc, f, ds.test);
    fc.close();
    return w.finish();
}

std::vector<std::string> run_simulate(const KvConfig& kv, const std::string& checkpoint_path,
                                      const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    const Scenario sc = build_scenario(ec.scenario);
    const std::size_t n = sc.demand.size();

    std::size_t begin = 0;
    std::vector<double> demand_forecast;
    if (checkpoint_path.empty()) {
        demand_forecast = sc.demand.values;  // clairvoyant baseline
    } else {
        const Forecaster f = load_forecaster(checkpoint_path);
        const std::size_t lb = f.config.lookback;
        const std::size_t hz = f.config.horizon;
        if (n < lb + hz) {
            throw std::runtime_error("simulate: scenario horizon shorter than lookback+horizon");
        }
        begin = lb;
        RenderCache cache;
        for (std::size_t t0 = lb; t0 + hz <= n; t0 += hz) {
            SeriesWindow wdw;
            wdw.offset = t0 - lb;
            wdw.lookback.assign(sc.demand.values.begin() + (t0 - lb),
                                sc.demand.values.begin() + t0);
            wdw.timestamps.assign(sc.demand.timestamps.begin() + (t0 - lb),
                                  sc.demand.timestamps.begin() + t0);
            wdw.horizon.assign(sc.demand.values.begin() + t0, sc.demand.values.begin() + t0 + hz);
            wdw.lookback_min = *std::min_element(wdw.lookback.begin(), wdw.lookback.end());
            wdw.lookback_max = *std::max_element(wdw.lookback.begin(), wdw.lookback.end());
            const auto yhat = f.predict(wdw, &cache);
            demand_forecast.insert(demand_forecast.end(), yhat.begin(), yhat.end());
        }
    }
    const std::size_t span = demand_forecast.size();

    std::vector<Server> fleet = sc.fleet;
    std::vector<std::vector<double>> workload_forecasts(fleet.size());
    for (std::size_t s = 0; s < fleet.size(); ++s) {
        fleet[s].workload.assign(sc.fleet[s].workload.begin() + begin,
                                 sc.fleet[s].workload.begin() + begin + span);
        workload_forecasts[s] = fleet[s].workload;  // accurate workload view
    }
    const std::vector<double> actual_demand(sc.demand.values.begin() + begin,
                                            sc.demand.values.begin() + begin + span);

    const SchedulePlan plan = greedy_schedule(demand_forecast, workload_forecasts, fleet);
    const ScheduleOutcome outcome = evaluate_plan(plan, actual_demand, fleet, ec.sal);

    ArtifactWriter w(out_dir, kv, ec.seed);
    auto sched = w.open("schedule.txt");
    for (std::size_t t = 0; t < outcome.intervals.size(); ++t) {
        const IntervalOutcome& io = outcome.intervals[t];
        sched << "t=" << (begin + t) << " served=" << fmt17(io.served)
              << " unserved=" << fmt17(io.unserved) << " sla_events=" << io.sla_events
              << " under_loss=" << fmt17(io.under_loss) << " over_loss=" << fmt17(io.over_loss)
              << "\n";
    }
    sched.close();
    auto summary = w.open("summary.txt");
    summary << "under_loss=" << fmt17(outcome.under_loss)
            << " over_loss=" << fmt17(outcome.over_loss)
            << " total_loss=" << fmt17(outcome.total_loss) << " sla_events=" << outcome.sla_events
            << " served=" << fmt17(outcome.served) << " unserved=" << fmt17(outcome.unserved)
            << " intervals=" << outcome.intervals.size()
            << " negative_forecast_clamps=" << plan.negative_forecast_clamps << "\n";
    summary.close();
    return w.finish();
}

std::vector<std::string> run_sweep_uo(const KvConfig& kv, const std::vector<double>& ratios,
                                      const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    const SplitDataset ds = load_dataset(ec);
    ArtifactWriter w(out_dir, kv, ec.seed);
    auto out = w.open("sweep.txt");
    for (double ratio : ratios) {
        TrainConfig tc = ec.train;
        tc.loss = LossKind::sal;
        tc.sal = sal_params_for_ratio(ratio, 0.0);  // temperature resolved from train scale
        const TrainResult res = train(ec.model_kind, ec.model, tc, ds);
        const EvalReport report = evaluate(res.forecaster, ds.test, res.resolved_sal);
        out << "ratio=" << fmt17(ratio) << " under_fraction=" << fmt17(report.under_fraction)
            << " over_fraction=" << fmt17(report.over_fraction) << " apl=" << fmt17(report.apl)
            << " sla_violation_rate=" << fmt17(report.sla_violation_rate) << "\n";
    }
    out.close();
    return w.finish();
}

std::vector<std::string> run_ablate(const KvConfig& kv, const std::string& out_dir) {
    const ExperimentConfig ec = parse_experiment(kv);
    if (ec.model_kind != ModelKind::hrs) {
        throw std::runtime_error("ablate: model.kind must be 'hrs'");
    }
    const SplitDataset ds = load_dataset(ec);
    const Ablation variants[] = {Ablation::none, Ablation::no_visual, Ablation::no_numeric,
                                 Ablation::no_fusion, Ablation::no_mixer};
    ArtifactWriter w(out_dir, kv, ec.seed);
    auto out = w.open("ablate.txt");
    double base_apl = 0.0;
    for (const Ablation variant : variants) {
        HrsConfig cfg = ec.model;
        cfg.ablation = variant;
        const TrainResult res = train(ModelKind::hrs, cfg, ec.train, ds);
        const EvalReport report = evaluate(res.forecaster, ds.test, ec.sal);
        if (variant == Ablation::none) base_apl = report.apl;
        const double delta_pct =
            base_apl == 0.0 ? 0.0 : (report.apl - base_apl) / base_apl * 100.0;
        out << "variant=" << ablation_name(variant) << " apl=" << fmt17(report.apl)
            << " delta_pct=" << fmt17(delta_pct)
            << " sla_violation_rate=" << fmt17(report.sla_violation_rate) << "\n";
    }
    out.close();
    return w.finish();
}

std::vector<std::string> run_plot(const std::string& kind, const std::string& input_path,
                                  const std::string& out_dir) {
    std::ifstream in(input_path);
    if (!in) throw std::runtime_error("plot: cannot open " + input_path);
    std::vector<std::map<std::string, std::string>> records;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty()) records.push_back(parse_record(line));
    }
    if (records.empty()) throw std::runtime_error("plot: no records in " + input_path);

    std::filesystem::create_directories(out_dir);
    const std::string out_path = out_dir + "/plot.svg";
    if (kind == "forecast") {
        SvgSeries actual{"actual", "", {}};
        SvgSeries predicted{"predicted", "", {}};
        for (const auto& r : records) {
            if (r.count("actual")) actual.values.push_back(std::stod(r.at("actual")));
            if (r.count("predicted")) predicted.values.push_back(std::stod(r.at("predicted")));
        }
        write_line_chart(out_path, "forecast vs actual", {actual, predicted});
    } else if (kind == "history") {
        SvgSeries tr{"train_loss", "", {}};
        SvgSeries va{"val_loss", "", {}};
        for (const auto& r : records) {
            if (r.count("train_loss")) tr.values.push_back(std::stod(r.at("train_loss")));
            if (r.count("val_loss")) va.values.push_back(std::stod(r.at("val_loss")));
        }
        write_line_chart(out_path, "training history", {tr, va});
    } else if (kind == "loss-bars") {
        const auto& r = records.back();
        std::vector<std::pair<std::string, double>> bars;
        for (const char* key : {"under_loss", "over_loss", "total_loss"}) {
            if (r.count(key)) bars.emplace_back(key, std::stod(r.at(key)));
        }
        if (bars.empty()) throw std::runtime_error("plot: no loss fields in " + input_path);
        write_bar_chart(out_path, "profit loss decomposition", bars);
    } else {
        throw std::runtime_error("plot: unknown kind '" + kind +
                                 "' (want forecast|history|loss-bars)");
    }
    return {out_path};
}

}  // namespace hrs
