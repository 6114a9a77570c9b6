#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hrs/experiment.hpp"

namespace {

hrs::KvConfig load_config(const std::string& config_path, std::uint64_t seed_override,
                          bool seed_set, const std::vector<std::string>& overrides) {
    hrs::KvConfig kv;
    if (!config_path.empty()) kv = hrs::KvConfig::parse_file(config_path);
    if (seed_set) kv.set("run.seed", std::to_string(seed_override));
    for (const std::string& kvpair : overrides) {
        const auto eq = kvpair.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("override must look like section.key=value: " + kvpair);
        }
        kv.set(kvpair.substr(0, eq), kvpair.substr(eq + 1));
    }
    return kv;
}

void echo_file(const std::string& path) {
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) std::cout << line << "\n";
}

void echo_named(const std::vector<std::string>& artifacts, const std::string& suffix) {
    for (const std::string& a : artifacts) {
        if (a.size() >= suffix.size() && a.compare(a.size() - suffix.size(), suffix.size(), suffix) == 0) {
            echo_file(a);
        }
    }
}

std::vector<double> parse_ratio_list(const std::string& text) {
    std::vector<double> out;
    std::string token;
    for (char c : text + ",") {
        if (c == ',') {
            if (!token.empty()) {
                out.push_back(std::stod(token));
                token.clear();
            }
        } else {
            token.push_back(c);
        }
    }
    if (out.empty()) throw std::runtime_error("sweep-uo: empty ratio list");
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hybrid-representation load forecaster with scheduling-aware training"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = "out";
    std::uint64_t seed = 1;
    bool seed_set = false;
    std::vector<std::string> overrides;
    app.add_option("--config", config_path, "experiment config file")->capture_default_str();
    app.add_option("--out", out_dir, "output directory")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "override run seed");
    app.add_option("--set", overrides, "override a config entry (section.key=value)");

    auto* synth = app.add_subcommand("synth", "generate a synthetic series and write it as CSV");
    auto* render = app.add_subcommand("render", "rasterize one window and dump it as a pixmap");
    std::size_t window_index = 0;
    render->add_option("--window", window_index, "window index to render")->capture_default_str();
    auto* train = app.add_subcommand("train", "fit a model and write checkpoint + history");
    auto* eval = app.add_subcommand("eval", "evaluate a checkpoint on the test partition");
    std::string checkpoint;
    eval->add_option("--checkpoint", checkpoint, "model checkpoint")->required();
    auto* simulate =
        app.add_subcommand("simulate", "run the greedy scheduling scenario and decompose losses");
    std::string sim_checkpoint;
    simulate->add_option("--checkpoint", sim_checkpoint,
                         "demand forecaster checkpoint (perfect forecasts when omitted)");
    auto* sweep = app.add_subcommand("sweep-uo", "train/evaluate across under-to-over cost ratios");
    std::string ratio_text = "1,2,5,10,20,50";
    sweep->add_option("--ratios", ratio_text, "comma-separated ratio grid")->capture_default_str();
    auto* ablate = app.add_subcommand("ablate", "train module-ablated variants and report deltas");
    auto* plot = app.add_subcommand("plot", "emit an SVG chart from a records file");
    std::string plot_kind = "forecast";
    std::string plot_input;
    plot->add_option("--kind", plot_kind, "forecast|history|loss-bars")->capture_default_str();
    plot->add_option("--in", plot_input, "records file to plot")->required();

    CLI11_PARSE(app, argc, argv);

    seed_set = seed_opt->count() > 0;
    try {
        const hrs::KvConfig kv = load_config(config_path, seed, seed_set, overrides);
        std::vector<std::string> artifacts;
        if (synth->parsed()) {
            artifacts = hrs::run_synth(kv, out_dir);
        } else if (render->parsed()) {
            artifacts = hrs::run_render(kv, out_dir, window_index);
        } else if (train->parsed()) {
            artifacts = hrs::run_train(kv, out_dir);
            echo_named(artifacts, "history.txt");
        } else if (eval->parsed()) {
            artifacts = hrs::run_eval(kv, checkpoint, out_dir);
            echo_named(artifacts, "eval.txt");
        } else if (simulate->parsed()) {
            artifacts = hrs::run_simulate(kv, sim_checkpoint, out_dir);
            echo_named(artifacts, "summary.txt");
        } else if (sweep->parsed()) {
            artifacts = hrs::run_sweep_uo(kv, parse_ratio_list(ratio_text), out_dir);
            echo_named(artifacts, "sweep.txt");
        } else if (ablate->parsed()) {
            artifacts = hrs::run_ablate(kv, out_dir);
            echo_named(artifacts, "ablate.txt");
        } else if (plot->parsed()) {
            artifacts = hrs::run_plot(plot_kind, plot_input, out_dir);
        }
        for (const std::string& a : artifacts) std::cout << "wrote " << a << "\n";
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
