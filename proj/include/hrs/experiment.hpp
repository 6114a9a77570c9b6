#pragma once

#include <array>
#include <map>
#include <string>
#include <vector>

#include "hrs/config.hpp"
#include "hrs/data.hpp"
#include "hrs/model.hpp"
#include "hrs/scheduler.hpp"
#include "hrs/train.hpp"

namespace hrs {

struct DatasetSpec {
    enum class Source { synth, csv };
    Source source = Source::synth;
    SynthConfig synth;
    std::string csv_path;
    std::string csv_value_column = "value";
    std::string csv_timestamp_column = "timestamp";
    std::array<double, 3> split_ratios{0.7, 0.1, 0.2};
    std::size_t stride = 1;
};

//! Everything one run needs, assembled from the sectioned key-value file.
struct ExperimentConfig {
    DatasetSpec dataset;
    ModelKind model_kind = ModelKind::hrs;
    HrsConfig model;
    TrainConfig train;
    SalParams sal;
    ScenarioConfig scenario;
    std::uint64_t seed = 1;
};

ExperimentConfig parse_experiment(const KvConfig& kv);
Series load_series(const DatasetSpec& spec);
SplitDataset load_dataset(const ExperimentConfig& ec);

//! key=value pairs of one record line.
std::map<std::string, std::string> parse_record(const std::string& line);

// Runners behind the CLI subcommands; each writes its artifacts plus a
// manifest into out_dir and returns the paths it wrote.
std::vector<std::string> run_synth(const KvConfig& kv, const std::string& out_dir);
std::vector<std::string> run_render(const KvConfig& kv, const std::string& out_dir,
                                    std::size_t window_index);
std::vector<std::string> run_train(const KvConfig& kv, const std::string& out_dir);
std::vector<std::string> run_eval(const KvConfig& kv, const std::string& checkpoint_path,
                                  const std::string& out_dir);
std::vector<std::string> run_simulate(const KvConfig& kv, const std::string& checkpoint_path,
                                      const std::string& out_dir);
std::vector<std::string> run_sweep_uo(const KvConfig& kv, const std::vector<double>& ratios,
                                      const std::string& out_dir);
std::vector<std::string> run_ablate(const KvConfig& kv, const std::string& out_dir);
std::vector<std::string> run_plot(const std::string& kind, const std::string& input_path,
                                  const std::string& out_dir);

}  // namespace hrs
