#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "hrs/data.hpp"
#include "hrs/metrics.hpp"
#include "hrs/model.hpp"
#include "hrs/sal.hpp"

namespace hrs {

enum class LossKind { mse, sal };

std::string loss_kind_name(LossKind kind);
bool loss_kind_from_name(std::string_view name, LossKind& out);

struct TrainConfig {
    LossKind loss = LossKind::sal;
    SalParams sal;  // tau <= 0 requests the scale-aware default
    double learning_rate = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_eps = 1e-8;
    std::size_t batch_size = 32;
    std::size_t max_epochs = 100;
    std::size_t patience = 10;
    std::uint64_t seed = 1;

    void validate() const;
};

struct EpochStats {
    double train_loss = 0.0;
    double val_loss = 0.0;
};

struct TrainResult {
    Forecaster forecaster;  // best-validation parameters
    std::vector<EpochStats> history;
    std::size_t best_epoch = 0;
    double best_val = 0.0;
    SalParams resolved_sal;  // tau filled in when it was requested as automatic
};

//! Adam loop with early stopping on validation loss; per-sample gradients
//! are reduced in a fixed order so runs are reproducible from the seed.
TrainResult train(ModelKind kind, const HrsConfig& cfg, const TrainConfig& tc,
                  const SplitDataset& data);

struct Predictions {
    std::vector<double> actual;
    std::vector<double> predicted;
};

Predictions collect_forecasts(const Forecaster& f, const std::vector<SeriesWindow>& windows,
                              RenderCache* cache = nullptr);

EvalReport evaluate(const Forecaster& f, const std::vector<SeriesWindow>& test,
                    const SalParams& sp, RenderCache* cache = nullptr);

}  // namespace hrs
