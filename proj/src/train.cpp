#include "hrs/train.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "hrs/rng.hpp"

namespace hrs {

std::string loss_kind_name(LossKind kind) { return kind == LossKind::mse ? "mse" : "sal"; }

bool loss_kind_from_name(std::string_view name, LossKind& out) {
    if (name == "mse") out = LossKind::mse;
    else if (name == "sal") out = LossKind::sal;
    else return false;
    return true;
}

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("train: learning rate must be positive");
    if (batch_size < 1) throw std::invalid_argument("train: batch size must be at least 1");
    if (max_epochs < 1) throw std::invalid_argument("train: max epochs must be at least 1");
}

namespace {

constexpr double kAutoTauFraction = 0.05;

struct AdamState {
    std::vector<std::vector<double>> m;
    std::vector<std::vector<double>> v;
    std::size_t step = 0;

    explicit AdamState(const ModelParams& params) {
        m.reserve(params.size());
        v.reserve(params.size());
        for (const auto& [name, t] : params.entries) {
            m.emplace_back(t.numel(), 0.0);
            v.emplace_back(t.numel(), 0.0);
        }
    }

    void update(ModelParams& params, const TrainConfig& tc) {
        ++step;
        const double bc1 = 1.0 - std::pow(tc.beta1, static_cast<double>(step));
        const double bc2 = 1.0 - std::pow(tc.beta2, static_cast<double>(step));
        for (std::size_t k = 0; k < params.entries.size(); ++k) {
            Tensor& t = params.entries[k].second;
            if (!t.has_grad()) continue;
            const auto& g = t.grad();
            auto& x = t.values();
            auto& mk = m[k];
            auto& vk = v[k];
            for (std::size_t i = 0; i < x.size(); ++i) {
                mk[i] = tc.beta1 * mk[i] + (1.0 - tc.beta1) * g[i];
                vk[i] = tc.beta2 * vk[i] + (1.0 - tc.beta2) * g[i] * g[i];
                const double mhat = mk[i] / bc1;
                const double vhat = vk[i] / bc2;
                x[i] -= tc.learning_rate * mhat / (std::sqrt(vhat) + tc.adam_eps);
            }
        }
    }
};

double horizon_std(const std::vector<SeriesWindow>& windows) {
    double mean = 0.0;
    std::size_t n = 0;
    for (const auto& w : windows) {
        for (double y : w.horizon) {
            mean += y;
            ++n;
        }
    }
    if (n == 0) return 1.0;
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& w : windows) {
        for (double y : w.horizon) var += (y - mean) * (y - mean);
    }
    var /= static_cast<double>(n);
    return std::sqrt(var);
}

Tensor model_output(ModelKind kind, const SeriesWindow& sample, const HrsConfig& cfg,
                    const ModelParams& params, RenderCache* cache) {
    if (kind == ModelKind::hrs) return hrs_forward(sample, cfg, params, cache);
    return linear_forward(sample, cfg.lookback, cfg.horizon, params);
}

Tensor sample_loss(const Tensor& forecast, const SeriesWindow& sample, LossKind loss,
                   const SalParams& sp) {
    const Tensor target = Tensor::from({sample.horizon.size()}, sample.horizon);
    if (loss == LossKind::sal) return sal_surrogate(target, forecast, sp);
    const Tensor err = sub(forecast, target);
    return mean(mul(err, err));
}

}  // namespace

TrainResult train(ModelKind kind, const HrsConfig& cfg, const TrainConfig& tc,
                  const SplitDataset& data) {
    tc.validate();
    if (kind == ModelKind::hrs) cfg.validate();
    if (data.train.empty()) throw std::invalid_argument("train: empty training partition");
    if (data.val.empty()) throw std::invalid_argument("train: empty validation partition");

    SalParams sp = tc.sal;
    if (tc.loss == LossKind::sal) {
        if (sp.tau <= 0.0) {
            const double sd = horizon_std(data.train);
            sp.tau = sd > 0.0 ? kAutoTauFraction * sd : 1.0;
        }
        sp.validate();
    }

    Rng rng(tc.seed);
    ModelParams params = kind == ModelKind::hrs
                             ? init_hrs_params(cfg, rng)
                             : init_linear_params(cfg.lookback, cfg.horizon, rng);
    AdamState adam(params);
    RenderCache cache;

    TrainResult result;
    result.resolved_sal = sp;
    result.best_val = std::numeric_limits<double>::infinity();
    ModelParams best = params.clone();

    std::vector<std::size_t> order(data.train.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;

    std::size_t since_best = 0;
    for (std::size_t epoch = 0; epoch < tc.max_epochs; ++epoch) {
        // Fisher-Yates shuffle from the run's seeded stream.
        for (std::size_t i = order.size(); i > 1; --i) {
            std::swap(order[i - 1], order[rng.index(i)]);
        }

        double train_loss_sum = 0.0;
        for (std::size_t start = 0; start < order.size(); start += tc.batch_size) {
            const std::size_t stop = std::min(start + tc.batch_size, order.size());
            const double inv_batch = 1.0 / static_cast<double>(stop - start);
            params.zero_grad();
            for (std::size_t i = start; i < stop; ++i) {
                const SeriesWindow& sample = data.train[order[i]];
                const Tensor forecast = model_output(kind, sample, cfg, params, &cache);
                const Tensor loss = sample_loss(forecast, sample, tc.loss, sp);
                const double value = loss.item();
                if (!std::isfinite(value)) {
                    throw std::runtime_error("train: non-finite loss at epoch " +
                                             std::to_string(epoch + 1));
                }
                train_loss_sum += value;
                backward(scale(loss, inv_batch));
            }
            adam.update(params, tc);
        }

        double val_loss_sum = 0.0;
        for (const SeriesWindow& sample : data.val) {
            const Tensor forecast = model_output(kind, sample, cfg, params, &cache);
            val_loss_sum += sample_loss(forecast, sample, tc.loss, sp).item();
        }
        const double train_loss = train_loss_sum / static_cast<double>(data.train.size());
        const double val_loss = val_loss_sum / static_cast<double>(data.val.size());
        if (!std::isfinite(val_loss)) {
            throw std::runtime_error("train: non-finite validation loss at epoch " +
                                     std::to_string(epoch + 1));
        }
        result.history.push_back({train_loss, val_loss});

        if (val_loss < result.best_val) {
            result.best_val = val_loss;
            result.best_epoch = epoch;
            best = params.clone();
            since_best = 0;
        } else {
            ++since_best;
            if (since_best > tc.patience) break;
        }
    }

    result.forecaster.kind = kind;
    result.forecaster.config = cfg;
    result.forecaster.params = std::move(best);
    return result;
}

Predictions collect_forecasts(const Forecaster& f, const std::vector<SeriesWindow>& windows,
                              RenderCache* cache) {
    Predictions out;
    RenderCache local;
    if (!cache) cache = &local;
    for (const SeriesWindow& w : windows) {
        const std::vector<double> yhat = f.predict(w, cache);
        out.actual.insert(out.actual.end(), w.horizon.begin(), w.horizon.end());
        out.predicted.insert(out.predicted.end(), yhat.begin(), yhat.end());
    }
    return out;
}

EvalReport evaluate(const Forecaster& f, const std::vector<SeriesWindow>& test,
                    const SalParams& sp, RenderCache* cache) {
    if (test.empty()) throw std::invalid_argument("evaluate: empty test partition");
    const Predictions preds = collect_forecasts(f, test, cache);
    return make_report(preds.actual, preds.predicted, sp);
}

}  // namespace hrs
