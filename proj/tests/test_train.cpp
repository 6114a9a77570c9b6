#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hrs/train.hpp"

using namespace hrs;

namespace {

// Noise-free ramp: every window has the same normalized lookback and the
// same normalized target, so the affine baseline can fit it exactly.
SplitDataset ramp_dataset(std::size_t lookback, std::size_t horizon) {
    Series s;
    for (std::size_t i = 0; i < 420; ++i) {
        s.values.push_back(2.0 * static_cast<double>(i) + 10.0);
        s.timestamps.push_back(1672617600 + static_cast<std::int64_t>(i) * 3600);
    }
    const auto windows = window_dataset(s, lookback, horizon, 1);
    return split(windows, {0.7, 0.1, 0.2}, lookback, horizon);
}

SplitDataset constant_dataset(std::size_t lookback, std::size_t horizon) {
    Series s;
    for (std::size_t i = 0; i < 320; ++i) {
        s.values.push_back(42.0);
        s.timestamps.push_back(1672617600 + static_cast<std::int64_t>(i) * 3600);
    }
    const auto windows = window_dataset(s, lookback, horizon, 1);
    return split(windows, {0.7, 0.1, 0.2}, lookback, horizon);
}

}  // namespace

TEST_CASE("linear baseline drives a solvable task to near-zero error") {
    const SplitDataset ds = ramp_dataset(16, 8);
    TrainConfig tc;
    tc.loss = LossKind::mse;
    tc.learning_rate = 0.01;
    tc.batch_size = 32;
    tc.max_epochs = 200;
    tc.patience = 200;
    tc.seed = 5;
    HrsConfig cfg;
    cfg.lookback = 16;
    cfg.horizon = 8;
    const TrainResult res = train(ModelKind::linear, cfg, tc, ds);
    CHECK(res.best_val < 1e-6);
    CHECK(res.history.size() <= 200);

    // Best-so-far validation losses are non-increasing by construction.
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : res.history) best = std::min(best, e.val_loss);
    CHECK(res.best_val == best);
    CHECK(res.best_epoch < res.history.size());
}

TEST_CASE("identical seeds reproduce the entire history") {
    const SplitDataset ds = ramp_dataset(12, 4);
    TrainConfig tc;
    tc.loss = LossKind::sal;
    tc.learning_rate = 0.02;
    tc.max_epochs = 12;
    tc.patience = 12;
    tc.seed = 77;
    HrsConfig cfg;
    cfg.lookback = 12;
    cfg.horizon = 4;
    const TrainResult a = train(ModelKind::linear, cfg, tc, ds);
    const TrainResult b = train(ModelKind::linear, cfg, tc, ds);
    REQUIRE(a.history.size() == b.history.size());
    for (std::size_t i = 0; i < a.history.size(); ++i) {
        CHECK(a.history[i].train_loss == b.history[i].train_loss);
        CHECK(a.history[i].val_loss == b.history[i].val_loss);
    }
    const auto& pa = a.forecaster.params.at("linear.weight").values();
    const auto& pb = b.forecaster.params.at("linear.weight").values();
    CHECK(pa == pb);

    TrainConfig other = tc;
    other.seed = 78;
    const TrainResult c = train(ModelKind::linear, cfg, other, ds);
    CHECK(a.history.front().train_loss != c.history.front().train_loss);
}

TEST_CASE("automatic surrogate temperature follows the training scale") {
    const SplitDataset ds = ramp_dataset(12, 4);
    TrainConfig tc;
    tc.loss = LossKind::sal;
    tc.sal.tau = 0.0;  // request auto
    tc.max_epochs = 2;
    tc.patience = 2;
    HrsConfig cfg;
    cfg.lookback = 12;
    cfg.horizon = 4;
    const TrainResult res = train(ModelKind::linear, cfg, tc, ds);
    double mean = 0.0;
    std::size_t n = 0;
    for (const auto& w : ds.train) {
        for (double y : w.horizon) {
            mean += y;
            ++n;
        }
    }
    mean /= static_cast<double>(n);
    double var = 0.0;
    for (const auto& w : ds.train) {
        for (double y : w.horizon) var += (y - mean) * (y - mean);
    }
    var /= static_cast<double>(n);
    CHECK(res.resolved_sal.tau == doctest::Approx(0.05 * std::sqrt(var)).epsilon(1e-12));
    CHECK(res.resolved_sal.tau > 0.0);
}

TEST_CASE("non-finite samples abort training with a diagnostic") {
    SplitDataset ds = ramp_dataset(12, 4);
    ds.train[0].lookback[3] = std::numeric_limits<double>::infinity();
    ds.train[0].lookback_max = std::numeric_limits<double>::infinity();
    TrainConfig tc;
    tc.loss = LossKind::mse;
    tc.max_epochs = 3;
    HrsConfig cfg;
    cfg.lookback = 12;
    cfg.horizon = 4;
    CHECK_THROWS_WITH_AS(train(ModelKind::linear, cfg, tc, ds), doctest::Contains("non-finite"),
                         std::runtime_error);
}

TEST_CASE("empty partitions are rejected") {
    SplitDataset ds = ramp_dataset(12, 4);
    SplitDataset no_train = ds;
    no_train.train.clear();
    TrainConfig tc;
    HrsConfig cfg;
    cfg.lookback = 12;
    cfg.horizon = 4;
    CHECK_THROWS_AS(train(ModelKind::linear, cfg, tc, no_train), std::invalid_argument);
    SplitDataset no_val = ds;
    no_val.val.clear();
    CHECK_THROWS_AS(train(ModelKind::linear, cfg, tc, no_val), std::invalid_argument);
}

TEST_CASE("patience stops a converged run early") {
    const SplitDataset ds = constant_dataset(8, 4);
    TrainConfig tc;
    tc.loss = LossKind::mse;
    tc.learning_rate = 0.05;
    tc.max_epochs = 400;
    tc.patience = 5;
    HrsConfig cfg;
    cfg.lookback = 8;
    cfg.horizon = 4;
    const TrainResult res = train(ModelKind::linear, cfg, tc, ds);
    CHECK(res.history.size() < 400);
}

TEST_CASE("evaluation summarizes raw-scale forecasts") {
    const SplitDataset ds = constant_dataset(8, 4);
    SalParams sp;

    SUBCASE("an exact predictor scores zero loss and zero violations") {
        // Zero weights and bias on a constant series predict exactly the
        // constant (the denormalization shift).
        Rng rng(91);
        Forecaster f;
        f.kind = ModelKind::linear;
        f.config.lookback = 8;
        f.config.horizon = 4;
        f.params = init_linear_params(8, 4, rng);
        for (double& v : f.params.at("linear.weight").values()) v = 0.0;
        for (double& v : f.params.at("linear.bias").values()) v = 0.0;
        const EvalReport r = evaluate(f, ds.test, sp);
        CHECK(r.apl == 0.0);
        CHECK(r.sla_violation_count == 0);
        CHECK(r.mse == 0.0);
    }
    SUBCASE("a constant over-predictor pays only the overprovision cost") {
        Rng rng(92);
        Forecaster f;
        f.kind = ModelKind::linear;
        f.config.lookback = 8;
        f.config.horizon = 4;
        f.params = init_linear_params(8, 4, rng);
        for (double& v : f.params.at("linear.weight").values()) v = 0.0;
        // Constant window: span degenerates to 1, so bias is a raw offset.
        for (double& v : f.params.at("linear.bias").values()) v = 13.0;
        const EvalReport r = evaluate(f, ds.test, sp);
        CHECK(r.sla_violation_count == 0);
        CHECK(r.over_fraction == 1.0);
        CHECK(r.apl == doctest::Approx(sp.overprovision_cost * 13.0));
        CHECK(r.sla_violation_rate ==
              doctest::Approx(static_cast<double>(r.sla_violation_count) /
                              static_cast<double>(r.n_points)));
    }
    SUBCASE("empty test partitions are rejected") {
        Rng rng(93);
        Forecaster f;
        f.kind = ModelKind::linear;
        f.config.lookback = 8;
        f.config.horizon = 4;
        f.params = init_linear_params(8, 4, rng);
        CHECK_THROWS_AS(evaluate(f, {}, sp), std::invalid_argument);
    }
}
