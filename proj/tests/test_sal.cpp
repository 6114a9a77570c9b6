#include <doctest.h>

#include <cmath>

#include "hrs/sal.hpp"
#include "test_util.hpp"

using namespace hrs;
using hrs_test::finite_diff;
using hrs_test::max_rel_err;

TEST_CASE("exact loss evaluates the three branches") {
    SalParams sp;  // R=0.0065, C=0.0035, P=4
    CHECK(sal_exact(100.0, 100.0, sp) == 0.0);
    CHECK(sal_exact(100.0, 90.0, sp) == doctest::Approx(4.065).epsilon(1e-12));
    CHECK(sal_exact(100.0, 110.0, sp) == doctest::Approx(0.035).epsilon(1e-12));
    CHECK_THROWS_AS(sal_exact(std::nan(""), 1.0, sp), std::invalid_argument);
}

TEST_CASE("exact loss is non-negative and strictly increasing per branch") {
    SalParams sp;
    Rng rng(41);
    for (int i = 0; i < 200; ++i) {
        const double y = rng.uniform(-100.0, 100.0);
        const double e1 = rng.uniform(0.1, 50.0);
        const double e2 = e1 + rng.uniform(0.1, 50.0);
        CHECK(sal_exact(y, y - e1, sp) > 0.0);
        CHECK(sal_exact(y, y + e1, sp) > 0.0);
        CHECK(sal_exact(y, y - e2, sp) > sal_exact(y, y - e1, sp));
        CHECK(sal_exact(y, y + e2, sp) > sal_exact(y, y + e1, sp));
    }
}

TEST_CASE("one-sided limits at the match point differ by exactly the penalty") {
    SalParams sp;
    const double y = 250.0;
    double eps = 1.0;
    for (int i = 0; i < 10; ++i) {
        eps *= 0.1;
        CHECK(sal_exact(y, y + eps, sp) == doctest::Approx(sp.overprovision_cost * eps));
        CHECK(sal_exact(y, y - eps, sp) ==
              doctest::Approx(sp.sla_penalty + sp.revenue * eps));
    }
    // The jump across the match point approaches P from below, 0 from above.
    CHECK(sal_exact(y, y - 1e-9, sp) == doctest::Approx(sp.sla_penalty).epsilon(1e-6));
    CHECK(sal_exact(y, y + 1e-9, sp) == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("surrogate value and limits") {
    SalParams sp;
    sp.tau = 0.5;

    SUBCASE("exact match costs P/2 per element") {
        const Tensor y = Tensor::from({3}, {10.0, 20.0, 30.0});
        const Tensor yhat = Tensor::from({3}, {10.0, 20.0, 30.0}, true);
        CHECK(sal_surrogate(y, yhat, sp).item() == doctest::Approx(sp.sla_penalty / 2.0));
    }
    SUBCASE("deep underprediction approaches the exact loss as tau shrinks") {
        const double yv = 100.0, pv = 60.0;
        SalParams tight = sp;
        tight.tau = 1e-3;
        const Tensor y = Tensor::scalar(yv);
        const Tensor p = Tensor::scalar(pv, true);
        const double want = tight.revenue * (yv - pv) + tight.sla_penalty;
        CHECK(sal_surrogate(y, p, tight).item() == doctest::Approx(want).epsilon(1e-9));
    }
    SUBCASE("gradient in the saturated under region is close to -R") {
        SalParams sp2;
        sp2.tau = 1.0;
        const double yv = 50.0;
        const std::vector<double> pv{yv - 10.0 * sp2.tau};  // well below y
        const Tensor y = Tensor::scalar(yv);
        const Tensor p = Tensor::from({1}, pv, true);
        backward(sal_surrogate(y, p, sp2));
        const auto fd = finite_diff(pv, [&](const std::vector<double>& v) {
            return sal_surrogate(Tensor::scalar(yv), Tensor::from({1}, v, true), sp2).item();
        });
        CHECK(max_rel_err(p.grad(), fd) < 1e-4);
        CHECK(p.grad()[0] == doctest::Approx(-sp2.revenue).epsilon(1e-2));
    }
    SUBCASE("full gradient matches finite differences near the crossover") {
        Rng rng(42);
        SalParams sp3;
        sp3.tau = 2.0;
        const auto yv = hrs_test::random_values(8, rng, 90.0, 110.0);
        const auto pv = hrs_test::random_values(8, rng, 90.0, 110.0);
        const Tensor y = Tensor::from({8}, yv);
        const Tensor p = Tensor::from({8}, pv, true);
        backward(sal_surrogate(y, p, sp3));
        const auto fd = finite_diff(pv, [&](const std::vector<double>& v) {
            return sal_surrogate(Tensor::from({8}, yv), Tensor::from({8}, v, true), sp3).item();
        });
        CHECK(max_rel_err(p.grad(), fd) < 1e-4);
    }
    SUBCASE("non-positive temperature is rejected") {
        SalParams bad = sp;
        bad.tau = 0.0;
        CHECK_THROWS_AS(
            sal_surrogate(Tensor::scalar(1.0), Tensor::scalar(1.0, true), bad),
            std::invalid_argument);
    }
    SUBCASE("shape mismatch is rejected") {
        CHECK_THROWS_AS(
            sal_surrogate(Tensor::zeros({2}), Tensor::zeros({3}, true), sp),
            std::invalid_argument);
    }
}

TEST_CASE("expected-surrogate minimizer shifts upward as the penalty grows") {
    // Discrete distribution of actuals; grid search the best single forecast.
    const std::vector<double> outcomes{90.0, 95.0, 100.0, 105.0, 180.0};
    const auto best_forecast = [&](double penalty) {
        SalParams sp;
        sp.revenue = 1.0;
        sp.overprovision_cost = 1.0;
        sp.sla_penalty = penalty;
        sp.tau = 2.0;
        double best_x = 0.0;
        double best_v = 1e300;
        for (double x = 80.0; x <= 200.0; x += 0.25) {
            double v = 0.0;
            for (double y : outcomes) {
                v += sal_surrogate(Tensor::scalar(y), Tensor::scalar(x, true), sp).item();
            }
            if (v < best_v) {
                best_v = v;
                best_x = x;
            }
        }
        return best_x;
    };
    double prev = best_forecast(0.0);
    for (const double penalty : {4.0, 16.0, 64.0}) {
        const double cur = best_forecast(penalty);
        CHECK(cur >= prev);
        prev = cur;
    }
    CHECK(best_forecast(64.0) > best_forecast(0.0));
}

TEST_CASE("under-to-over cost ratio") {
    SalParams sp;
    CHECK(sp.uo_ratio() == doctest::Approx((0.0065 + 4.0) / 0.0035));
    CHECK(sp.uo_ratio() == doctest::Approx(1144.7142857142858).epsilon(1e-9));

    CHECK(sal_params_for_ratio(1.0, 1.0).uo_ratio() == doctest::Approx(1.0));
    const SalParams r20 = sal_params_for_ratio(20.0, 1.0);
    CHECK(r20.revenue == 1.0);
    CHECK(r20.overprovision_cost == 1.0);
    CHECK(r20.sla_penalty == 19.0);
    CHECK(r20.uo_ratio() == doctest::Approx(20.0));
    CHECK_THROWS_AS(sal_params_for_ratio(0.5, 1.0), std::invalid_argument);
}

TEST_CASE("parameter validation") {
    SalParams sp;
    CHECK_NOTHROW(sp.validate());
    SalParams bad_r = sp;
    bad_r.revenue = 0.0;
    CHECK_THROWS_AS(bad_r.validate(), std::invalid_argument);
    SalParams bad_c = sp;
    bad_c.overprovision_cost = -1.0;
    CHECK_THROWS_AS(bad_c.validate(), std::invalid_argument);
    SalParams bad_p = sp;
    bad_p.sla_penalty = -0.1;
    CHECK_THROWS_AS(bad_p.validate(), std::invalid_argument);
    SalParams inverted = sp;
    inverted.overprovision_cost = sp.revenue * 2.0;  // C > R breaks the observed ordering
    CHECK_THROWS_AS(inverted.validate(), std::invalid_argument);
    SalParams equal = sp;
    equal.overprovision_cost = equal.revenue;  // C == R is the symmetric sweep case
    CHECK_NOTHROW(equal.validate());
}
