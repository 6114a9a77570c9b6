#include <doctest.h>

#include <cmath>

#include "hrs/scheduler.hpp"
#include "test_util.hpp"

using namespace hrs;

namespace {

std::vector<Server> make_fleet(const std::vector<double>& capacities,
                               const std::vector<std::vector<double>>& workloads) {
    std::vector<Server> fleet(capacities.size());
    for (std::size_t i = 0; i < fleet.size(); ++i) {
        fleet[i].id = i;
        fleet[i].capacity = capacities[i];
        fleet[i].workload = workloads[i];
    }
    return fleet;
}

}  // namespace

TEST_CASE("greedy placement follows forecast headroom") {
    SUBCASE("single server with room takes the whole demand") {
        const auto fleet = make_fleet({100.0}, {{20.0}});
        const auto plan = greedy_schedule({50.0}, {{20.0}}, fleet);
        REQUIRE(plan.intervals.size() == 1);
        CHECK(plan.intervals[0].assigned[0] == 50.0);
        CHECK(plan.intervals[0].unplaced_forecast == 0.0);
    }
    SUBCASE("two servers with headrooms 30 and 10 split 35 as 30 + 5") {
        const auto fleet = make_fleet({40.0, 40.0}, {{10.0}, {30.0}});
        const auto plan = greedy_schedule({35.0}, {{10.0}, {30.0}}, fleet);
        CHECK(plan.intervals[0].assigned[0] == 30.0);
        CHECK(plan.intervals[0].assigned[1] == 5.0);
        CHECK(plan.intervals[0].order == std::vector<std::size_t>{0, 1});
    }
    SUBCASE("zero demand places nothing") {
        const auto fleet = make_fleet({100.0}, {{20.0}});
        const auto plan = greedy_schedule({0.0}, {{20.0}}, fleet);
        CHECK(plan.intervals[0].order.empty());
        CHECK(plan.intervals[0].assigned[0] == 0.0);
    }
    SUBCASE("negative forecasts clamp to zero and count") {
        const auto fleet = make_fleet({100.0}, {{20.0}});
        const auto plan = greedy_schedule({-5.0}, {{-1.0}}, fleet);
        CHECK(plan.negative_forecast_clamps == 2);
        CHECK(plan.intervals[0].order.empty());
    }
    SUBCASE("overflow demand is recorded as unplaced") {
        const auto fleet = make_fleet({30.0, 30.0}, {{10.0}, {10.0}});
        const auto plan = greedy_schedule({100.0}, {{10.0}, {10.0}}, fleet);
        CHECK(plan.intervals[0].unplaced_forecast == doctest::Approx(60.0));
    }
    SUBCASE("shape mismatches are rejected") {
        const auto fleet = make_fleet({100.0}, {{20.0}});
        CHECK_THROWS_AS(greedy_schedule({1.0}, {{1.0}, {1.0}}, fleet), std::invalid_argument);
        CHECK_THROWS_AS(greedy_schedule({1.0}, {{1.0, 2.0}}, fleet), std::invalid_argument);
        CHECK_THROWS_AS(greedy_schedule({1.0}, {}, {}), std::invalid_argument);
    }
}

TEST_CASE("plan evaluation decomposes losses") {
    SalParams sp;  // R=0.0065 C=0.0035 P=4

    SUBCASE("perfect forecasts cost exactly nothing") {
        const std::vector<double> demand{50.0, 80.0, 20.0};
        const std::vector<std::vector<double>> wl{{20.0, 30.0, 10.0}, {15.0, 5.0, 25.0}};
        const auto fleet = make_fleet({100.0, 90.0}, wl);
        const auto plan = greedy_schedule(demand, wl, fleet);
        const auto outcome = evaluate_plan(plan, demand, fleet, sp);
        CHECK(outcome.total_loss == 0.0);
        CHECK(outcome.under_loss == 0.0);
        CHECK(outcome.over_loss == 0.0);
        CHECK(outcome.sla_events == 0);
        CHECK(outcome.unserved == 0.0);
        CHECK(outcome.served == doctest::Approx(150.0));
    }
    SUBCASE("underforecast demand with ample capacity pays revenue plus one event") {
        const auto fleet = make_fleet({1000.0}, {{0.0}});
        const auto plan = greedy_schedule({50.0}, {{0.0}}, fleet);
        const auto outcome = evaluate_plan(plan, {60.0}, fleet, sp);
        CHECK(outcome.under_loss == doctest::Approx(sp.revenue * 10.0 + sp.sla_penalty));
        CHECK(outcome.over_loss == 0.0);
        CHECK(outcome.sla_events == 1);
        CHECK(outcome.served == doctest::Approx(50.0));
        CHECK(outcome.unserved == doctest::Approx(10.0));
    }
    SUBCASE("overforecast demand pays the overprovision cost only") {
        const auto fleet = make_fleet({1000.0}, {{0.0}});
        const auto plan = greedy_schedule({60.0}, {{0.0}}, fleet);
        const auto outcome = evaluate_plan(plan, {50.0}, fleet, sp);
        CHECK(outcome.over_loss == doctest::Approx(sp.overprovision_cost * 10.0));
        CHECK(outcome.under_loss == 0.0);
        CHECK(outcome.sla_events == 0);
    }
    SUBCASE("workload underforecast overloads the server, one event per server-interval") {
        // Forecast workload 10 leaves headroom 40; the realized workload 35
        // pushes the assigned 40 over the 50-unit capacity by 25.
        const auto fleet = make_fleet({50.0}, {{35.0}});
        const auto plan = greedy_schedule({40.0}, {{10.0}}, fleet);
        const auto outcome = evaluate_plan(plan, {40.0}, fleet, sp);
        CHECK(outcome.sla_events == 1);
        CHECK(outcome.under_loss == doctest::Approx(sp.sla_penalty + sp.revenue * 25.0));
        CHECK(outcome.served == doctest::Approx(15.0));
        CHECK(outcome.unserved == doctest::Approx(25.0));
    }
    SUBCASE("interval count mismatch is rejected") {
        const auto fleet = make_fleet({10.0}, {{1.0, 1.0}});
        const auto plan = greedy_schedule({1.0, 1.0}, {{1.0, 1.0}}, fleet);
        CHECK_THROWS_AS(evaluate_plan(plan, {1.0}, fleet, sp), std::invalid_argument);
    }
}

TEST_CASE("conservation: served plus unserved equals realized demand") {
    SalParams sp;
    Rng rng(81);
    for (int trial = 0; trial < 25; ++trial) {
        const std::size_t horizon = 1 + rng.index(20);
        const std::size_t n_servers = 1 + rng.index(5);
        std::vector<double> caps;
        std::vector<std::vector<double>> wl_actual(n_servers);
        std::vector<std::vector<double>> wl_forecast(n_servers);
        for (std::size_t s = 0; s < n_servers; ++s) {
            caps.push_back(rng.uniform(50.0, 150.0));
            for (std::size_t t = 0; t < horizon; ++t) {
                const double w = rng.uniform(0.0, 80.0);
                wl_actual[s].push_back(w);
                wl_forecast[s].push_back(w + rng.uniform(-20.0, 20.0));
            }
        }
        std::vector<double> demand_forecast, demand_actual;
        for (std::size_t t = 0; t < horizon; ++t) {
            demand_actual.push_back(rng.uniform(0.0, 400.0));
            demand_forecast.push_back(demand_actual.back() + rng.uniform(-100.0, 100.0));
        }
        const auto fleet = make_fleet(caps, wl_actual);
        const auto plan = greedy_schedule(demand_forecast, wl_forecast, fleet);
        const auto outcome = evaluate_plan(plan, demand_actual, fleet, sp);

        double total_actual = 0.0;
        for (double v : demand_actual) total_actual += v;
        CHECK(outcome.served + outcome.unserved == doctest::Approx(total_actual).epsilon(1e-9));
        CHECK(outcome.total_loss == outcome.under_loss + outcome.over_loss);
        for (std::size_t t = 0; t < horizon; ++t) {
            CHECK(outcome.intervals[t].served + outcome.intervals[t].unserved ==
                  doctest::Approx(demand_actual[t]).epsilon(1e-9));
        }
    }
}

TEST_CASE("inflating demand forecasts trades under losses for over losses") {
    SalParams sp;
    Rng rng(82);
    const std::size_t horizon = 24;
    const std::size_t n_servers = 4;
    std::vector<double> caps;
    std::vector<std::vector<double>> wl(n_servers);
    for (std::size_t s = 0; s < n_servers; ++s) {
        caps.push_back(rng.uniform(150.0, 250.0));
        for (std::size_t t = 0; t < horizon; ++t) wl[s].push_back(rng.uniform(0.0, 60.0));
    }
    std::vector<double> demand_actual, demand_base;
    for (std::size_t t = 0; t < horizon; ++t) {
        demand_actual.push_back(rng.uniform(50.0, 350.0));
        demand_base.push_back(demand_actual.back() + rng.uniform(-80.0, 20.0));
    }
    const auto fleet = make_fleet(caps, wl);

    // Workload forecasts are held at truth; only demand forecasts move.
    double prev_under = 1e300;
    double prev_over = -1.0;
    for (const double delta : {0.0, 20.0, 40.0, 80.0, 160.0}) {
        auto forecast = demand_base;
        for (double& v : forecast) v += delta;
        const auto plan = greedy_schedule(forecast, wl, fleet);
        const auto outcome = evaluate_plan(plan, demand_actual, fleet, sp);
        CHECK(outcome.under_loss <= prev_under + 1e-9);
        CHECK(outcome.over_loss >= prev_over - 1e-9);
        prev_under = outcome.under_loss;
        prev_over = outcome.over_loss;
    }
}

TEST_CASE("scenario building is seeded and validated") {
    ScenarioConfig cfg;
    cfg.servers = 5;
    cfg.horizon = 48;
    const Scenario a = build_scenario(cfg);
    const Scenario b = build_scenario(cfg);
    REQUIRE(a.fleet.size() == 5);
    CHECK(a.demand.size() == 48);
    for (std::size_t i = 0; i < a.fleet.size(); ++i) {
        CHECK(a.fleet[i].capacity == b.fleet[i].capacity);
        CHECK(a.fleet[i].capacity >= cfg.capacity_min);
        CHECK(a.fleet[i].capacity <= cfg.capacity_max);
        CHECK(a.fleet[i].workload == b.fleet[i].workload);
        CHECK(a.fleet[i].workload.size() == 48);
    }
    CHECK(a.demand.values == b.demand.values);

    ScenarioConfig bad = cfg;
    bad.servers = 0;
    CHECK_THROWS_AS(build_scenario(bad), std::invalid_argument);
    ScenarioConfig bad2 = cfg;
    bad2.capacity_max = bad2.capacity_min - 1.0;
    CHECK_THROWS_AS(build_scenario(bad2), std::invalid_argument);
}
