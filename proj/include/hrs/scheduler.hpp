#pragma once

#include <cstdint>
#include <vector>

#include "hrs/data.hpp"
#include "hrs/sal.hpp"

namespace hrs {

//! One simulated edge server: a fixed capacity and the background workload
//! it carries on its own (units per interval).
struct Server {
    std::size_t id = 0;
    double capacity = 0.0;
    std::vector<double> workload;
};

//! Forecast-time placement for one interval: per-server assigned demand in
//! assignment order, plus demand that found no forecast headroom.
struct IntervalAllocation {
    std::vector<double> assigned;       // indexed by server position
    std::vector<std::size_t> order;     // server positions in assignment order
    double unplaced_forecast = 0.0;
};

struct SchedulePlan {
    std::vector<IntervalAllocation> intervals;
    std::size_t negative_forecast_clamps = 0;
};

//! Greedy placement: per interval, demand goes to servers in descending
//! order of forecast headroom (capacity minus forecast workload), never
//! exceeding that headroom.
SchedulePlan greedy_schedule(const std::vector<double>& demand_forecast,
                             const std::vector<std::vector<double>>& workload_forecasts,
                             const std::vector<Server>& servers);

struct IntervalOutcome {
    double served = 0.0;
    double unserved = 0.0;
    std::size_t sla_events = 0;
    double under_loss = 0.0;
    double over_loss = 0.0;
};

//! Money-decomposed result of running a plan against realized demand and
//! workloads. total_loss is under_loss + over_loss by construction.
struct ScheduleOutcome {
    std::vector<IntervalOutcome> intervals;
    double under_loss = 0.0;
    double over_loss = 0.0;
    double total_loss = 0.0;
    std::size_t sla_events = 0;
    double served = 0.0;
    double unserved = 0.0;
};

//! SLA events are counted per (server, interval) whose realized load
//! exceeds capacity, plus one per interval with unplaced realized demand.
//! Underprediction pays the penalty and the lost revenue; demand slots
//! reserved but not filled pay the overprovision cost.
ScheduleOutcome evaluate_plan(const SchedulePlan& plan, const std::vector<double>& actual_demand,
                              const std::vector<Server>& servers, const SalParams& sp);

//! Key-value scenario: a seeded fleet plus synthetic demand and per-server
//! workload series.
struct ScenarioConfig {
    std::size_t servers = 10;
    std::size_t horizon = 720;
    std::uint64_t seed = 7;
    double capacity_min = 140.0;
    double capacity_max = 280.0;
    SynthConfig demand;
    double workload_base = 60.0;
    double workload_daily_amplitude = 20.0;
    double workload_noise_std = 6.0;

    void validate() const;
};

struct Scenario {
    std::vector<Server> fleet;  // workload series attached, length = horizon
    Series demand;
};

Scenario build_scenario(const ScenarioConfig& cfg);

}  // namespace hrs
