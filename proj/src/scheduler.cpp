#include "hrs/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "hrs/rng.hpp"

namespace hrs {

namespace {

// Slack against floating-point dust when realized load sits exactly at
// capacity (e.g. perfect forecasts).
constexpr double kLoadTolerance = 1e-9;

}  // namespace

SchedulePlan greedy_schedule(const std::vector<double>& demand_forecast,
                             const std::vector<std::vector<double>>& workload_forecasts,
                             const std::vector<Server>& servers) {
    if (servers.empty()) throw std::invalid_argument("schedule: need at least one server");
    if (workload_forecasts.size() != servers.size()) {
        throw std::invalid_argument("schedule: workload forecast count " +
                                    std::to_string(workload_forecasts.size()) +
                                    " != server count " + std::to_string(servers.size()));
    }
    const std::size_t horizon = demand_forecast.size();
    for (const auto& wf : workload_forecasts) {
        if (wf.size() != horizon) {
            throw std::invalid_argument("schedule: workload forecast length mismatch");
        }
    }

    SchedulePlan plan;
    plan.intervals.resize(horizon);
    std::vector<std::size_t> order(servers.size());
    std::vector<double> headroom(servers.size());
    for (std::size_t t = 0; t < horizon; ++t) {
        IntervalAllocation& alloc = plan.intervals[t];
        alloc.assigned.assign(servers.size(), 0.0);

        for (std::size_t s = 0; s < servers.size(); ++s) {
            double wf = workload_forecasts[s][t];
            if (wf < 0.0) {
                wf = 0.0;
                ++plan.negative_forecast_clamps;
            }
            headroom[s] = std::max(servers[s].capacity - wf, 0.0);
        }
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return headroom[a] > headroom[b];
        });

        double remaining = demand_forecast[t];
        if (remaining < 0.0) {
            remaining = 0.0;
            ++plan.negative_forecast_clamps;
        }
        for (std::size_t s : order) {
            if (remaining <= 0.0) break;
            const double take = std::min(remaining, headroom[s]);
            if (take > 0.0) {
                alloc.assigned[s] = take;
                alloc.order.push_back(s);
                remaining -= take;
            }
        }
        alloc.unplaced_forecast = remaining;
    }
    return plan;
}

ScheduleOutcome evaluate_plan(const SchedulePlan& plan, const std::vector<double>& actual_demand,
                              const std::vector<Server>& servers, const SalParams& sp) {
    if (plan.intervals.size() != actual_demand.size()) {
        throw std::invalid_argument("evaluate_plan: plan covers " +
                                    std::to_string(plan.intervals.size()) +
                                    " intervals, actuals cover " +
                                    std::to_string(actual_demand.size()));
    }
    for (const Server& s : servers) {
        if (s.workload.size() != plan.intervals.size()) {
            throw std::invalid_argument("evaluate_plan: server workload length mismatch");
        }
    }

    ScheduleOutcome outcome;
    outcome.intervals.resize(plan.intervals.size());
    for (std::size_t t = 0; t < plan.intervals.size(); ++t) {
        const IntervalAllocation& alloc = plan.intervals[t];
        IntervalOutcome& io = outcome.intervals[t];
        if (alloc.assigned.size() != servers.size()) {
            throw std::invalid_argument("evaluate_plan: allocation has wrong server count");
        }

        // Realized demand fills reserved slots in plan order.
        double remaining = std::max(actual_demand[t], 0.0);
        for (std::size_t s : alloc.order) {
            const double filled = std::min(alloc.assigned[s], remaining);
            remaining -= filled;

            const double reserved_unused = alloc.assigned[s] - filled;
            io.over_loss += sp.overprovision_cost * reserved_unused;

            const double load = filled + servers[s].workload[t];
            if (load > servers[s].capacity + kLoadTolerance) {
                const double excess = load - servers[s].capacity;
                const double displaced = std::min(excess, filled);  // demand pushed off the server
                ++io.sla_events;
                io.under_loss += sp.sla_penalty + sp.revenue * displaced;
                io.served += filled - displaced;
                io.unserved += displaced;
            } else {
                io.served += filled;
            }
        }
        if (remaining > kLoadTolerance) {
            // Demand with no reserved slot: lost revenue plus one SLA event
            // for the affected interval.
            io.under_loss += sp.revenue * remaining + sp.sla_penalty;
            ++io.sla_events;
        }
        io.unserved += remaining;

        outcome.under_loss += io.under_loss;
        outcome.over_loss += io.over_loss;
        outcome.sla_events += io.sla_events;
        outcome.served += io.served;
        outcome.unserved += io.unserved;
    }
    outcome.total_loss = outcome.under_loss + outcome.over_loss;
    return outcome;
}

void ScenarioConfig::validate() const {
    if (servers == 0) throw std::invalid_argument("scenario: need at least one server");
    if (horizon == 0) throw std::invalid_argument("scenario: horizon must be positive");
    if (!(capacity_min > 0.0) || capacity_max < capacity_min) {
        throw std::invalid_argument("scenario: capacity range invalid");
    }
    if (workload_base < 0.0 || workload_daily_amplitude < 0.0 || workload_noise_std < 0.0) {
        throw std::invalid_argument("scenario: workload scales must be non-negative");
    }
}

Scenario build_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    Scenario sc;
    Rng rng(cfg.seed);

    SynthConfig demand_cfg = cfg.demand;
    demand_cfg.length = cfg.horizon;
    demand_cfg.seed = cfg.seed * 0x9e3779b97f4a7c15ull + 1;
    sc.demand = synth_generate(demand_cfg);

    sc.fleet.reserve(cfg.servers);
    for (std::size_t i = 0; i < cfg.servers; ++i) {
        Server s;
        s.id = i;
        s.capacity = rng.uniform(cfg.capacity_min, cfg.capacity_max);
        SynthConfig wl;
        wl.length = cfg.horizon;
        wl.interval = demand_cfg.interval;
        wl.start = demand_cfg.start;
        wl.base = cfg.workload_base;
        wl.daily_amplitude = cfg.workload_daily_amplitude;
        wl.weekly_amplitude = cfg.workload_daily_amplitude * 0.5;
        wl.burst_rate = 0.0;
        wl.burst_scale = 0.0;
        wl.noise_std = cfg.workload_noise_std;
        wl.seed = cfg.seed * 0x9e3779b97f4a7c15ull + 101 + i;
        s.workload = synth_generate(wl).values;
        sc.fleet.push_back(std::move(s));
    }
    return sc;
}

}  // namespace hrs
