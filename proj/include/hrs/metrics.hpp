#pragma once

#include <span>
#include <string>
#include <utility>

#include "hrs/sal.hpp"

namespace hrs {

//! Per-run evaluation summary; apl is money per test point, fractions
//! partition the test points into under / over / exact predictions.
struct EvalReport {
    double apl = 0.0;
    std::size_t sla_violation_count = 0;
    double sla_violation_rate = 0.0;
    double under_fraction = 0.0;
    double over_fraction = 0.0;
    double mse = 0.0;
    double mae = 0.0;
    std::size_t n_points = 0;
};

double apl(std::span<const double> actual, std::span<const double> predicted,
           const SalParams& sp);
std::pair<std::size_t, double> sla_violations(std::span<const double> actual,
                                              std::span<const double> predicted);
std::pair<double, double> under_over_proportions(std::span<const double> actual,
                                                 std::span<const double> predicted);

//! Population standard deviation divided by the mean; rejects zero means.
double coefficient_of_variation(std::span<const double> values);

EvalReport make_report(std::span<const double> actual, std::span<const double> predicted,
                       const SalParams& sp);

//! One-line key=value record, parse-stable and byte-deterministic.
std::string report_record(const EvalReport& report);

}  // namespace hrs
