#include "hrs/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <stdexcept>

namespace hrs {

namespace {

void check_pair(std::span<const double> actual, std::span<const double> predicted,
                const char* op) {
    if (actual.empty()) throw std::invalid_argument(std::string(op) + ": empty input");
    if (actual.size() != predicted.size()) {
        throw std::invalid_argument(std::string(op) + ": length mismatch " +
                                    std::to_string(actual.size()) + " vs " +
                                    std::to_string(predicted.size()));
    }
}

}  // namespace

double apl(std::span<const double> actual, std::span<const double> predicted,
           const SalParams& sp) {
    check_pair(actual, predicted, "apl");
    double acc = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        acc += sal_exact(actual[i], predicted[i], sp);
    }
    return acc / static_cast<double>(actual.size());
}

std::pair<std::size_t, double> sla_violations(std::span<const double> actual,
                                              std::span<const double> predicted) {
    check_pair(actual, predicted, "sla_violations");
    std::size_t count = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (predicted[i] < actual[i]) ++count;
    }
    return {count, static_cast<double>(count) / static_cast<double>(actual.size())};
}

std::pair<double, double> under_over_proportions(std::span<const double> actual,
                                                 std::span<const double> predicted) {
    check_pair(actual, predicted, "under_over_proportions");
    std::size_t under = 0;
    std::size_t over = 0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (predicted[i] < actual[i]) ++under;
        if (predicted[i] > actual[i]) ++over;
    }
    const double n = static_cast<double>(actual.size());
    return {under / n, over / n};
}

double coefficient_of_variation(std::span<const double> values) {
    if (values.size() < 2) throw std::invalid_argument("cv: need at least 2 values");
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(values.size());
    if (mean == 0.0) throw std::invalid_argument("cv: zero mean");
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    var /= static_cast<double>(values.size());
    return std::sqrt(var) / mean;
}

EvalReport make_report(std::span<const double> actual, std::span<const double> predicted,
                       const SalParams& sp) {
    check_pair(actual, predicted, "report");
    EvalReport r;
    r.n_points = actual.size();
    r.apl = apl(actual, predicted, sp);
    const auto [count, rate] = sla_violations(actual, predicted);
    r.sla_violation_count = count;
    r.sla_violation_rate = rate;
    const auto [under, over] = under_over_proportions(actual, predicted);
    r.under_fraction = under;
    r.over_fraction = over;
    double se = 0.0;
    double ae = 0.0;
    for (std::size_t i = 0; i < actual.size(); ++i) {
        const double e = predicted[i] - actual[i];
        se += e * e;
        ae += std::abs(e);
    }
    r.mse = se / static_cast<double>(actual.size());
    r.mae = ae / static_cast<double>(actual.size());
    return r;
}

std::string report_record(const EvalReport& report) {
    char buf[512];
    std::snprintf(buf, sizeof(buf),
                  "apl=%.17g sla_violation_count=%zu sla_violation_rate=%.17g "
                  "under_fraction=%.17g over_fraction=%.17g mse=%.17g mae=%.17g n_points=%zu",
                  report.apl, report.sla_violation_count, report.sla_violation_rate,
                  report.under_fraction, report.over_fraction, report.mse, report.mae,
                  report.n_points);
    return buf;
}

}  // namespace hrs
