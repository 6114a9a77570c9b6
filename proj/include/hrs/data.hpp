#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace hrs {

constexpr std::size_t kTimestampFields = 5;  // month, day, weekday, hour, minute

//! A univariate series with per-point epoch-second timestamps, strictly
//! increasing at a fixed interval.
struct Series {
    std::vector<double> values;
    std::vector<std::int64_t> timestamps;

    std::size_t size() const { return values.size(); }
};

//! One forecasting sample: lookback values and timestamps plus the horizon
//! to predict, all in raw units. Min/max of the lookback are kept so model
//! outputs can be mapped back to raw scale.
struct SeriesWindow {
    std::vector<double> lookback;
    std::vector<std::int64_t> timestamps;
    std::vector<double> horizon;
    double lookback_min = 0.0;
    double lookback_max = 0.0;
    std::size_t offset = 0;  // position of the first lookback point in the source series
};

struct SplitDataset {
    std::vector<SeriesWindow> train;
    std::vector<SeriesWindow> val;
    std::vector<SeriesWindow> test;
};

//! Synthetic bursty-load generator: base + daily and weekly sinusoids +
//! Poisson-arriving exponential-magnitude triangular bursts + Gaussian
//! noise, clamped at zero. Fully determined by the seed.
struct SynthConfig {
    std::size_t length = 1080;
    std::int64_t interval = 3600;
    std::int64_t start = 1672617600;  // 2023-01-02 00:00:00 UTC, a Monday
    double base = 300.0;
    double daily_amplitude = 80.0;
    double weekly_amplitude = 30.0;
    double burst_rate = 1.5;   // expected bursts per day
    double burst_scale = 150.0;
    double noise_std = 15.0;
    std::uint64_t seed = 1;

    void validate() const;
};

Series synth_generate(const SynthConfig& cfg);

std::vector<SeriesWindow> window_dataset(const Series& series, std::size_t lookback,
                                         std::size_t horizon, std::size_t stride);

//! Chronological split by window counts; windows whose span crosses into the
//! next partition are dropped so no test timestamp overlaps training.
SplitDataset split(const std::vector<SeriesWindow>& windows, const std::array<double, 3>& ratios,
                   std::size_t lookback, std::size_t horizon);

//! Calendar fields of a UTC timestamp, each affinely scaled to [-0.5, 0.5].
std::array<double, kTimestampFields> decompose_timestamp(std::int64_t epoch_seconds);

struct CivilTime {
    int year;
    int month;    // 1..12
    int day;      // 1..31
    int weekday;  // 0 = Monday .. 6 = Sunday
    int hour;
    int minute;
    int second;
};

CivilTime civil_from_epoch(std::int64_t epoch_seconds);
std::int64_t epoch_from_civil(int year, int month, int day, int hour, int minute, int second);

struct CsvLoadResult {
    Series series;
    std::size_t malformed_rows = 0;
};

CsvLoadResult load_csv(const std::string& path, const std::string& value_column,
                       const std::string& timestamp_column);
void write_csv(const std::string& path, const Series& series,
               const std::string& value_column = "value",
               const std::string& timestamp_column = "timestamp");

//! Parses ISO-8601 "YYYY-MM-DD[ T]HH:MM[:SS]" or plain epoch seconds.
bool parse_timestamp(const std::string& text, std::int64_t& out);
std::string format_timestamp(std::int64_t epoch_seconds);

// Per-window min-max scaling; a zero span maps to an identity span so the
// inverse is always defined.
double window_span(const SeriesWindow& w);
std::vector<double> normalize_window(const SeriesWindow& w);
double denormalize_value(const SeriesWindow& w, double normalized);

}  // namespace hrs
