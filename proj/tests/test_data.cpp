#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <ctime>
#include <fstream>

#include "hrs/data.hpp"
#include "hrs/rng.hpp"

using namespace hrs;

namespace {

Series make_series(std::size_t n, std::int64_t start = 1672617600, std::int64_t interval = 3600) {
    Series s;
    for (std::size_t i = 0; i < n; ++i) {
        s.values.push_back(static_cast<double>(i));
        s.timestamps.push_back(start + static_cast<std::int64_t>(i) * interval);
    }
    return s;
}

}  // namespace

TEST_CASE("window_dataset counts and indexing") {
    const Series s = make_series(10);
    const auto windows = window_dataset(s, 4, 2, 1);
    CHECK(windows.size() == 5);
    CHECK(windows[0].horizon == std::vector<double>{4.0, 5.0});
    CHECK(windows[0].lookback == std::vector<double>{0.0, 1.0, 2.0, 3.0});
    CHECK(windows[0].lookback_min == 0.0);
    CHECK(windows[0].lookback_max == 3.0);

    const auto one = window_dataset(make_series(6), 4, 2, 1);
    CHECK(one.size() == 1);

    CHECK_THROWS_AS(window_dataset(make_series(5), 4, 2, 1), std::invalid_argument);
    CHECK(window_dataset(make_series(12), 4, 2, 3).size() == 3);
}

TEST_CASE("split partitions chronologically without leakage") {
    const std::size_t L = 4, T = 2;
    const Series s = make_series(100 + L + T - 1);  // exactly 100 stride-1 windows
    const auto windows = window_dataset(s, L, T, 1);
    REQUIRE(windows.size() == 100);

    const SplitDataset ds = split(windows, {0.7, 0.1, 0.2}, L, T);
    CHECK(ds.test.size() == 20);
    CHECK(ds.train.size() == 70 - (L + T - 1));
    CHECK(ds.val.size() == 10 - (L + T - 1));

    const auto last_train_ts = ds.train.back().timestamps.back() +
                               static_cast<std::int64_t>(T) * 3600;
    for (const auto& w : ds.val) CHECK(w.timestamps.front() >= last_train_ts);
    std::int64_t max_train = 0;
    for (const auto& w : ds.train) {
        max_train = std::max(max_train, w.timestamps.back() + static_cast<std::int64_t>(T) * 3600);
    }
    for (const auto& w : ds.test) CHECK(w.timestamps.front() > max_train);

    // The alternative workload-style split also holds together.
    const SplitDataset alt = split(windows, {0.6, 0.2, 0.2}, L, T);
    CHECK(alt.test.size() == 20);

    CHECK_THROWS_AS(split(windows, {0.5, 0.2, 0.2}, L, T), std::invalid_argument);
    CHECK_THROWS_AS(split(windows, {-0.2, 0.6, 0.6}, L, T), std::invalid_argument);
    const auto tiny = window_dataset(make_series(L + T + 2), L, T, 1);
    CHECK_THROWS_AS(split(tiny, {0.7, 0.1, 0.2}, L, T), std::invalid_argument);
}

TEST_CASE("timestamp decomposition matches the calendar") {
    // 2024-01-01 00:00 UTC is a Monday.
    const std::int64_t monday = epoch_from_civil(2024, 1, 1, 0, 0, 0);
    const auto f = decompose_timestamp(monday);
    CHECK(f[0] == doctest::Approx(-0.5));           // January
    CHECK(f[1] == doctest::Approx(-0.5));           // day 1
    CHECK(f[2] == doctest::Approx(-0.5));           // Monday
    CHECK(f[3] == doctest::Approx(-0.5));           // hour 0
    CHECK(f[4] == doctest::Approx(-0.5));           // minute 0

    // Same wall-clock time a day later keeps hour/minute fields.
    const auto g = decompose_timestamp(monday + 86400);
    CHECK(g[3] == f[3]);
    CHECK(g[4] == f[4]);
    CHECK(g[2] == doctest::Approx(1.0 / 6.0 - 0.5));  // Tuesday

    // Determinism.
    CHECK(decompose_timestamp(monday) == decompose_timestamp(monday));

    CHECK_THROWS_AS(decompose_timestamp(-3000000000LL), std::invalid_argument);
    CHECK_THROWS_AS(decompose_timestamp(20000000000LL), std::invalid_argument);
}

TEST_CASE("civil conversion agrees with the C library across random times") {
    Rng rng(31);
    for (int i = 0; i < 300; ++i) {
        const std::int64_t t = static_cast<std::int64_t>(rng.uniform(0.0, 4102444800.0));
        const CivilTime c = civil_from_epoch(t);
        std::tm ref{};
        const time_t tt = static_cast<time_t>(t);
        gmtime_r(&tt, &ref);
        CHECK(c.year == ref.tm_year + 1900);
        CHECK(c.month == ref.tm_mon + 1);
        CHECK(c.day == ref.tm_mday);
        CHECK(c.hour == ref.tm_hour);
        CHECK(c.minute == ref.tm_min);
        CHECK(c.second == ref.tm_sec);
        // tm_wday counts Sunday=0; ours counts Monday=0.
        CHECK(c.weekday == (ref.tm_wday + 6) % 7);
        CHECK(epoch_from_civil(c.year, c.month, c.day, c.hour, c.minute, c.second) == t);
    }
}

TEST_CASE("synthetic generator") {
    SynthConfig cfg;
    cfg.length = 24 * 30;

    SUBCASE("same seed gives identical series") {
        const Series a = synth_generate(cfg);
        const Series b = synth_generate(cfg);
        CHECK(a.values == b.values);
        CHECK(a.timestamps == b.timestamps);
    }
    SUBCASE("a different seed changes the series") {
        SynthConfig other = cfg;
        other.seed = cfg.seed + 1;
        CHECK(synth_generate(cfg).values != synth_generate(other).values);
    }
    SUBCASE("degenerate config is the constant base") {
        SynthConfig flat = cfg;
        flat.daily_amplitude = 0;
        flat.weekly_amplitude = 0;
        flat.burst_rate = 0;
        flat.noise_std = 0;
        const Series s = synth_generate(flat);
        for (double v : s.values) CHECK(v == flat.base);
    }
    SUBCASE("values never go negative") {
        SynthConfig wild = cfg;
        wild.noise_std = 400.0;
        for (double v : synth_generate(wild).values) CHECK(v >= 0.0);
    }
    SUBCASE("daily period dominates a 13-hour lag") {
        const Series s = synth_generate(cfg);
        const auto acf = [&](std::size_t lag) {
            double mean = 0.0;
            for (double v : s.values) mean += v;
            mean /= static_cast<double>(s.size());
            double num = 0.0, den = 0.0;
            for (std::size_t i = 0; i + lag < s.size(); ++i) {
                num += (s.values[i] - mean) * (s.values[i + lag] - mean);
            }
            for (double v : s.values) den += (v - mean) * (v - mean);
            return num / den;
        };
        CHECK(acf(24) > acf(13));
    }
}

TEST_CASE("csv round trip and validation") {
    const std::string path = "test_data_series.csv";

    SUBCASE("write/read preserves values bit-exactly") {
        SynthConfig cfg;
        cfg.length = 100;
        const Series s = synth_generate(cfg);
        write_csv(path, s);
        const CsvLoadResult r = load_csv(path, "value", "timestamp");
        CHECK(r.malformed_rows == 0);
        REQUIRE(r.series.size() == s.size());
        for (std::size_t i = 0; i < s.size(); ++i) {
            CHECK(r.series.values[i] == s.values[i]);
            CHECK(r.series.timestamps[i] == s.timestamps[i]);
        }
    }
    SUBCASE("small well-formed file loads") {
        std::ofstream out(path);
        out << "timestamp,value\n";
        out << "2023-01-02 00:00:00,1.5\n";
        out << "1672621200,2.5\n";  // epoch form is auto-detected per row
        out << "2023-01-02 02:00:00,3.5\n";
        out.close();
        const CsvLoadResult r = load_csv(path, "value", "timestamp");
        CHECK(r.series.size() == 3);
        CHECK(r.series.values[1] == 2.5);
        CHECK(r.series.timestamps[0] == 1672617600);
    }
    SUBCASE("header-only file is rejected") {
        std::ofstream out(path);
        out << "timestamp,value\n";
        out.close();
        CHECK_THROWS_AS(load_csv(path, "value", "timestamp"), std::runtime_error);
    }
    SUBCASE("non-monotone timestamps are rejected") {
        std::ofstream out(path);
        out << "timestamp,value\n100,1\n50,2\n";
        out.close();
        CHECK_THROWS_AS(load_csv(path, "value", "timestamp"), std::runtime_error);
    }
    SUBCASE("malformed rows are counted, not fatal") {
        std::ofstream out(path);
        out << "timestamp,value\n100,1\nnot-a-time,2\n200,oops\n300,3\n";
        out.close();
        const CsvLoadResult r = load_csv(path, "value", "timestamp");
        CHECK(r.series.size() == 2);
        CHECK(r.malformed_rows == 2);
    }
    SUBCASE("missing columns are named") {
        std::ofstream out(path);
        out << "ts,v\n100,1\n";
        out.close();
        CHECK_THROWS_WITH_AS(load_csv(path, "value", "timestamp"), doctest::Contains("value"),
                             std::runtime_error);
    }
    std::remove(path.c_str());
}

TEST_CASE("timestamp parsing forms") {
    std::int64_t t = 0;
    CHECK(parse_timestamp("1672617600", t));
    CHECK(t == 1672617600);
    CHECK(parse_timestamp("2023-01-02 00:00:00", t));
    CHECK(t == 1672617600);
    CHECK(parse_timestamp("2023-01-02T00:00:00", t));
    CHECK(t == 1672617600);
    CHECK(parse_timestamp("2023-01-02 00:00", t));
    CHECK(t == 1672617600);
    CHECK(parse_timestamp("2023-01-02", t));
    CHECK(t == 1672617600);
    CHECK_FALSE(parse_timestamp("yesterday", t));
    CHECK_FALSE(parse_timestamp("2023-13-02", t));
    CHECK(format_timestamp(1672617600) == "2023-01-02 00:00:00");
}

TEST_CASE("per-window normalization round trips") {
    Rng rng(32);
    SeriesWindow w;
    for (int i = 0; i < 16; ++i) w.lookback.push_back(rng.uniform(10.0, 500.0));
    w.lookback_min = *std::min_element(w.lookback.begin(), w.lookback.end());
    w.lookback_max = *std::max_element(w.lookback.begin(), w.lookback.end());
    const auto normed = normalize_window(w);
    for (double v : normed) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
    for (std::size_t i = 0; i < normed.size(); ++i) {
        CHECK(denormalize_value(w, normed[i]) == doctest::Approx(w.lookback[i]).epsilon(1e-12));
    }

    SeriesWindow flat;
    flat.lookback = {7.0, 7.0, 7.0};
    flat.lookback_min = flat.lookback_max = 7.0;
    const auto fn = normalize_window(flat);
    for (double v : fn) CHECK(v == 0.0);
    CHECK(denormalize_value(flat, 0.0) == 7.0);
}
