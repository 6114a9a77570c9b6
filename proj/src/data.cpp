#include "hrs/data.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "hrs/rng.hpp"

namespace hrs {

namespace {

constexpr std::int64_t kSecondsPerDay = 86400;
constexpr std::int64_t kSecondsPerWeek = 7 * kSecondsPerDay;
constexpr double kTwoPi = 6.283185307179586;

// Supported calendar range; timestamps outside are rejected.
constexpr std::int64_t kMinEpoch = -2208988800LL;  // 1900-01-01
constexpr std::int64_t kMaxEpoch = 16725225600LL;  // 2500-01-01

std::int64_t floordiv(std::int64_t a, std::int64_t b) {
    std::int64_t q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

std::int64_t floormod(std::int64_t a, std::int64_t b) { return a - floordiv(a, b) * b; }

// Days-to-civil conversion, proleptic Gregorian calendar.
void civil_from_days(std::int64_t z, int& year, int& month, int& day) {
    z += 719468;
    const std::int64_t era = floordiv(z, 146097);
    const std::int64_t doe = z - era * 146097;
    const std::int64_t yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    const std::int64_t y = yoe + era * 400;
    const std::int64_t doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const std::int64_t mp = (5 * doy + 2) / 153;
    day = static_cast<int>(doy - (153 * mp + 2) / 5 + 1);
    month = static_cast<int>(mp < 10 ? mp + 3 : mp - 9);
    year = static_cast<int>(month <= 2 ? y + 1 : y);
}

std::int64_t days_from_civil(int year, int month, int day) {
    const std::int64_t y = year - (month <= 2 ? 1 : 0);
    const std::int64_t era = floordiv(y, 400);
    const std::int64_t yoe = y - era * 400;
    const std::int64_t mp = month > 2 ? month - 3 : month + 9;
    const std::int64_t doy = (153 * mp + 2) / 5 + day - 1;
    const std::int64_t doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + doe - 719468;
}

}  // namespace

CivilTime civil_from_epoch(std::int64_t epoch_seconds) {
    if (epoch_seconds < kMinEpoch || epoch_seconds >= kMaxEpoch) {
        throw std::invalid_argument("timestamp " + std::to_string(epoch_seconds) +
                                    " outside supported calendar range");
    }
    const std::int64_t days = floordiv(epoch_seconds, kSecondsPerDay);
    const std::int64_t sod = floormod(epoch_seconds, kSecondsPerDay);
    CivilTime c{};
    civil_from_days(days, c.year, c.month, c.day);
    c.weekday = static_cast<int>(floormod(days + 3, 7));  // 1970-01-01 was a Thursday
    c.hour = static_cast<int>(sod / 3600);
    c.minute = static_cast<int>((sod % 3600) / 60);
    c.second = static_cast<int>(sod % 60);
    return c;
}

std::int64_t epoch_from_civil(int year, int month, int day, int hour, int minute, int second) {
    return days_from_civil(year, month, day) * kSecondsPerDay + hour * 3600 + minute * 60 + second;
}

std::array<double, kTimestampFields> decompose_timestamp(std::int64_t epoch_seconds) {
    const CivilTime c = civil_from_epoch(epoch_seconds);
    return {
        (c.month - 1) / 11.0 - 0.5,
        (c.day - 1) / 30.0 - 0.5,
        c.weekday / 6.0 - 0.5,
        c.hour / 23.0 - 0.5,
        c.minute / 59.0 - 0.5,
    };
}

void SynthConfig::validate() const {
    if (length < 2) throw std::invalid_argument("synth: length must be at least 2");
    if (interval <= 0) throw std::invalid_argument("synth: interval must be positive");
    if (base < 0 || daily_amplitude < 0 || weekly_amplitude < 0 || burst_rate < 0 ||
        burst_scale < 0 || noise_std < 0) {
        throw std::invalid_argument("synth: scales must be non-negative");
    }
}

Series synth_generate(const SynthConfig& cfg) {
    cfg.validate();
    Rng rng(cfg.seed);
    Series s;
    s.values.assign(cfg.length, 0.0);
    s.timestamps.resize(cfg.length);

    const double burst_prob =
        std::min(1.0, cfg.burst_rate * static_cast<double>(cfg.interval) / kSecondsPerDay);
    // Triangular spikes a few hours wide.
    const long half_width =
        std::max<long>(1, std::lround(7200.0 / static_cast<double>(cfg.interval)));

    for (std::size_t i = 0; i < cfg.length; ++i) {
        const std::int64_t t = cfg.start + static_cast<std::int64_t>(i) * cfg.interval;
        s.timestamps[i] = t;
        const double tod = static_cast<double>(floormod(t, kSecondsPerDay));
        const double tow = static_cast<double>(floormod(t, kSecondsPerWeek));
        double v = cfg.base;
        v += cfg.daily_amplitude * std::sin(kTwoPi * tod / kSecondsPerDay);
        v += cfg.weekly_amplitude * std::sin(kTwoPi * tow / kSecondsPerWeek);
        v += cfg.noise_std == 0.0 ? 0.0 : rng.normal(0.0, cfg.noise_std);
        s.values[i] += v;
        if (burst_prob > 0.0 && cfg.burst_scale > 0.0 && rng.bernoulli(burst_prob)) {
            const double magnitude = rng.exponential(cfg.burst_scale);
            for (long k = -half_width; k <= half_width; ++k) {
                const long j = static_cast<long>(i) + k;
                if (j < 0 || j >= static_cast<long>(cfg.length)) continue;
                const double fade = 1.0 - std::labs(k) / static_cast<double>(half_width + 1);
                s.values[static_cast<std::size_t>(j)] += magnitude * fade;
            }
        }
    }
    for (double& v : s.values) v = std::max(v, 0.0);
    return s;
}

std::vector<SeriesWindow> window_dataset(const Series& series, std::size_t lookback,
                                         std::size_t horizon, std::size_t stride) {
    if (lookback < 2) throw std::invalid_argument("window: lookback must be at least 2");
    if (horizon < 1) throw std::invalid_argument("window: horizon must be at least 1");
    if (stride < 1) throw std::invalid_argument("window: stride must be at least 1");
    if (series.values.size() != series.timestamps.size()) {
        throw std::invalid_argument("window: series values/timestamps lengths differ");
    }
    const std::size_t n = series.size();
    if (n < lookback + horizon) {
        throw std::invalid_argument("window: series length " + std::to_string(n) +
                                    " is shorter than lookback+horizon " +
                                    std::to_string(lookback + horizon));
    }
    std::vector<SeriesWindow> out;
    for (std::size_t off = 0; off + lookback + horizon <= n; off += stride) {
        SeriesWindow w;
        w.offset = off;
        w.lookback.assign(series.values.begin() + off, series.values.begin() + off + lookback);
        w.timestamps.assign(series.timestamps.begin() + off,
                            series.timestamps.begin() + off + lookback);
        w.horizon.assign(series.values.begin() + off + lookback,
                         series.values.begin() + off + lookback + horizon);
        w.lookback_min = *std::min_element(w.lookback.begin(), w.lookback.end());
        w.lookback_max = *std::max_element(w.lookback.begin(), w.lookback.end());
        out.push_back(std::move(w));
    }
    return out;
}

SplitDataset split(const std::vector<SeriesWindow>& windows, const std::array<double, 3>& ratios,
                   std::size_t lookback, std::size_t horizon) {
    for (double r : ratios) {
        if (r <= 0.0) throw std::invalid_argument("split: ratios must be positive");
    }
    const double total = ratios[0] + ratios[1] + ratios[2];
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::invalid_argument("split: ratios must sum to 1");
    }
    const std::size_t n = windows.size();
    const std::size_t n_train = static_cast<std::size_t>(n * ratios[0]);
    const std::size_t n_val = static_cast<std::size_t>(n * ratios[1]);
    if (n_train == 0 || n_val == 0 || n_train + n_val >= n) {
        throw std::invalid_argument("split: a partition would be empty");
    }
    const std::size_t span = lookback + horizon;

    SplitDataset ds;
    const std::size_t val_start_off = windows[n_train].offset;
    const std::size_t test_start_off = windows[n_train + n_val].offset;
    for (std::size_t i = 0; i < n_train; ++i) {
        if (windows[i].offset + span <= val_start_off) ds.train.push_back(windows[i]);
    }
    for (std::size_t i = n_train; i < n_train + n_val; ++i) {
        if (windows[i].offset + span <= test_start_off) ds.val.push_back(windows[i]);
    }
    for (std::size_t i = n_train + n_val; i < n; ++i) ds.test.push_back(windows[i]);

    if (ds.train.empty() || ds.val.empty() || ds.test.empty()) {
        throw std::invalid_argument("split: a partition is empty after dropping boundary windows");
    }
    return ds;
}

bool parse_timestamp(const std::string& text, std::int64_t& out) {
    std::string_view sv(text);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.front()))) sv.remove_prefix(1);
    while (!sv.empty() && std::isspace(static_cast<unsigned char>(sv.back()))) sv.remove_suffix(1);
    if (sv.empty()) return false;

    // Plain integer: epoch seconds.
    {
        std::int64_t v = 0;
        const auto [p, ec] = std::from_chars(sv.data(), sv.data() + sv.size(), v);
        if (ec == std::errc() && p == sv.data() + sv.size()) {
            out = v;
            return true;
        }
    }
    // ISO-8601 date with optional time.
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    char sep = 0;
    int consumed = 0;
    const int got = std::sscanf(sv.data(), "%d-%d-%d%c%d:%d:%d%n", &y, &mo, &d, &sep, &h, &mi,
                                &sec, &consumed);
    if (got >= 6 && (sep == ' ' || sep == 'T')) {
        if (got == 6) sec = 0;
    } else {
        h = mi = sec = 0;
        int c2 = 0;
        if (std::sscanf(sv.data(), "%d-%d-%d%n", &y, &mo, &d, &c2) != 3 ||
            c2 != static_cast<int>(sv.size())) {
            return false;
        }
    }
    if (mo < 1 || mo > 12 || d < 1 || d > 31 || h < 0 || h > 23 || mi < 0 || mi > 59 || sec < 0 ||
        sec > 60) {
        return false;
    }
    out = epoch_from_civil(y, mo, d, h, mi, sec);
    return true;
}

std::string format_timestamp(std::int64_t epoch_seconds) {
    const CivilTime c = civil_from_epoch(epoch_seconds);
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d %02d:%02d:%02d", c.year, c.month, c.day, c.hour,
                  c.minute, c.second);
    return buf;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur.push_back(ch);
        }
    }
    fields.push_back(cur);
    for (std::string& f : fields) {
        while (!f.empty() && std::isspace(static_cast<unsigned char>(f.front()))) f.erase(f.begin());
        while (!f.empty() && std::isspace(static_cast<unsigned char>(f.back()))) f.pop_back();
    }
    return fields;
}

}  // namespace

CsvLoadResult load_csv(const std::string& path, const std::string& value_column,
                       const std::string& timestamp_column) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("csv: cannot open " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("csv: empty file " + path);
    const auto header = split_csv_line(line);
    std::ptrdiff_t vcol = -1, tcol = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == value_column) vcol = static_cast<std::ptrdiff_t>(i);
        if (header[i] == timestamp_column) tcol = static_cast<std::ptrdiff_t>(i);
    }
    if (vcol < 0) throw std::runtime_error("csv: value column '" + value_column + "' not found");
    if (tcol < 0) {
        throw std::runtime_error("csv: timestamp column '" + timestamp_column + "' not found");
    }

    CsvLoadResult result;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() <= static_cast<std::size_t>(std::max(vcol, tcol))) {
            ++result.malformed_rows;
            continue;
        }
        std::int64_t ts = 0;
        if (!parse_timestamp(fields[static_cast<std::size_t>(tcol)], ts)) {
            ++result.malformed_rows;
            continue;
        }
        double v = 0.0;
        const std::string& vs = fields[static_cast<std::size_t>(vcol)];
        const auto [p, ec] = std::from_chars(vs.data(), vs.data() + vs.size(), v);
        if (ec != std::errc() || p != vs.data() + vs.size()) {
            ++result.malformed_rows;
            continue;
        }
        if (!result.series.timestamps.empty() && ts <= result.series.timestamps.back()) {
            throw std::runtime_error("csv: non-monotone timestamp at row with t=" +
                                     std::to_string(ts));
        }
        result.series.timestamps.push_back(ts);
        result.series.values.push_back(v);
    }
    if (result.series.values.empty()) {
        throw std::runtime_error("csv: no data rows in " + path);
    }
    return result;
}

void write_csv(const std::string& path, const Series& series, const std::string& value_column,
               const std::string& timestamp_column) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("csv: cannot open " + path + " for writing");
    out << timestamp_column << "," << value_column << "\n";
    char buf[64];
    for (std::size_t i = 0; i < series.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%.17g", series.values[i]);
        out << format_timestamp(series.timestamps[i]) << "," << buf << "\n";
    }
    if (!out) throw std::runtime_error("csv: write failed for " + path);
}

double window_span(const SeriesWindow& w) {
    const double span = w.lookback_max - w.lookback_min;
    return span == 0.0 ? 1.0 : span;
}

std::vector<double> normalize_window(const SeriesWindow& w) {
    const double span = window_span(w);
    std::vector<double> out(w.lookback.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = (w.lookback[i] - w.lookback_min) / span;
    }
    return out;
}

double denormalize_value(const SeriesWindow& w, double normalized) {
    return normalized * window_span(w) + w.lookback_min;
}

}  // namespace hrs
