#include "hrs/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace hrs {

namespace {

constexpr double kWidth = 960.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 40.0;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

std::ofstream open_svg(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("svg: cannot open " + path + " for writing");
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
        << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    return out;
}

void close_svg(std::ofstream& out, const std::string& path) {
    out << "</svg>\n";
    if (!out) throw std::runtime_error("svg: write failed for " + path);
}

void draw_frame(std::ofstream& out, const std::string& title) {
    out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" "
        << "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";
    out << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
        << kWidth - kMarginLeft - kMarginRight << "\" height=\""
        << kHeight - kMarginTop - kMarginBottom
        << "\" fill=\"none\" stroke=\"#444\" stroke-width=\"1\"/>\n";
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series) {
    if (series.empty()) throw std::invalid_argument("svg: no series to plot");
    std::size_t n = 0;
    double lo = 0.0, hi = 0.0;
    bool first = true;
    for (const auto& s : series) {
        n = std::max(n, s.values.size());
        for (double v : s.values) {
            if (first) {
                lo = hi = v;
                first = false;
            }
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (n < 2) throw std::invalid_argument("svg: need at least two points");
    if (hi == lo) hi = lo + 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    auto xpos = [&](std::size_t i, std::size_t len) {
        return kMarginLeft + plot_w * static_cast<double>(i) / static_cast<double>(len - 1);
    };
    auto ypos = [&](double v) { return kMarginTop + plot_h * (1.0 - (v - lo) / (hi - lo)); };

    auto out = open_svg(path);
    draw_frame(out, title);
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << ypos(hi) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(hi)
        << "</text>\n";
    out << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << ypos(lo) + 4
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" << fmt(lo)
        << "</text>\n";

    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto& s = series[k];
        if (s.values.size() < 2) continue;
        const std::string color =
            s.color.empty() ? kPalette[k % (sizeof(kPalette) / sizeof(kPalette[0]))] : s.color;
        out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.values.size(); ++i) {
            out << fmt(xpos(i, s.values.size())) << "," << fmt(ypos(s.values[i])) << " ";
        }
        out << "\"/>\n";
        const double ly = kMarginTop + 16.0 + 16.0 * static_cast<double>(k);
        out << "<rect x=\"" << kMarginLeft + 10 << "\" y=\"" << ly - 9
            << "\" width=\"12\" height=\"4\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << kMarginLeft + 28 << "\" y=\"" << ly
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << s.label << "</text>\n";
    }
    close_svg(out, path);
}

void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::pair<std::string, double>>& bars) {
    if (bars.empty()) throw std::invalid_argument("svg: no bars to plot");
    double hi = 0.0;
    for (const auto& [label, v] : bars) hi = std::max(hi, v);
    if (hi == 0.0) hi = 1.0;

    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const double slot = plot_w / static_cast<double>(bars.size());
    const double bar_w = slot * 0.6;

    auto out = open_svg(path);
    draw_frame(out, title);
    for (std::size_t i = 0; i < bars.size(); ++i) {
        const double h = plot_h * bars[i].second / hi;
        const double x = kMarginLeft + slot * static_cast<double>(i) + (slot - bar_w) / 2.0;
        const double y = kMarginTop + plot_h - h;
        out << "<rect x=\"" << fmt(x) << "\" y=\"" << fmt(y) << "\" width=\"" << fmt(bar_w)
            << "\" height=\"" << fmt(h) << "\" fill=\""
            << kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))] << "\"/>\n";
        out << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\"" << kHeight - kMarginBottom + 16
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << bars[i].first << "</text>\n";
        out << "<text x=\"" << fmt(x + bar_w / 2) << "\" y=\"" << fmt(y - 6)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << fmt(bars[i].second) << "</text>\n";
    }
    close_svg(out, path);
}

}  // namespace hrs
