#pragma once

#include <string>
#include <utility>
#include <vector>

namespace hrs {

struct SvgSeries {
    std::string label;
    std::string color;
    std::vector<double> values;
};

//! Static line chart: one polyline per series over a shared index axis,
//! with a legend and min/max tick labels.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::vector<SvgSeries>& series);

//! Static bar chart with one labelled bar per entry.
void write_bar_chart(const std::string& path, const std::string& title,
                     const std::vector<std::pair<std::string, double>>& bars);

}  // namespace hrs
