#pragma once

#include <span>
#include <string>
#include <vector>

namespace twt::svg {

struct Series {
    std::string label;
    std::span<const double> y;
};

/// Minimal polyline line chart: axes, tick labels, one colored polyline per
/// series. Points are thinned to at most max_points per series.
void write_line_chart(const std::string& path, const std::string& title,
                      std::span<const double> x, const std::vector<Series>& series,
                      int max_points = 2000);

}  // namespace twt::svg
