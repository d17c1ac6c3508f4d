#pragma once

#include <string>
#include <vector>

namespace idf::svg {

struct Series {
    std::string label;
    std::string color = "#000000";
    bool dashed = false;
    std::vector<std::pair<double, double>> points;
};

// Minimal polyline chart: axes, tick labels, one <path> per series.
void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series);

// Overlaid step histograms (used for HD distributions).
void write_histogram(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::vector<Series>& prebinned);

}  // namespace idf::svg
