#include "idf/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "idf/errors.hpp"

namespace idf::svg {

namespace {

constexpr int kW = 640, kH = 420;
constexpr int kMarginL = 60, kMarginR = 20, kMarginT = 40, kMarginB = 50;

struct Range {
    double lo = 0, hi = 1;
    double map(double v, double px_lo, double px_hi) const {
        double t = hi > lo ? (v - lo) / (hi - lo) : 0.5;
        return px_lo + t * (px_hi - px_lo);
    }
};

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

void chart_frame(std::ofstream& f, const std::string& title, const std::string& x_label,
                 const std::string& y_label, const Range& xr, const Range& yr) {
    f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
      << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
    f << "<rect width=\"" << kW << "\" height=\"" << kH << "\" fill=\"white\"/>\n";
    f << "<text x=\"" << kW / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << title
      << "</text>\n";
    // axes
    f << "<line x1=\"" << kMarginL << "\" y1=\"" << kH - kMarginB << "\" x2=\"" << kW - kMarginR
      << "\" y2=\"" << kH - kMarginB << "\" stroke=\"black\"/>\n";
    f << "<line x1=\"" << kMarginL << "\" y1=\"" << kMarginT << "\" x2=\"" << kMarginL << "\" y2=\""
      << kH - kMarginB << "\" stroke=\"black\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        double xv = xr.lo + (xr.hi - xr.lo) * i / 4.0;
        double yv = yr.lo + (yr.hi - yr.lo) * i / 4.0;
        double xp = xr.map(xv, kMarginL, kW - kMarginR);
        double yp = yr.map(yv, kH - kMarginB, kMarginT);
        f << "<line x1=\"" << xp << "\" y1=\"" << kH - kMarginB << "\" x2=\"" << xp << "\" y2=\""
          << kH - kMarginB + 5 << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << xp << "\" y=\"" << kH - kMarginB + 20
          << "\" text-anchor=\"middle\" font-size=\"11\">" << fmt(xv) << "</text>\n";
        f << "<line x1=\"" << kMarginL - 5 << "\" y1=\"" << yp << "\" x2=\"" << kMarginL
          << "\" y2=\"" << yp << "\" stroke=\"black\"/>\n";
        f << "<text x=\"" << kMarginL - 8 << "\" y=\"" << yp + 4
          << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(yv) << "</text>\n";
    }
    f << "<text x=\"" << (kMarginL + kW - kMarginR) / 2 << "\" y=\"" << kH - 12
      << "\" text-anchor=\"middle\" font-size=\"13\">" << x_label << "</text>\n";
    f << "<text x=\"16\" y=\"" << (kMarginT + kH - kMarginB) / 2
      << "\" text-anchor=\"middle\" font-size=\"13\" transform=\"rotate(-90 16 "
      << (kMarginT + kH - kMarginB) / 2 << ")\">" << y_label << "</text>\n";
}

}  // namespace

void write_line_chart(const std::string& path, const std::string& title,
                      const std::string& x_label, const std::string& y_label,
                      const std::vector<Series>& series) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("svg: cannot open " + path);

    Range xr{std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    Range yr = xr;
    for (const auto& s : series) {
        for (auto [x, y] : s.points) {
            xr.lo = std::min(xr.lo, x);
            xr.hi = std::max(xr.hi, x);
            yr.lo = std::min(yr.lo, y);
            yr.hi = std::max(yr.hi, y);
        }
    }
    if (!(xr.lo < xr.hi)) {
        xr.lo -= 0.5;
        xr.hi += 0.5;
    }
    if (!(yr.lo < yr.hi)) {
        yr.lo -= 0.5;
        yr.hi += 0.5;
    }

    chart_frame(f, title, x_label, y_label, xr, yr);
    int legend_y = kMarginT + 8;
    for (const auto& s : series) {
        if (s.points.empty()) continue;
        f << "<path fill=\"none\" stroke=\"" << s.color << "\"";
        if (s.dashed) f << " stroke-dasharray=\"5,4\"";
        f << " d=\"";
        for (size_t i = 0; i < s.points.size(); ++i) {
            double xp = xr.map(s.points[i].first, kMarginL, kW - kMarginR);
            double yp = yr.map(s.points[i].second, kH - kMarginB, kMarginT);
            f << (i == 0 ? "M" : "L") << fmt(xp) << " " << fmt(yp) << " ";
        }
        f << "\"/>\n";
        if (!s.label.empty()) {
            f << "<text x=\"" << kW - kMarginR - 4 << "\" y=\"" << legend_y
              << "\" text-anchor=\"end\" font-size=\"11\" fill=\"" << s.color << "\">" << s.label
              << "</text>\n";
            legend_y += 14;
        }
    }
    f << "</svg>\n";
}

void write_histogram(const std::string& path, const std::string& title,
                     const std::string& x_label, const std::vector<Series>& prebinned) {
    write_line_chart(path, title, x_label, "count", prebinned);
}

}  // namespace idf::svg
