#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "surprise/io/csv.hpp"
#include "surprise/stats/descriptive.hpp"

namespace surprise::io {

struct ChartFrame {
    std::string title;
    std::string x_label;
    std::string y_label;
    double width = 640;
    double height = 400;
};

namespace detail {

struct Canvas {
    ChartFrame frame;
    double x_min, x_max, y_min, y_max;
    static constexpr double left = 70, right = 20, top = 40, bottom = 50;

    double px(double x) const {
        const double span = x_max > x_min ? x_max - x_min : 1.0;
        return left + (x - x_min) / span * (frame.width - left - right);
    }
    double py(double y) const {
        const double span = y_max > y_min ? y_max - y_min : 1.0;
        return frame.height - bottom - (y - y_min) / span * (frame.height - top - bottom);
    }
};

inline std::string escape(const std::string& s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

inline std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return buf;
}

inline void open(std::ostream& out, const Canvas& c) {
    const auto& f = c.frame;
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(f.width) << "\" height=\"" << num(f.height)
        << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    out << "<text x=\"" << num(f.width / 2) << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">"
        << escape(f.title) << "</text>\n";
    const double x0 = c.left, x1 = f.width - c.right, y0 = f.height - c.bottom, y1 = c.top;
    out << "<path d=\"M" << num(x0) << ',' << num(y1) << " L" << num(x0) << ',' << num(y0) << " L" << num(x1) << ','
        << num(y0) << "\" stroke=\"black\" fill=\"none\"/>\n";
    for (int i = 0; i <= 4; ++i) {
        const double v = c.y_min + (c.y_max - c.y_min) * i / 4.0;
        out << "<text x=\"" << num(x0 - 6) << "\" y=\"" << num(c.py(v) + 4) << "\" text-anchor=\"end\">"
            << escape(format_double(std::round(v * 1000) / 1000)) << "</text>\n";
    }
    out << "<text x=\"" << num((x0 + x1) / 2) << "\" y=\"" << num(f.height - 12) << "\" text-anchor=\"middle\">"
        << escape(f.x_label) << "</text>\n";
    out << "<text x=\"16\" y=\"" << num((y0 + y1) / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << num((y0 + y1) / 2) << ")\">" << escape(f.y_label) << "</text>\n";
}

} // namespace detail

/// Line over bins 1..n with an optional shaded confidence band.
inline void line_chart(std::ostream& out, const ChartFrame& frame, const std::vector<double>& y,
                       const std::vector<stats::Interval>& band = {}) {
    double lo = *std::min_element(y.begin(), y.end());
    double hi = *std::max_element(y.begin(), y.end());
    for (const auto& iv : band) {
        lo = std::min(lo, iv.lo);
        hi = std::max(hi, iv.hi);
    }
    if (hi == lo) hi = lo + 1.0;
    const detail::Canvas c{frame, 1.0, static_cast<double>(std::max<std::size_t>(y.size(), 2)), lo, hi};
    detail::open(out, c);
    if (band.size() == y.size() && !band.empty()) {
        out << "<path d=\"";
        for (std::size_t i = 0; i < band.size(); ++i) {
            out << (i ? " L" : "M") << detail::num(c.px(i + 1.0)) << ',' << detail::num(c.py(band[i].hi));
        }
        for (std::size_t i = band.size(); i-- > 0;) {
            out << " L" << detail::num(c.px(i + 1.0)) << ',' << detail::num(c.py(band[i].lo));
        }
        out << " Z\" fill=\"#9ecae1\" fill-opacity=\"0.5\" stroke=\"none\"/>\n";
    }
    out << "<polyline fill=\"none\" stroke=\"#08519c\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < y.size(); ++i) {
        out << (i ? " " : "") << detail::num(c.px(i + 1.0)) << ',' << detail::num(c.py(y[i]));
    }
    out << "\"/>\n";
    for (std::size_t i = 0; i < y.size(); ++i) {
        out << "<text x=\"" << detail::num(c.px(i + 1.0)) << "\" y=\"" << detail::num(frame.height - 32)
            << "\" text-anchor=\"middle\">" << i + 1 << "</text>\n";
    }
    out << "</svg>\n";
}

/// One box per group: quartiles, median, and whiskers at the extremes.
inline void box_chart(std::ostream& out, const ChartFrame& frame, const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& groups) {
    double lo = 0.0, hi = 1.0;
    bool first = true;
    for (const auto& g : groups) {
        for (const double v : g) {
            lo = first ? v : std::min(lo, v);
            hi = first ? v : std::max(hi, v);
            first = false;
        }
    }
    if (hi == lo) hi = lo + 1.0;
    const detail::Canvas c{frame, 0.0, static_cast<double>(groups.size()), lo, hi};
    detail::open(out, c);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        const double cx = c.px(g + 0.5);
        const double half = 0.3 * (c.px(1.0) - c.px(0.0));
        if (!groups[g].empty()) {
            auto sorted = groups[g];
            std::sort(sorted.begin(), sorted.end());
            const double q1 = stats::quantile_sorted(sorted, 0.25);
            const double q2 = stats::quantile_sorted(sorted, 0.5);
            const double q3 = stats::quantile_sorted(sorted, 0.75);
            out << "<line x1=\"" << detail::num(cx) << "\" x2=\"" << detail::num(cx) << "\" y1=\""
                << detail::num(c.py(sorted.front())) << "\" y2=\"" << detail::num(c.py(sorted.back()))
                << "\" stroke=\"black\"/>\n";
            out << "<rect x=\"" << detail::num(cx - half) << "\" y=\"" << detail::num(c.py(q3)) << "\" width=\""
                << detail::num(2 * half) << "\" height=\"" << detail::num(c.py(q1) - c.py(q3))
                << "\" fill=\"#fdae6b\" stroke=\"black\"/>\n";
            out << "<line x1=\"" << detail::num(cx - half) << "\" x2=\"" << detail::num(cx + half) << "\" y1=\""
                << detail::num(c.py(q2)) << "\" y2=\"" << detail::num(c.py(q2)) << "\" stroke=\"black\" stroke-width=\"2\"/>\n";
        }
        out << "<text x=\"" << detail::num(cx) << "\" y=\"" << detail::num(frame.height - 32)
            << "\" text-anchor=\"middle\">" << detail::escape(g < names.size() ? names[g] : std::string()) << "</text>\n";
    }
    out << "</svg>\n";
}

} // namespace surprise::io
