#ifndef CFSIM_SVG_HPP
#define CFSIM_SVG_HPP

#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cfsim {

struct PlotSeries {
    std::string label;
    std::vector<std::pair<double, double>> points;  // (x, y)
};

struct PlotStyle {
    std::string title;
    std::string x_label = "iteration";
    std::string y_label = "value";
    double width = 960.0;
    double height = 560.0;
};

struct TickSpec {
    double lo = 0.0;
    double hi = 1.0;
    double step = 0.2;
};

// Expands [lo, hi] to round tick bounds; the expanded maximum overshoots the
// data maximum by less than one step (and likewise below the minimum).
inline TickSpec nice_ticks(double lo, double hi) {
    if (!std::isfinite(lo) || !std::isfinite(hi) || hi < lo)
        throw std::invalid_argument("ticks: bounds must be finite and ordered");
    if (hi == lo) {
        lo -= 0.5;
        hi += 0.5;
    }
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = norm <= 1.0 ? 1.0 : norm <= 2.0 ? 2.0 : norm <= 5.0 ? 5.0 : 10.0;
    step *= mag;
    TickSpec t;
    t.step = step;
    t.lo = std::floor(lo / step) * step;
    t.hi = std::ceil(hi / step) * step;
    return t;
}

namespace detail {

inline std::string svg_num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", x);
    return buf;
}

inline std::string svg_label(double x) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

inline std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

inline const char* plot_color(std::size_t i) {
    static const char* palette[6] = {"#1f6fb2", "#d1495b", "#2e8b57",
                                     "#e09f3e", "#7d5ba6", "#3d405b"};
    return palette[i % 6];
}

}  // namespace detail

// Self-contained SVG 1.1 line plot: one polyline per multi-point series, a
// circle marker for single-point series, tick-labeled axes, and a legend.
// Throws when no series carries any point.
inline std::string render_line_plot(const std::vector<PlotSeries>& series,
                                    const PlotStyle& style = PlotStyle{}) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    std::size_t total_points = 0;
    for (const PlotSeries& s : series)
        for (const auto& [x, y] : s.points) {
            if (!std::isfinite(x) || !std::isfinite(y))
                throw std::invalid_argument("plot: points must be finite");
            xmin = std::min(xmin, x);
            xmax = std::max(xmax, x);
            ymin = std::min(ymin, y);
            ymax = std::max(ymax, y);
            ++total_points;
        }
    if (series.empty() || total_points == 0)
        throw std::invalid_argument("plot: no data to draw");

    const TickSpec xt = nice_ticks(xmin, xmax);
    const TickSpec yt = nice_ticks(ymin, ymax);
    const double left = 74.0, right = 178.0, top = 46.0, bottom = 58.0;
    const double w = style.width, h = style.height;
    const double px0 = left, px1 = w - right, py0 = h - bottom, py1 = top;
    auto sx = [&](double x) { return px0 + (x - xt.lo) / (xt.hi - xt.lo) * (px1 - px0); };
    auto sy = [&](double y) { return py0 - (y - yt.lo) / (yt.hi - yt.lo) * (py0 - py1); };

    using detail::svg_label;
    using detail::svg_num;
    using detail::xml_escape;
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << svg_num(w)
        << "\" height=\"" << svg_num(h) << "\" viewBox=\"0 0 " << svg_num(w) << ' ' << svg_num(h)
        << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(w) << "\" height=\"" << svg_num(h)
        << "\" fill=\"#ffffff\"/>\n";
    if (!style.title.empty())
        out << "<text x=\"" << svg_num((px0 + px1) / 2.0)
            << "\" y=\"26\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"17\">"
            << xml_escape(style.title) << "</text>\n";

    const int nx = static_cast<int>(std::lround((xt.hi - xt.lo) / xt.step));
    for (int i = 0; i <= nx; ++i) {
        const double x = xt.lo + xt.step * i;
        const double px = sx(x);
        out << "<line x1=\"" << svg_num(px) << "\" y1=\"" << svg_num(py0) << "\" x2=\""
            << svg_num(px) << "\" y2=\"" << svg_num(py1) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << svg_num(px) << "\" y=\"" << svg_num(py0 + 20.0)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
            << svg_label(x) << "</text>\n";
    }
    const int ny = static_cast<int>(std::lround((yt.hi - yt.lo) / yt.step));
    for (int i = 0; i <= ny; ++i) {
        const double y = yt.lo + yt.step * i;
        const double py = sy(y);
        out << "<line x1=\"" << svg_num(px0) << "\" y1=\"" << svg_num(py) << "\" x2=\""
            << svg_num(px1) << "\" y2=\"" << svg_num(py) << "\" stroke=\"#dddddd\"/>\n";
        out << "<text x=\"" << svg_num(px0 - 8.0) << "\" y=\"" << svg_num(py + 4.0)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\">"
            << svg_label(y) << "</text>\n";
    }
    out << "<line x1=\"" << svg_num(px0) << "\" y1=\"" << svg_num(py0) << "\" x2=\"" << svg_num(px1)
        << "\" y2=\"" << svg_num(py0) << "\" stroke=\"#000000\"/>\n";
    out << "<line x1=\"" << svg_num(px0) << "\" y1=\"" << svg_num(py0) << "\" x2=\"" << svg_num(px0)
        << "\" y2=\"" << svg_num(py1) << "\" stroke=\"#000000\"/>\n";
    out << "<text x=\"" << svg_num((px0 + px1) / 2.0) << "\" y=\"" << svg_num(h - 14.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">"
        << xml_escape(style.x_label) << "</text>\n";
    out << "<text x=\"20\" y=\"" << svg_num((py0 + py1) / 2.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" transform=\"rotate(-90 20 "
        << svg_num((py0 + py1) / 2.0) << ")\">" << xml_escape(style.y_label) << "</text>\n";

    std::size_t drawn = 0;
    for (std::size_t s = 0; s < series.size(); ++s) {
        if (series[s].points.empty()) continue;
        const char* color = detail::plot_color(drawn);
        if (series[s].points.size() == 1) {
            const auto& [x, y] = series[s].points.front();
            out << "<circle cx=\"" << svg_num(sx(x)) << "\" cy=\"" << svg_num(sy(y))
                << "\" r=\"4\" fill=\"" << color << "\"/>\n";
        } else {
            out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
            for (std::size_t p = 0; p < series[s].points.size(); ++p) {
                if (p > 0) out << ' ';
                out << svg_num(sx(series[s].points[p].first)) << ','
                    << svg_num(sy(series[s].points[p].second));
            }
            out << "\"/>\n";
        }
        const double ly = top + 16.0 + 22.0 * static_cast<double>(drawn);
        out << "<rect x=\"" << svg_num(px1 + 14.0) << "\" y=\"" << svg_num(ly - 10.0)
            << "\" width=\"12\" height=\"12\" fill=\"" << color << "\"/>\n";
        out << "<text x=\"" << svg_num(px1 + 32.0) << "\" y=\"" << svg_num(ly)
            << "\" font-family=\"sans-serif\" font-size=\"12\">" << xml_escape(series[s].label)
            << "</text>\n";
        ++drawn;
    }
    out << "</svg>\n";
    return out.str();
}

}  // namespace cfsim

#endif  // CFSIM_SVG_HPP
