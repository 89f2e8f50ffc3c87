#include "ase/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <limits>

namespace ase {

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 150.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                    "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string fmt(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 2);
    return {buf, res.ptr};
}

std::string tick_label(double v) {
    // Snap accumulated tick positions so labels stay short.
    const double snapped = std::round(v * 1e6) / 1e6;
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), snapped == 0.0 ? 0.0 : snapped);
    return {buf, res.ptr};
}

std::string escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '&': out += "&amp;"; break;
            case '"': out += "&quot;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

double nice_step(double span, int target) {
    const double raw = span / target;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        if (m * mag >= raw) {
            return m * mag;
        }
    }
    return 10.0 * mag;
}

}  // namespace

std::string render_svg(const LinePlot& plot, std::size_t max_points) {
    double y_min = std::numeric_limits<double>::infinity();
    double y_max = -std::numeric_limits<double>::infinity();
    std::size_t n_max = 1;
    for (const auto& s : plot.series) {
        n_max = std::max(n_max, s.y.size());
        for (double v : s.y) {
            if (std::isfinite(v)) {
                y_min = std::min(y_min, v);
                y_max = std::max(y_max, v);
            }
        }
    }
    if (!std::isfinite(y_min)) {
        y_min = 0.0;
        y_max = 1.0;
    }
    if (y_max - y_min < 1e-12) {
        y_min -= 1.0;
        y_max += 1.0;
    }
    const double x_min = plot.x0;
    const double x_max = plot.x0 + plot.dx * static_cast<double>(n_max - 1);
    const double x_span = x_max > x_min ? x_max - x_min : 1.0;
    const double plot_w = kWidth - kLeft - kRight;
    const double plot_h = kHeight - kTop - kBottom;
    auto px = [&](double x) { return kLeft + (x - x_min) / x_span * plot_w; };
    auto py = [&](double y) { return kTop + (y_max - y) / (y_max - y_min) * plot_h; };

    std::string svg;
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(kWidth) + "\" height=\"" +
           fmt(kHeight) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + fmt(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" +
           escape(plot.title) + "</text>\n";

    const double ys = nice_step(y_max - y_min, 6);
    for (double t = std::ceil(y_min / ys) * ys; t <= y_max + 1e-9; t += ys) {
        svg += "<line x1=\"" + fmt(kLeft) + "\" x2=\"" + fmt(kLeft + plot_w) + "\" y1=\"" + fmt(py(t)) +
               "\" y2=\"" + fmt(py(t)) + "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + fmt(kLeft - 6) + "\" y=\"" + fmt(py(t) + 4) + "\" text-anchor=\"end\">" +
               tick_label(t) + "</text>\n";
    }
    const double xs = nice_step(x_span, 6);
    for (double t = std::ceil(x_min / xs) * xs; t <= x_max + 1e-9; t += xs) {
        svg += "<line x1=\"" + fmt(px(t)) + "\" x2=\"" + fmt(px(t)) + "\" y1=\"" + fmt(kTop) +
               "\" y2=\"" + fmt(kTop + plot_h) + "\" stroke=\"#e0e0e0\"/>\n";
        svg += "<text x=\"" + fmt(px(t)) + "\" y=\"" + fmt(kTop + plot_h + 18) +
               "\" text-anchor=\"middle\">" + tick_label(t) + "</text>\n";
    }
    svg += "<rect x=\"" + fmt(kLeft) + "\" y=\"" + fmt(kTop) + "\" width=\"" + fmt(plot_w) +
           "\" height=\"" + fmt(plot_h) + "\" fill=\"none\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(kLeft + plot_w / 2) + "\" y=\"" + fmt(kHeight - 10) +
           "\" text-anchor=\"middle\">" + escape(plot.x_label) + "</text>\n";
    svg += "<text transform=\"translate(18," + fmt(kTop + plot_h / 2) +
           ") rotate(-90)\" text-anchor=\"middle\">" + escape(plot.y_label) + "</text>\n";

    for (std::size_t si = 0; si < plot.series.size(); ++si) {
        const auto& s = plot.series[si];
        const char* colour = kPalette[si % std::size(kPalette)];
        const std::size_t stride = std::max<std::size_t>(1, (s.y.size() + max_points - 1) / max_points);
        std::string points;
        for (std::size_t i = 0; i < s.y.size(); i += stride) {
            if (!std::isfinite(s.y[i])) {
                continue;
            }
            points += fmt(px(plot.x0 + plot.dx * static_cast<double>(i))) + "," + fmt(py(s.y[i])) + " ";
        }
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(colour) +
               "\" stroke-width=\"1.2\" points=\"" + points + "\"/>\n";
        const double ly = kTop + 14.0 + 18.0 * static_cast<double>(si);
        svg += "<line x1=\"" + fmt(kWidth - kRight + 12) + "\" x2=\"" + fmt(kWidth - kRight + 32) +
               "\" y1=\"" + fmt(ly) + "\" y2=\"" + fmt(ly) + "\" stroke=\"" + colour +
               "\" stroke-width=\"2\"/>\n";
        svg += "<text x=\"" + fmt(kWidth - kRight + 38) + "\" y=\"" + fmt(ly + 4) + "\">" +
               escape(s.name) + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace ase
