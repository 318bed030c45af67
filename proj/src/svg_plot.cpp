#include "ltmpc/svg_plot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace ltmpc {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kMarginLeft = 70.0;
constexpr double kMarginRight = 160.0;  // legend space
constexpr double kMarginTop = 40.0;
constexpr double kMarginBottom = 50.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                         "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string fmt(double v) {
    std::ostringstream os;
    os.precision(8);
    os << v;
    return os.str();
}

// round to a pleasant tick spacing
double nice_step(double span) {
    const double raw = span / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    const double step = norm < 1.5 ? 1.0 : norm < 3.5 ? 2.0 : norm < 7.5 ? 5.0 : 10.0;
    return step * mag;
}

}  // namespace

SvgPlot::SvgPlot(std::string title, std::string x_label, std::string y_label)
    : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

void SvgPlot::add_line(const std::string& name, const std::vector<double>& x,
                       const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("svg series size mismatch");
    series_.push_back({name, x, y, false});
}

void SvgPlot::add_scatter(const std::string& name, const std::vector<double>& x,
                          const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("svg series size mismatch");
    series_.push_back({name, x, y, true});
}

void SvgPlot::add_ellipse(double cx, double cy, double rx, double ry, const std::string& label) {
    ellipses_.push_back({cx, cy, rx, ry, label});
}

std::string SvgPlot::render() const {
    constexpr double inf = std::numeric_limits<double>::infinity();
    double xmin = inf, xmax = -inf, ymin = inf, ymax = -inf;
    auto widen = [&](double x, double y) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    };
    for (const auto& s : series_) {
        for (std::size_t i = 0; i < s.x.size(); ++i) widen(s.x[i], s.y[i]);
    }
    for (const auto& e : ellipses_) {
        widen(e.cx - e.rx, e.cy - e.ry);
        widen(e.cx + e.rx, e.cy + e.ry);
    }
    if (!(xmin <= xmax)) {
        xmin = 0.0;
        xmax = 1.0;
        ymin = 0.0;
        ymax = 1.0;
    }
    if (xmax - xmin < 1e-12) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (ymax - ymin < 1e-12) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double x_margin = 0.05 * (xmax - xmin);
    const double y_margin = 0.05 * (ymax - ymin);
    const double x0 = xmin - x_margin, x1 = xmax + x_margin;
    const double y0 = ymin - y_margin, y1 = ymax + y_margin;

    const double pw = kWidth - kMarginLeft - kMarginRight;
    const double ph = kHeight - kMarginTop - kMarginBottom;
    auto px = [&](double x) { return kMarginLeft + (x - x0) / (x1 - x0) * pw; };
    auto py = [&](double y) { return kMarginTop + ph - (y - y0) / (y1 - y0) * ph; };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\""
       << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<g data-xmin=\"" << fmt(x0) << "\" data-xmax=\"" << fmt(x1) << "\" data-ymin=\""
       << fmt(y0) << "\" data-ymax=\"" << fmt(y1) << "\">\n";
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\"" << pw
       << "\" height=\"" << ph << "\" fill=\"none\" stroke=\"#333\"/>\n";
    os << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
       << title_ << "</text>\n";
    os << "<text x=\"" << kMarginLeft + pw / 2 << "\" y=\"" << kHeight - 12
       << "\" text-anchor=\"middle\" font-size=\"12\">" << x_label_ << "</text>\n";
    os << "<text x=\"16\" y=\"" << kMarginTop + ph / 2
       << "\" text-anchor=\"middle\" font-size=\"12\" transform=\"rotate(-90 16 "
       << kMarginTop + ph / 2 << ")\">" << y_label_ << "</text>\n";

    const double xstep = nice_step(x1 - x0);
    for (double t = std::ceil(x0 / xstep) * xstep; t <= x1 + 1e-12; t += xstep) {
        os << "<line x1=\"" << px(t) << "\" y1=\"" << kMarginTop + ph << "\" x2=\"" << px(t)
           << "\" y2=\"" << kMarginTop + ph + 5 << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << px(t) << "\" y=\"" << kMarginTop + ph + 18
           << "\" text-anchor=\"middle\" font-size=\"10\">" << fmt(t) << "</text>\n";
    }
    const double ystep = nice_step(y1 - y0);
    for (double t = std::ceil(y0 / ystep) * ystep; t <= y1 + 1e-12; t += ystep) {
        os << "<line x1=\"" << kMarginLeft - 5 << "\" y1=\"" << py(t) << "\" x2=\"" << kMarginLeft
           << "\" y2=\"" << py(t) << "\" stroke=\"#333\"/>\n";
        os << "<text x=\"" << kMarginLeft - 8 << "\" y=\"" << py(t) + 3
           << "\" text-anchor=\"end\" font-size=\"10\">" << fmt(t) << "</text>\n";
    }

    for (const auto& e : ellipses_) {
        os << "<ellipse cx=\"" << px(e.cx) << "\" cy=\"" << py(e.cy) << "\" rx=\""
           << (px(e.cx + e.rx) - px(e.cx)) << "\" ry=\"" << (py(e.cy) - py(e.cy + e.ry))
           << "\" fill=\"#cccccc\" fill-opacity=\"0.5\" stroke=\"#666\"/>\n";
        if (!e.label.empty()) {
            os << "<text x=\"" << px(e.cx) << "\" y=\"" << py(e.cy) + 3
               << "\" text-anchor=\"middle\" font-size=\"9\">" << e.label << "</text>\n";
        }
    }

    int ci = 0;
    for (const auto& s : series_) {
        const char* color = kColors[ci % 8];
        if (s.scatter) {
            os << "<g fill=\"" << color << "\" data-series=\"" << s.name << "\">\n";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                os << "<circle cx=\"" << px(s.x[i]) << "\" cy=\"" << py(s.y[i])
                   << "\" r=\"2\"/>\n";
            }
            os << "</g>\n";
        } else {
            os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" "
               << "data-series=\"" << s.name << "\" points=\"";
            for (std::size_t i = 0; i < s.x.size(); ++i) {
                os << px(s.x[i]) << ',' << py(s.y[i]) << ' ';
            }
            os << "\"/>\n";
        }
        const double ly = kMarginTop + 16.0 * ci;
        os << "<rect x=\"" << kWidth - kMarginRight + 12 << "\" y=\"" << ly << "\" width=\"14\" "
           << "height=\"4\" fill=\"" << color << "\"/>\n";
        os << "<text x=\"" << kWidth - kMarginRight + 30 << "\" y=\"" << ly + 6
           << "\" font-size=\"11\">" << s.name << "</text>\n";
        ++ci;
    }
    os << "</g>\n</svg>\n";
    return os.str();
}

void SvgPlot::write_file(const std::string& path) const {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << render();
}

}  // namespace ltmpc
