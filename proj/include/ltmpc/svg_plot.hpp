#pragma once

#include <string>
#include <vector>

namespace ltmpc {

/// Minimal self-contained SVG line/scatter plot writer. Axis ranges cover
/// the data extents with a 5% margin and are recorded as data-* attributes
/// on the plot group for post-checks.
class SvgPlot {
public:
    SvgPlot(std::string title, std::string x_label, std::string y_label);

    void add_line(const std::string& name, const std::vector<double>& x,
                  const std::vector<double>& y);
    void add_scatter(const std::string& name, const std::vector<double>& x,
                     const std::vector<double>& y);

    /// Optional fixed marker (e.g. an obstacle footprint ellipse).
    void add_ellipse(double cx, double cy, double rx, double ry, const std::string& label);

    std::string render() const;
    void write_file(const std::string& path) const;

private:
    struct Series {
        std::string name;
        std::vector<double> x, y;
        bool scatter = false;
    };
    struct Ellipse {
        double cx, cy, rx, ry;
        std::string label;
    };

    std::string title_, x_label_, y_label_;
    std::vector<Series> series_;
    std::vector<Ellipse> ellipses_;
};

}  // namespace ltmpc
