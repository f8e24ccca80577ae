#include "mlsg/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace mlsg {

namespace {

constexpr int kWidth = 640;
constexpr int kHeight = 420;
constexpr int kMarginLeft = 70;
constexpr int kMarginRight = 140; // legend gutter
constexpr int kMarginTop = 40;
constexpr int kMarginBottom = 50;

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#ff7f0e", "#8c564b", "#17becf", "#7f7f7f"};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

} // namespace

void write_line_plot_svg(std::ostream& os, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<SvgSeries>& series) {
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    for (const auto& s : series) {
        for (double v : s.x) {
            xmin = std::min(xmin, v);
            xmax = std::max(xmax, v);
        }
        for (double v : s.y) {
            ymin = std::min(ymin, v);
            ymax = std::max(ymax, v);
        }
    }
    if (!(xmin < xmax)) {
        xmin -= 0.5;
        xmax += 0.5;
    }
    if (!(ymin < ymax)) {
        ymin -= 0.5;
        ymax += 0.5;
    }
    const double plot_w = kWidth - kMarginLeft - kMarginRight;
    const double plot_h = kHeight - kMarginTop - kMarginBottom;
    const auto px = [&](double x) {
        return kMarginLeft + (x - xmin) / (xmax - xmin) * plot_w;
    };
    const auto py = [&](double y) {
        return kMarginTop + (ymax - y) / (ymax - ymin) * plot_h;
    };

    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth
       << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << ' '
       << kHeight << "\">\n";
    os << "<rect width=\"" << kWidth << "\" height=\"" << kHeight
       << "\" fill=\"white\"/>\n";
    os << "<text x=\"" << kMarginLeft << "\" y=\"24\" font-family=\"monospace\" "
          "font-size=\"16\">"
       << title << "</text>\n";

    // axes
    os << "<rect x=\"" << kMarginLeft << "\" y=\"" << kMarginTop << "\" width=\""
       << num(plot_w) << "\" height=\"" << num(plot_h)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << kMarginLeft + plot_w / 2 << "\" y=\"" << kHeight - 14
       << "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\">"
       << x_label << "</text>\n";
    os << "<text x=\"16\" y=\"" << kMarginTop + plot_h / 2
       << "\" font-family=\"monospace\" font-size=\"13\" text-anchor=\"middle\" "
          "transform=\"rotate(-90 16 "
       << kMarginTop + plot_h / 2 << ")\">" << y_label << "</text>\n";

    // extreme tick labels
    os << "<text x=\"" << kMarginLeft << "\" y=\"" << kHeight - kMarginBottom + 16
       << "\" font-family=\"monospace\" font-size=\"11\">" << num(xmin)
       << "</text>\n";
    os << "<text x=\"" << kMarginLeft + plot_w << "\" y=\""
       << kHeight - kMarginBottom + 16
       << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
       << num(xmax) << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + plot_h + 4
       << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
       << num(ymin) << "</text>\n";
    os << "<text x=\"" << kMarginLeft - 6 << "\" y=\"" << kMarginTop + 4
       << "\" font-family=\"monospace\" font-size=\"11\" text-anchor=\"end\">"
       << num(ymax) << "</text>\n";

    for (std::size_t si = 0; si < series.size(); ++si) {
        const auto& s = series[si];
        const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
        os << "<polyline fill=\"none\" stroke=\"" << color
           << "\" stroke-width=\"1.5\" points=\"";
        for (std::size_t i = 0; i < s.x.size(); ++i) {
            if (i) os << ' ';
            os << num(px(s.x[i])) << ',' << num(py(s.y[i]));
        }
        os << "\"/>\n";
        const double ly = kMarginTop + 16.0 * (si + 1);
        os << "<line x1=\"" << kWidth - kMarginRight + 10 << "\" y1=\"" << num(ly - 4)
           << "\" x2=\"" << kWidth - kMarginRight + 30 << "\" y2=\"" << num(ly - 4)
           << "\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
        os << "<text x=\"" << kWidth - kMarginRight + 36 << "\" y=\"" << num(ly)
           << "\" font-family=\"monospace\" font-size=\"12\">" << s.label
           << "</text>\n";
    }
    os << "</svg>\n";
}

} // namespace mlsg
