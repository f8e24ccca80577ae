#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mlsg {

struct SvgSeries {
    std::string label;
    std::vector<double> x, y;
};

/// Minimal deterministic line-plot writer: fixed canvas, fixed palette,
/// axis ticks at the data extremes, legend from series labels. Output is a
/// pure function of the inputs (snapshot-testable).
void write_line_plot_svg(std::ostream& os, const std::string& title,
                         const std::string& x_label, const std::string& y_label,
                         const std::vector<SvgSeries>& series);

} // namespace mlsg
