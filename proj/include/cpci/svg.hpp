#pragma once

#include <string>
#include <vector>

#include "cpci/report.hpp"

namespace cpci {

// Standalone four-panel SVG (coverage, average length, proportion of sets
// containing zero, average non-zero length — each versus n, one line per
// method).  Pure string output; no display server involved.
std::string plot_panels_svg(const std::vector<AggregateRow>& rows);

}  // namespace cpci
