#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hybridpn/sweep.hpp"

namespace hybridpn {

// Plot kinds are the sweep axes: "N" (plotted against N+1), "dt", "eps", "sigma".
const std::vector<std::string>& plot_kinds();
// The axis with the most distinct values; ties go to the earlier kind.
std::string default_plot_kind(const std::vector<SweepRow>& rows);

// Log-log error vs the axis, one series per (solver, other axes), bound overlay dashed.
// Throws ConfigError on an empty row set or unknown kind.
void write_plot_svg(const std::vector<SweepRow>& rows, const std::string& kind, std::ostream& out);
void write_plot_table(const std::vector<SweepRow>& rows, const std::string& kind, std::ostream& out);

}  // namespace hybridpn
