#pragma once

#include <string>
#include <vector>

#include "swarmlab/potential.hpp"

namespace swarmlab {

struct SvgOptions {
  int width = 900;
  int height = 480;
  std::string title;
  double y_min = 0.0;  // 0 with y_max 0: fit to the data
  double y_max = 0.0;
};

/// Static line chart of Psi(t, d) against t, one polyline per dimension.
std::string psi_chart_svg(const PotentialTrace& trace, const SvgOptions& opt = {});

/// Psi series as CSV: t,psi_1,...,psi_D.
std::string psi_series_csv(const PotentialTrace& trace);

}  // namespace swarmlab
