#pragma once

// Deterministic SVG output: identical input gives identical bytes.

#include <string>
#include <vector>

namespace polaron {

struct Series {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct PlotSpec {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool log_x = false;
  bool log_y = false;
};

/// One panel with every series overlaid. Non-finite points (and non-positive
/// ones on log axes) are skipped; throws ConfigError if nothing is left.
std::string render_lines(const PlotSpec& spec, const std::vector<Series>& series);

struct LogLogFit {
  bool fitted = false;        // needs >= 3 usable points
  double slope = 0.0;
  double intercept = 0.0;     // log(y) = intercept + slope log(x)
  std::vector<double> residuals;
  std::size_t points = 0;
};

/// Least-squares line through (log x, log y) over points with x, y > 0.
LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y);

struct ScalingPanel {
  std::string name;
  std::vector<double> alpha;
  std::vector<double> value;
  LogLogFit fit;
};

/// Grid of log-log panels, each with its data, the fitted line and a slope label.
std::string render_scaling(const std::string& title, const std::vector<ScalingPanel>& panels);

}  // namespace polaron
