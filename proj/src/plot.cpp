#include "polaron/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "polaron/types.hpp"

namespace polaron {

namespace {

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#17becf"};
constexpr double kPanelW = 420.0, kPanelH = 300.0;
constexpr double kLeft = 70.0, kRight = 20.0, kTop = 36.0, kBottom = 48.0;

std::string f2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string g3(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;   // in transformed units

  double tf(double v) const { return log ? std::log10(v) : v; }
  bool usable(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void fit(const std::vector<double>& vals) {
    lo = INFINITY;
    hi = -INFINITY;
    for (double v : vals) {
      lo = std::min(lo, tf(v));
      hi = std::max(hi, tf(v));
    }
    if (hi - lo < 1e-12) {
      const double pad = log ? 0.5 : std::max(1e-12, 0.1 * std::abs(lo));
      lo -= pad;
      hi += pad;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }

  std::vector<double> ticks() const {
    std::vector<double> out;
    if (log) {
      for (double e = std::ceil(lo); e <= hi; e += 1.0) out.push_back(e);
      if (out.size() >= 2) return out;
      out.clear();
    }
    for (int i = 0; i <= 4; ++i) out.push_back(lo + (hi - lo) * (0.05 + 0.9 * i / 4.0));
    return out;
  }

  std::string label(double t) const { return g3(log ? std::pow(10.0, t) : t); }
};

class Panel {
 public:
  Panel(std::ostringstream& os, double ox, double oy) : os_(os), ox_(ox), oy_(oy) {}

  double px(const Axis& a, double v) const {
    return ox_ + kLeft + (a.tf(v) - a.lo) / (a.hi - a.lo) * (kPanelW - kLeft - kRight);
  }
  double py(const Axis& a, double v) const {
    return oy_ + kPanelH - kBottom - (a.tf(v) - a.lo) / (a.hi - a.lo) * (kPanelH - kTop - kBottom);
  }

  void frame(const std::string& title, const std::string& xl, const std::string& yl, const Axis& ax, const Axis& ay) {
    const double x0 = ox_ + kLeft, x1 = ox_ + kPanelW - kRight;
    const double y0 = oy_ + kTop, y1 = oy_ + kPanelH - kBottom;
    os_ << "<rect x=\"" << f2(x0) << "\" y=\"" << f2(y0) << "\" width=\"" << f2(x1 - x0) << "\" height=\""
        << f2(y1 - y0) << "\" fill=\"none\" stroke=\"#333\" stroke-width=\"1\"/>\n";
    for (double t : ax.ticks()) {
      const double x = x0 + (t - ax.lo) / (ax.hi - ax.lo) * (x1 - x0);
      os_ << "<line x1=\"" << f2(x) << "\" y1=\"" << f2(y1) << "\" x2=\"" << f2(x) << "\" y2=\"" << f2(y1 + 4)
          << "\" stroke=\"#333\"/>\n";
      os_ << "<text x=\"" << f2(x) << "\" y=\"" << f2(y1 + 16) << "\" text-anchor=\"middle\">" << ax.label(t)
          << "</text>\n";
    }
    for (double t : ay.ticks()) {
      const double y = y1 - (t - ay.lo) / (ay.hi - ay.lo) * (y1 - y0);
      os_ << "<line x1=\"" << f2(x0 - 4) << "\" y1=\"" << f2(y) << "\" x2=\"" << f2(x0) << "\" y2=\"" << f2(y)
          << "\" stroke=\"#333\"/>\n";
      os_ << "<text x=\"" << f2(x0 - 6) << "\" y=\"" << f2(y + 4) << "\" text-anchor=\"end\">" << ay.label(t)
          << "</text>\n";
    }
    os_ << "<text x=\"" << f2((x0 + x1) / 2) << "\" y=\"" << f2(oy_ + 22) << "\" text-anchor=\"middle\" "
        << "font-weight=\"bold\">" << escape(title) << "</text>\n";
    os_ << "<text x=\"" << f2((x0 + x1) / 2) << "\" y=\"" << f2(oy_ + kPanelH - 10)
        << "\" text-anchor=\"middle\">" << escape(xl) << "</text>\n";
    const double yc = (y0 + y1) / 2, xc = ox_ + 14;
    os_ << "<text x=\"" << f2(xc) << "\" y=\"" << f2(yc) << "\" text-anchor=\"middle\" transform=\"rotate(-90 "
        << f2(xc) << ' ' << f2(yc) << ")\">" << escape(yl) << "</text>\n";
  }

  void polyline(const std::vector<std::pair<double, double>>& pts, const char* color, bool dashed = false) {
    if (pts.empty()) return;
    os_ << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\""
        << (dashed ? " stroke-dasharray=\"5,3\"" : "") << " points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) os_ << (i ? " " : "") << f2(pts[i].first) << ',' << f2(pts[i].second);
    os_ << "\"/>\n";
  }

  void markers(const std::vector<std::pair<double, double>>& pts, const char* color) {
    for (const auto& [x, y] : pts) {
      os_ << "<circle cx=\"" << f2(x) << "\" cy=\"" << f2(y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    }
  }

  void text(double x, double y, const std::string& s, const char* color, const char* anchor = "start") {
    os_ << "<text x=\"" << f2(ox_ + x) << "\" y=\"" << f2(oy_ + y) << "\" fill=\"" << color << "\" text-anchor=\""
        << anchor << "\">" << escape(s) << "</text>\n";
  }

 private:
  std::ostringstream& os_;
  double ox_, oy_;
};

void header(std::ostringstream& os, double w, double h) {
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(w) << "\" height=\"" << f2(h)
     << "\" viewBox=\"0 0 " << f2(w) << ' ' << f2(h) << "\" font-family=\"sans-serif\" font-size=\"11\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

}  // namespace

std::string render_lines(const PlotSpec& spec, const std::vector<Series>& series) {
  Axis ax{spec.log_x}, ay{spec.log_y};
  std::vector<double> xs, ys;
  for (const auto& s : series) {
    if (s.x.size() != s.y.size()) throw BasisMismatch("series '" + s.name + "' has mismatched x and y");
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (ax.usable(s.x[i]) && ay.usable(s.y[i])) {
        xs.push_back(s.x[i]);
        ys.push_back(s.y[i]);
      }
    }
  }
  if (xs.empty()) throw ConfigError("nothing to plot: no finite data points");
  ax.fit(xs);
  ay.fit(ys);
  std::ostringstream os;
  header(os, kPanelW + 160.0, kPanelH);
  Panel p(os, 0.0, 0.0);
  p.frame(spec.title, spec.xlabel, spec.ylabel, ax, ay);
  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kPalette[k % std::size(kPalette)];
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < series[k].x.size(); ++i) {
      const double x = series[k].x[i], y = series[k].y[i];
      if (ax.usable(x) && ay.usable(y)) pts.emplace_back(p.px(ax, x), p.py(ay, y));
    }
    p.polyline(pts, color);
    if (pts.size() <= 12) p.markers(pts, color);
    p.text(kPanelW + 6.0, kTop + 14.0 * static_cast<double>(k + 1), series[k].name, color);
  }
  os << "</svg>\n";
  return os.str();
}

LogLogFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size()) throw BasisMismatch("fit inputs have different lengths");
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  LogLogFit f;
  f.points = lx.size();
  if (lx.size() < 3) return f;
  const double n = static_cast<double>(lx.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    mx += lx[i] / n;
    my += ly[i] / n;
  }
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < lx.size(); ++i) {
    sxy += (lx[i] - mx) * (ly[i] - my);
    sxx += (lx[i] - mx) * (lx[i] - mx);
  }
  if (sxx <= 0.0) return f;
  f.fitted = true;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  for (std::size_t i = 0; i < lx.size(); ++i) f.residuals.push_back(ly[i] - (f.intercept + f.slope * lx[i]));
  return f;
}

std::string render_scaling(const std::string& title, const std::vector<ScalingPanel>& panels) {
  if (panels.empty()) throw ConfigError("nothing to plot: no scaling panels");
  const std::size_t cols = std::min<std::size_t>(2, panels.size());
  const std::size_t rows = (panels.size() + cols - 1) / cols;
  std::ostringstream os;
  header(os, kPanelW * static_cast<double>(cols), kPanelH * static_cast<double>(rows) + 30.0);
  os << "<text x=\"" << f2(kPanelW * static_cast<double>(cols) / 2) << "\" y=\"20\" text-anchor=\"middle\" "
     << "font-size=\"14\" font-weight=\"bold\">" << escape(title) << "</text>\n";
  for (std::size_t k = 0; k < panels.size(); ++k) {
    const ScalingPanel& sp = panels[k];
    Axis ax{true}, ay{true};
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < sp.alpha.size(); ++i) {
      if (ax.usable(sp.alpha[i]) && ay.usable(sp.value[i])) {
        xs.push_back(sp.alpha[i]);
        ys.push_back(sp.value[i]);
      }
    }
    Panel p(os, kPanelW * static_cast<double>(k % cols), 30.0 + kPanelH * static_cast<double>(k / cols));
    if (xs.empty()) {
      p.text(kPanelW / 2, kPanelH / 2, sp.name + ": no positive data", "#333", "middle");
      continue;
    }
    ax.fit(xs);
    ay.fit(ys);
    p.frame(sp.name, "alpha", sp.name, ax, ay);
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < xs.size(); ++i) pts.emplace_back(p.px(ax, xs[i]), p.py(ay, ys[i]));
    p.markers(pts, kPalette[0]);
    if (sp.fit.fitted) {
      const double a0 = *std::min_element(xs.begin(), xs.end()), a1 = *std::max_element(xs.begin(), xs.end());
      auto line = [&](double a) { return std::exp(sp.fit.intercept + sp.fit.slope * std::log(a)); };
      std::vector<std::pair<double, double>> fitted;
      for (double a : {a0, a1}) {
        const double v = line(a);
        if (ay.usable(v)) fitted.emplace_back(p.px(ax, a), p.py(ay, v));
      }
      p.polyline(fitted, kPalette[1], true);
      char buf[64];
      std::snprintf(buf, sizeof buf, "slope = %.3f", sp.fit.slope);
      p.text(kPanelW - kRight - 8, kTop + 16, buf, kPalette[1], "end");
    } else {
      p.text(kPanelW - kRight - 8, kTop + 16, "no fit (< 3 points)", "#333", "end");
    }
  }
  os << "</svg>\n";
  return os.str();
}

}  // namespace polaron
