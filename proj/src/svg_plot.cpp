// Minimal SVG plotter for the sweep tables. Output depends only on the table
// contents, so regenerating from a CSV reproduces the same file.

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "bhcav/experiments.hpp"
#include "bhcav/text_format.hpp"

namespace bhcav::experiments {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

struct Panel {
  double left, top, width, height;
  double xmin, xmax, ymin, ymax;
  bool logx = false, logy = false;

  double tx(double v) const { return logx ? std::log10(v) : v; }
  double ty(double v) const { return logy ? std::log10(v) : v; }
  double px(double x) const {
    return left + width * (tx(x) - tx(xmin)) / (tx(xmax) - tx(xmin));
  }
  double py(double y) const {
    return top + height * (1.0 - (ty(y) - ty(ymin)) / (ty(ymax) - ty(ymin)));
  }
  bool inside_x(double x) const { return x >= xmin && x <= xmax && (!logx || x > 0); }
  bool inside_y(double y) const { return y >= ymin && y <= ymax && (!logy || y > 0); }
};

void range_with_margin(double lo, double hi, bool log, double& out_lo, double& out_hi) {
  if (!(lo <= hi)) {
    lo = log ? 1e-12 : 0.0;
    hi = log ? 1.0 : 1.0;
  }
  if (log) {
    double a = std::floor(std::log10(lo));
    double b = std::ceil(std::log10(hi));
    if (b <= a) b = a + 1;
    out_lo = std::pow(10.0, a);
    out_hi = std::pow(10.0, b);
    return;
  }
  double span = hi - lo;
  if (span <= 0) span = std::max(std::abs(hi), 1.0) * 0.1;
  out_lo = lo - 0.05 * span;
  out_hi = hi + 0.05 * span;
}

std::vector<double> linear_ticks(double lo, double hi) {
  const double raw = (hi - lo) / 5.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) {
      step = m * mag;
      break;
    }
  }
  std::vector<double> t;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * step; v += step) {
    t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
  }
  return t;
}

std::vector<double> log_ticks(double lo, double hi) {
  std::vector<double> t;
  for (int e = static_cast<int>(std::round(std::log10(lo)));
       e <= static_cast<int>(std::round(std::log10(hi))); ++e) {
    t.push_back(std::pow(10.0, e));
  }
  // Thin out dense decades.
  while (t.size() > 8) {
    std::vector<double> half;
    for (std::size_t k = 0; k < t.size(); k += 2) half.push_back(t[k]);
    t = half;
  }
  return t;
}

void axes(std::ostringstream& s, const Panel& p, const std::string& xlabel,
          const std::string& ylabel) {
  s << "<rect x=\"" << num(p.left) << "\" y=\"" << num(p.top) << "\" width=\"" << num(p.width)
    << "\" height=\"" << num(p.height) << "\" fill=\"none\" stroke=\"black\"/>\n";
  const auto xt = p.logx ? log_ticks(p.xmin, p.xmax) : linear_ticks(p.xmin, p.xmax);
  const auto yt = p.logy ? log_ticks(p.ymin, p.ymax) : linear_ticks(p.ymin, p.ymax);
  const double bottom = p.top + p.height;
  for (double v : xt) {
    const double x = p.px(v);
    s << "<line x1=\"" << num(x) << "\" y1=\"" << num(bottom) << "\" x2=\"" << num(x)
      << "\" y2=\"" << num(bottom - 5) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(x) << "\" y=\"" << num(bottom + 16)
      << "\" font-size=\"11\" text-anchor=\"middle\">" << tick_label(v) << "</text>\n";
  }
  for (double v : yt) {
    const double y = p.py(v);
    s << "<line x1=\"" << num(p.left) << "\" y1=\"" << num(y) << "\" x2=\"" << num(p.left + 5)
      << "\" y2=\"" << num(y) << "\" stroke=\"black\"/>\n";
    s << "<text x=\"" << num(p.left - 6) << "\" y=\"" << num(y + 4)
      << "\" font-size=\"11\" text-anchor=\"end\">" << tick_label(v) << "</text>\n";
  }
  s << "<text x=\"" << num(p.left + p.width / 2) << "\" y=\"" << num(bottom + 34)
    << "\" font-size=\"13\" text-anchor=\"middle\">" << xlabel << "</text>\n";
  const double ly = p.top + p.height / 2;
  s << "<text x=\"" << num(p.left - 52) << "\" y=\"" << num(ly)
    << "\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 " << num(p.left - 52)
    << ' ' << num(ly) << ")\">" << ylabel << "</text>\n";
}

void marker_line(std::ostringstream& s, const Panel& p, double x) {
  if (!p.inside_x(x)) return;
  s << "<line x1=\"" << num(p.px(x)) << "\" y1=\"" << num(p.top) << "\" x2=\"" << num(p.px(x))
    << "\" y2=\"" << num(p.top + p.height)
    << "\" stroke=\"gray\" stroke-dasharray=\"6,4\"/>\n";
}

void cross(std::ostringstream& s, double x, double y, const char* color) {
  const double r = 4;
  s << "<path d=\"M" << num(x - r) << ' ' << num(y - r) << " L" << num(x + r) << ' '
    << num(y + r) << " M" << num(x - r) << ' ' << num(y + r) << " L" << num(x + r) << ' '
    << num(y - r) << "\" stroke=\"" << color << "\"/>\n";
}

void plus(std::ostringstream& s, double x, double y, const char* color) {
  const double r = 5;
  s << "<path d=\"M" << num(x - r) << ' ' << num(y) << " L" << num(x + r) << ' ' << num(y)
    << " M" << num(x) << ' ' << num(y - r) << " L" << num(x) << ' ' << num(y + r)
    << "\" stroke=\"" << color << "\"/>\n";
}

void polyline(std::ostringstream& s, const Panel& p, const std::vector<double>& xs,
              const std::vector<double>& ys, const char* color) {
  std::ostringstream pts;
  int n = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    if (!p.inside_x(xs[k]) || !p.inside_y(ys[k])) continue;
    pts << (n++ ? " " : "") << num(p.px(xs[k])) << ',' << num(p.py(ys[k]));
  }
  if (n < 2) return;
  s << "<polyline points=\"" << pts.str() << "\" fill=\"none\" stroke=\"" << color
    << "\" stroke-width=\"1.5\"/>\n";
}

std::string header(double width, double height) {
  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << num(width) << "\" height=\""
    << num(height) << "\" font-family=\"sans-serif\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  return s.str();
}

std::vector<double> column(const CsvTable& t, const std::string& name) {
  const auto c = t.column(name);
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(r[c]);
  return v;
}

}  // namespace

std::string fig2_svg(const CsvTable& table) {
  const auto x = column(table, "j_over_u");
  const auto e = column(table, "e_exact");
  const auto g = column(table, "g_estimate");
  const auto d = column(table, "d");
  const auto lo = column(table, "band_low");
  const auto hi = column(table, "band_high");

  std::ostringstream s;
  s << header(1000, 420);

  // (a) energies per particle
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = xmin, ymax = -xmin;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xmin = std::min(xmin, x[k]);
    xmax = std::max(xmax, x[k]);
    for (double v : {e[k], g[k], lo[k], hi[k]}) {
      ymin = std::min(ymin, v);
      ymax = std::max(ymax, v);
    }
  }
  Panel a{80, 30, 380, 320, 0, 0, 0, 0};
  range_with_margin(xmin, std::max(xmax, kTransitionJOverU), false, a.xmin, a.xmax);
  a.xmin = std::max(a.xmin, 0.0);
  range_with_margin(ymin, ymax, false, a.ymin, a.ymax);
  axes(s, a, "J/U", "energy per particle / U");
  marker_line(s, a, kTransitionJOverU);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const double px = a.px(x[k]);
    s << "<line x1=\"" << num(px) << "\" y1=\"" << num(a.py(lo[k])) << "\" x2=\"" << num(px)
      << "\" y2=\"" << num(a.py(hi[k])) << "\" stroke=\"#d62728\" stroke-width=\"0.8\"/>\n";
    cross(s, px, a.py(e[k]), "black");
    plus(s, px, a.py(g[k]), "#d62728");
  }
  s << "<text x=\"" << num(a.left + 10) << "\" y=\"" << num(a.top + 18)
    << "\" font-size=\"12\">(a) x exact, + estimate</text>\n";

  // (b) discrepancy, log-log
  Panel b{580, 30, 380, 320, 0, 0, 0, 0, true, true};
  std::vector<std::pair<double, double>> pts;
  double dmin = std::numeric_limits<double>::infinity(), dmax = 0;
  double pxmin = dmin, pxmax = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (x[k] > 0) {
      pxmin = std::min(pxmin, x[k]);
      pxmax = std::max(pxmax, x[k]);
    }
    if (x[k] > 0 && d[k] > 0) {
      dmin = std::min(dmin, d[k]);
      dmax = std::max(dmax, d[k]);
      pts.emplace_back(x[k], d[k]);
    }
  }
  range_with_margin(pxmin, pxmax, true, b.xmin, b.xmax);
  range_with_margin(dmin, dmax, true, b.ymin, b.ymax);
  axes(s, b, "J/U", "d = |G - E| / N");
  marker_line(s, b, kTransitionJOverU);
  for (const auto& [px, pd] : pts) cross(s, b.px(px), b.py(pd), "black");
  try {
    const FitResult f = fit_power_law(pts, 0.02, 0.1);
    std::vector<double> fx, fy;
    for (int k = 0; k <= 40; ++k) {
      const double v = b.xmin * std::pow(b.xmax / b.xmin, k / 40.0);
      fx.push_back(v);
      fy.push_back(f.prefactor * std::pow(v, f.exponent));
    }
    polyline(s, b, fx, fy, "#1f77b4");
    s << "<text x=\"" << num(b.left + 10) << "\" y=\"" << num(b.top + 18)
      << "\" font-size=\"12\">(b) fit on [0.02, 0.1]: exponent " << tick_label(f.exponent)
      << "</text>\n";
  } catch (const std::invalid_argument&) {
    s << "<text x=\"" << num(b.left + 10) << "\" y=\"" << num(b.top + 18)
      << "\" font-size=\"12\">(b) too few points to fit</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

std::string fig3_svg(const CsvTable& table) {
  const auto x = column(table, "j_over_u");
  const auto w = column(table, "abs_work_over_dj");
  std::ostringstream s;
  s << header(520, 420);
  double xmax = kTransitionJOverU, ymin = 0, ymax = 0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    xmax = std::max(xmax, x[k]);
    ymax = std::max(ymax, w[k]);
  }
  Panel p{80, 30, 400, 320, 0, 0, 0, 0};
  range_with_margin(0.0, xmax, false, p.xmin, p.xmax);
  p.xmin = 0.0;
  range_with_margin(ymin, ymax, false, p.ymin, p.ymax);
  p.ymin = 0.0;
  axes(s, p, "J/U", "|W| / dJ");
  marker_line(s, p, kTransitionJOverU);
  polyline(s, p, x, w, "black");
  for (std::size_t k = 0; k < x.size(); ++k) cross(s, p.px(x[k]), p.py(w[k]), "black");
  s << "</svg>\n";
  return s.str();
}

}  // namespace bhcav::experiments
