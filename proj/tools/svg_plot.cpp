#include "svg_plot.hpp"

#include "isolump/error.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace isolump::cli {

namespace {

constexpr double kWidth = 720.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 80.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 60.0;

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string fmt(double v) {
  std::ostringstream os;
  os << std::fixed << std::setprecision(2) << v;
  return os.str();
}

std::string tick_label(double v) {
  std::ostringstream os;
  os << std::setprecision(4) << v;
  return os.str();
}

struct Axis {
  bool log = false;
  double lo = 0.0, hi = 1.0;  // in transformed units

  double transform(double v) const { return log ? std::log10(v) : v; }
  bool valid(double v) const { return std::isfinite(v) && (!log || v > 0.0); }

  void fit(double a, double b) {
    lo = a;
    hi = b;
    if (!(hi > lo)) {
      const double pad = lo == 0.0 ? 1.0 : std::abs(lo) * 0.1;
      lo -= pad;
      hi += pad;
    }
    if (log) {
      lo = std::floor(lo);
      hi = std::ceil(hi);
      if (hi == lo) hi = lo + 1.0;
    } else {
      const double pad = 0.05 * (hi - lo);
      lo -= pad;
      hi += pad;
    }
  }

  // Tick positions in transformed units.
  std::vector<double> ticks() const {
    std::vector<double> t;
    if (log) {
      const int step = std::max(1, static_cast<int>(std::ceil((hi - lo) / 8.0)));
      for (double e = lo; e <= hi + 1e-9; e += step) t.push_back(e);
      return t;
    }
    const double raw = (hi - lo) / 5.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
      if (m * mag >= raw) {
        step = m * mag;
        break;
      }
    }
    for (double v = std::ceil(lo / step) * step; v <= hi + 1e-12 * step; v += step) t.push_back(std::abs(v) < 1e-12 * step ? 0.0 : v);
    return t;
  }

  std::string label(double t) const { return log ? "1e" + tick_label(t) : tick_label(t); }
};

}  // namespace

void Plot::write_svg(std::ostream& out) const {
  Axis ax{logx}, ay{logy};
  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin, ymin = xmin, ymax = -xmin;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!ax.valid(s.x[i]) || !ay.valid(s.y[i])) continue;
      xmin = std::min(xmin, ax.transform(s.x[i]));
      xmax = std::max(xmax, ax.transform(s.x[i]));
      ymin = std::min(ymin, ay.transform(s.y[i]));
      ymax = std::max(ymax, ay.transform(s.y[i]));
    }
  }
  if (!std::isfinite(xmin)) xmin = 0.0, xmax = 1.0;
  if (!std::isfinite(ymin)) ymin = 0.0, ymax = 1.0;
  ax.fit(xmin, xmax);
  ay.fit(ymin, ymax);

  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (ax.transform(v) - ax.lo) / (ax.hi - ax.lo) * pw; };
  auto py = [&](double v) { return kTop + ph - (ay.transform(v) - ay.lo) / (ay.hi - ay.lo) * ph; };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
      << escape(title) << "</text>\n";

  for (double t : ax.ticks()) {
    const double x = kLeft + (t - ax.lo) / (ax.hi - ax.lo) * pw;
    out << "<line x1=\"" << fmt(x) << "\" y1=\"" << fmt(kTop) << "\" x2=\"" << fmt(x) << "\" y2=\"" << fmt(kTop + ph)
        << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(x) << "\" y=\"" << fmt(kTop + ph + 18) << "\" text-anchor=\"middle\">"
        << ax.label(t) << "</text>\n";
  }
  for (double t : ay.ticks()) {
    const double y = kTop + ph - (t - ay.lo) / (ay.hi - ay.lo) * ph;
    out << "<line x1=\"" << fmt(kLeft) << "\" y1=\"" << fmt(y) << "\" x2=\"" << fmt(kLeft + pw) << "\" y2=\"" << fmt(y)
        << "\" stroke=\"#e0e0e0\"/>\n";
    out << "<text x=\"" << fmt(kLeft - 6) << "\" y=\"" << fmt(y + 4) << "\" text-anchor=\"end\">" << ay.label(t)
        << "</text>\n";
  }
  out << "<rect x=\"" << fmt(kLeft) << "\" y=\"" << fmt(kTop) << "\" width=\"" << fmt(pw) << "\" height=\"" << fmt(ph)
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  out << "<text x=\"" << fmt(kLeft + pw / 2) << "\" y=\"" << fmt(kHeight - 16) << "\" text-anchor=\"middle\">"
      << escape(xlabel) << "</text>\n";
  out << "<text transform=\"translate(18," << fmt(kTop + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
      << escape(ylabel) << "</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& ser = series[s];
    const char* color = kPalette[s % (sizeof(kPalette) / sizeof(kPalette[0]))];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
      if (!ax.valid(ser.x[i]) || !ay.valid(ser.y[i])) continue;
      out << (first ? "" : " ") << fmt(px(ser.x[i])) << ',' << fmt(py(ser.y[i]));
      first = false;
    }
    out << "\"/>\n";
    if (ser.markers) {
      for (std::size_t i = 0; i < ser.x.size() && i < ser.y.size(); ++i) {
        if (!ax.valid(ser.x[i]) || !ay.valid(ser.y[i])) continue;
        out << "<circle cx=\"" << fmt(px(ser.x[i])) << "\" cy=\"" << fmt(py(ser.y[i])) << "\" r=\"3\" fill=\"" << color
            << "\"/>\n";
      }
    }
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    const double lx = kLeft + pw + 14;
    out << "<line x1=\"" << fmt(lx) << "\" y1=\"" << fmt(ly - 4) << "\" x2=\"" << fmt(lx + 24) << "\" y2=\"" << fmt(ly - 4)
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << fmt(lx + 30) << "\" y=\"" << fmt(ly) << "\">" << escape(ser.label) << "</text>\n";
  }
  out << "</svg>\n";
}

void Plot::save(const std::string& path) const {
  std::ofstream f(path);
  require(static_cast<bool>(f), ErrorKind::io, "cannot write " + path);
  write_svg(f);
}

}  // namespace isolump::cli
