#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace isolump::cli {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
  bool markers = false;
};

/// Minimal line plot with linear or logarithmic axes and a legend.
struct Plot {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  bool logx = false;
  bool logy = false;
  std::vector<Series> series;

  void write_svg(std::ostream& out) const;
  void save(const std::string& path) const;
};

}  // namespace isolump::cli
