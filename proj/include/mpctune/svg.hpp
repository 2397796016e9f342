#pragma once

#include <string>
#include <vector>

namespace mpctune::svg {

struct Series {
  std::vector<double> x, y;
  std::string colour = "#1f6fb2";
  double width = 1.5;
  std::string label;
};

struct Band {
  std::vector<double> x, lo, hi;
  std::string colour = "#1f6fb2";
  double opacity = 0.18;
};

struct Marks {
  std::vector<double> x, y;
  std::string colour = "#555555";
  double radius = 2.0;
  std::string label;
};

// A single-panel line chart rendered to a complete standalone SVG document.
// Rendering is a pure function of the figure contents, so identical data
// yields byte-identical output.  Non-finite samples break line segments and
// are skipped for range computation.
struct Figure {
  double width = 720.0;
  double height = 440.0;
  std::string title, xlabel, ylabel;
  std::vector<Band> bands;
  std::vector<Series> series;
  std::vector<Marks> marks;

  std::string render() const;
};

}  // namespace mpctune::svg
