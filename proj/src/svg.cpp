#include "mpctune/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace mpctune::svg {
namespace {

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  bool empty() const { return lo > hi; }
  void finalise() {
    if (empty()) {
      lo = 0.0;
      hi = 1.0;
    }
    if (hi == lo) {
      lo -= 1.0;
      hi += 1.0;
    }
    const double pad = 0.05 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

std::string fmt(const char* spec, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), spec, v);
  return buf;
}

// Tick step rounded to the usual 1/2/5 ladder.
double nice_step(double span, int target) {
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double frac = raw / mag;
  double step = 10.0;
  if (frac <= 1.0)
    step = 1.0;
  else if (frac <= 2.0)
    step = 2.0;
  else if (frac <= 5.0)
    step = 5.0;
  return step * mag;
}

std::vector<double> ticks(const Range& r, int target = 5) {
  const double step = nice_step(r.hi - r.lo, target);
  std::vector<double> out;
  double t = std::ceil(r.lo / step) * step;
  for (; t <= r.hi + 1e-9 * step; t += step)
    out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
  return out;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '&')
      out += "&amp;";
    else if (c == '<')
      out += "&lt;";
    else if (c == '>')
      out += "&gt;";
    else
      out += c;
  }
  return out;
}

}  // namespace

std::string Figure::render() const {
  Range rx, ry;
  for (const auto& b : bands)
    for (std::size_t i = 0; i < b.x.size(); ++i) {
      rx.add(b.x[i]);
      ry.add(b.lo[i]);
      ry.add(b.hi[i]);
    }
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      rx.add(s.x[i]);
      ry.add(s.y[i]);
    }
  for (const auto& m : marks)
    for (std::size_t i = 0; i < m.x.size(); ++i) {
      rx.add(m.x[i]);
      ry.add(m.y[i]);
    }
  rx.finalise();
  ry.finalise();

  const double ml = 64.0, mr = 16.0;
  const double mt = title.empty() ? 16.0 : 40.0;
  const double mb = 48.0;
  const double pw = width - ml - mr;
  const double ph = height - mt - mb;
  auto px = [&](double x) { return ml + (x - rx.lo) / (rx.hi - rx.lo) * pw; };
  auto py = [&](double y) {
    return mt + ph - (y - ry.lo) / (ry.hi - ry.lo) * ph;
  };

  std::string out;
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
         fmt("%.0f", width) + "\" height=\"" + fmt("%.0f", height) +
         "\" viewBox=\"0 0 " + fmt("%.0f", width) + " " + fmt("%.0f", height) +
         "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";

  for (double t : ticks(rx)) {
    const std::string x = fmt("%.2f", px(t));
    out += "<line x1=\"" + x + "\" y1=\"" + fmt("%.2f", mt) + "\" x2=\"" + x +
           "\" y2=\"" + fmt("%.2f", mt + ph) +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + x + "\" y=\"" + fmt("%.2f", mt + ph + 18.0) +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
           "text-anchor=\"middle\">" +
           fmt("%g", t) + "</text>\n";
  }
  for (double t : ticks(ry)) {
    const std::string y = fmt("%.2f", py(t));
    out += "<line x1=\"" + fmt("%.2f", ml) + "\" y1=\"" + y + "\" x2=\"" +
           fmt("%.2f", ml + pw) + "\" y2=\"" + y +
           "\" stroke=\"#e0e0e0\" stroke-width=\"1\"/>\n";
    out += "<text x=\"" + fmt("%.2f", ml - 6.0) + "\" y=\"" + y +
           "\" font-family=\"sans-serif\" font-size=\"11\" fill=\"#333333\" "
           "text-anchor=\"end\" dominant-baseline=\"middle\">" +
           fmt("%g", t) + "</text>\n";
  }

  for (const auto& b : bands) {
    std::string pts;
    bool ok = true;
    for (std::size_t i = 0; i < b.x.size(); ++i)
      if (!std::isfinite(b.x[i]) || !std::isfinite(b.lo[i]) ||
          !std::isfinite(b.hi[i]))
        ok = false;
    if (!ok || b.x.empty()) continue;
    for (std::size_t i = 0; i < b.x.size(); ++i)
      pts += fmt("%.2f", px(b.x[i])) + "," + fmt("%.2f", py(b.hi[i])) + " ";
    for (std::size_t i = b.x.size(); i-- > 0;)
      pts += fmt("%.2f", px(b.x[i])) + "," + fmt("%.2f", py(b.lo[i])) + " ";
    pts.pop_back();
    out += "<polygon points=\"" + pts + "\" fill=\"" + b.colour +
           "\" fill-opacity=\"" + fmt("%g", b.opacity) + "\"/>\n";
  }

  for (const auto& s : series) {
    std::string pts;
    auto flush = [&] {
      if (pts.empty()) return;
      pts.pop_back();
      out += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" +
             s.colour + "\" stroke-width=\"" + fmt("%g", s.width) + "\"/>\n";
      pts.clear();
    };
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) {
        flush();
        continue;
      }
      pts += fmt("%.2f", px(s.x[i])) + "," + fmt("%.2f", py(s.y[i])) + " ";
    }
    flush();
  }

  for (const auto& m : marks)
    for (std::size_t i = 0; i < m.x.size(); ++i) {
      if (!std::isfinite(m.x[i]) || !std::isfinite(m.y[i])) continue;
      out += "<circle cx=\"" + fmt("%.2f", px(m.x[i])) + "\" cy=\"" +
             fmt("%.2f", py(m.y[i])) + "\" r=\"" + fmt("%g", m.radius) +
             "\" fill=\"" + m.colour + "\" fill-opacity=\"0.7\"/>\n";
    }

  out += "<rect x=\"" + fmt("%.2f", ml) + "\" y=\"" + fmt("%.2f", mt) +
         "\" width=\"" + fmt("%.2f", pw) + "\" height=\"" + fmt("%.2f", ph) +
         "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

  if (!title.empty())
    out += "<text x=\"" + fmt("%.2f", ml + pw / 2.0) + "\" y=\"24\" "
           "font-family=\"sans-serif\" font-size=\"14\" fill=\"#111111\" "
           "text-anchor=\"middle\">" +
           escape(title) + "</text>\n";
  if (!xlabel.empty())
    out += "<text x=\"" + fmt("%.2f", ml + pw / 2.0) + "\" y=\"" +
           fmt("%.2f", height - 10.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#111111\" "
           "text-anchor=\"middle\">" +
           escape(xlabel) + "</text>\n";
  if (!ylabel.empty())
    out += "<text x=\"16\" y=\"" + fmt("%.2f", mt + ph / 2.0) +
           "\" font-family=\"sans-serif\" font-size=\"12\" fill=\"#111111\" "
           "text-anchor=\"middle\" transform=\"rotate(-90 16 " +
           fmt("%.2f", mt + ph / 2.0) + ")\">" + escape(ylabel) + "</text>\n";

  double ly = mt + 14.0;
  auto legend_row = [&](const std::string& colour, const std::string& label) {
    const double lx = ml + pw - 150.0;
    out += "<line x1=\"" + fmt("%.2f", lx) + "\" y1=\"" + fmt("%.2f", ly - 4.0) +
           "\" x2=\"" + fmt("%.2f", lx + 24.0) + "\" y2=\"" +
           fmt("%.2f", ly - 4.0) + "\" stroke=\"" + colour +
           "\" stroke-width=\"2\"/>\n";
    out += "<text x=\"" + fmt("%.2f", lx + 30.0) + "\" y=\"" + fmt("%.2f", ly) +
           "\" font-family=\"sans-serif\" font-size=\"11\" "
           "fill=\"#111111\">" +
           escape(label) + "</text>\n";
    ly += 16.0;
  };
  for (const auto& s : series)
    if (!s.label.empty()) legend_row(s.colour, s.label);
  for (const auto& m : marks)
    if (!m.label.empty()) legend_row(m.colour, m.label);

  out += "</svg>\n";
  return out;
}

}  // namespace mpctune::svg
