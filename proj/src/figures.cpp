#include "windplan/figures.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>

#include "windplan/experiment.hpp"

namespace windplan::figures {

namespace {

constexpr std::array<const char*, 8> kPalette{"#d62728", "#1f77b4", "#2ca02c", "#ff7f0e",
                                              "#9467bd", "#8c564b", "#e377c2", "#17becf"};

std::string esc(const std::string& s) {
  std::string r;
  for (char c : s) {
    switch (c) {
      case '<': r += "&lt;"; break;
      case '>': r += "&gt;"; break;
      case '&': r += "&amp;"; break;
      case '"': r += "&quot;"; break;
      default: r += c;
    }
  }
  return r;
}

// Fixed-precision coordinates keep the files small and stable.
std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

void convergence_svg(std::ostream& out, const std::string& title, const std::vector<Series>& series, bool log_scale) {
  const double W = 640, H = 420, left = 70, right = 150, top = 40, bottom = 50;
  const double pw = W - left - right;
  const double ph = H - top - bottom;

  auto transform = [&](double v) {
    if (!log_scale) return v;
    return std::log10(std::max(v, 1e-300));
  };

  std::size_t n = 0;
  double lo = kInf, hi = -kInf;
  for (const auto& s : series) {
    n = std::max(n, s.values.size());
    for (double v : s.values) {
      const double t = transform(v);
      if (!std::isfinite(t)) continue;
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
  }
  if (!(lo <= hi)) {
    lo = 0.0;
    hi = 1.0;
  }
  if (hi - lo < 1e-12) {
    lo -= 0.5;
    hi += 0.5;
  }
  auto px = [&](std::size_t i) { return left + (n > 1 ? pw * static_cast<double>(i) / static_cast<double>(n - 1) : 0.0); };
  auto py = [&](double t) { return top + ph * (hi - t) / (hi - lo); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
      << ' ' << H << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"16\">"
      << esc(title) << "</text>\n";
  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double t = lo + (hi - lo) * k / 4.0;
    out << "<text x=\"" << left - 6 << "\" y=\"" << num(py(t) + 4)
        << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
        << (log_scale ? "1e" + num(t) : experiment::format_number(t)) << "</text>\n";
  }
  out << "<text x=\"" << left + pw / 2 << "\" y=\"" << H - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">iteration (" << n << ")</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < series[s].values.size(); ++i) {
      const double t = transform(series[s].values[i]);
      if (!std::isfinite(t)) continue;
      out << num(px(i)) << ',' << num(py(t)) << ' ';
    }
    out << "\"/>\n";
    const double ly = top + 16.0 * static_cast<double>(s + 1);
    out << "<line x1=\"" << left + pw + 10 << "\" y1=\"" << ly << "\" x2=\"" << left + pw + 30 << "\" y2=\"" << ly
        << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << left + pw + 34 << "\" y=\"" << ly + 4 << "\" font-family=\"sans-serif\" font-size=\"12\">"
        << esc(series[s].label) << "</text>\n";
  }
  out << "</svg>\n";
}

void snapshot_svg(std::ostream& out, const plan::MapSpec& map, const std::vector<plan::Obstacle>& obstacles,
                  std::span<const plan::Point> travelled, std::span<const plan::Point> planned, plan::Point robot,
                  const std::string& title) {
  const double pad = 10, head = 24;
  // SVG y grows downwards; flip so the map's origin sits bottom-left.
  auto fx = [&](double x) { return num(pad + x); };
  auto fy = [&](double y) { return num(head + pad + map.height - y); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << map.width + 2 * pad << "\" height=\""
      << map.height + 2 * pad + head << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << pad << "\" y=\"18\" font-family=\"sans-serif\" font-size=\"13\">" << esc(title)
      << "</text>\n";
  out << "<rect x=\"" << pad << "\" y=\"" << head + pad << "\" width=\"" << map.width << "\" height=\"" << map.height
      << "\" fill=\"none\" stroke=\"black\"/>\n";

  for (const auto& o : obstacles) {
    const char* fill = o.is_dynamic() ? "#222222" : "#e6c200";
    if (const auto* c = std::get_if<plan::Circle>(&o.shape())) {
      out << "<circle cx=\"" << fx(c->center.x) << "\" cy=\"" << fy(c->center.y) << "\" r=\"" << num(c->radius)
          << "\" fill=\"" << fill << "\"/>\n";
    } else {
      out << "<polygon fill=\"" << fill << "\" points=\"";
      for (const auto& p : std::get<plan::Polygon>(o.shape()).vertices) out << fx(p.x) << ',' << fy(p.y) << ' ';
      out << "\"/>\n";
    }
  }

  auto polyline = [&](std::span<const plan::Point> pts, const char* style) {
    if (pts.size() < 2) return;
    out << "<polyline fill=\"none\" " << style << " points=\"";
    for (const auto& p : pts) out << fx(p.x) << ',' << fy(p.y) << ' ';
    out << "\"/>\n";
  };
  polyline(planned, "stroke=\"#1f77b4\" stroke-width=\"1\" stroke-dasharray=\"4 3\"");
  polyline(travelled, "stroke=\"#d62728\" stroke-width=\"2\"");

  out << "<circle cx=\"" << fx(map.start.x) << "\" cy=\"" << fy(map.start.y) << "\" r=\"4\" fill=\"#2ca02c\"/>\n";
  out << "<circle cx=\"" << fx(map.goal.x) << "\" cy=\"" << fy(map.goal.y) << "\" r=\"4\" fill=\"#9467bd\"/>\n";
  out << "<circle cx=\"" << fx(robot.x) << "\" cy=\"" << fy(robot.y) << "\" r=\"5\" fill=\"none\" stroke=\"#d62728\" "
      << "stroke-width=\"2\"/>\n";
  out << "</svg>\n";
}

}  // namespace windplan::figures
