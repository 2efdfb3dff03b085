#include "nullsteer/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "nullsteer/error.hpp"

namespace nullsteer {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", x);
  return buf;
}

std::string tick(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

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

}  // namespace

std::string line_plot_svg(const PlotSpec& spec, const std::vector<Series>& series) {
  const double left = 70, right = 20, top = 36, bottom = 50;
  const double pw = spec.width - left - right;
  const double ph = spec.height - top - bottom;
  auto tx = [&](double x) { return spec.log_x ? std::log10(x) : x; };

  double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i]) || (spec.log_x && s.x[i] <= 0)) continue;
      x0 = std::min(x0, tx(s.x[i]));
      x1 = std::max(x1, tx(s.x[i]));
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (x1 == x0) x1 = x0 + 1;
  if (y1 - y0 < 1e-12) y0 -= 0.5, y1 += 0.5;
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (tx(x) - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (y1 - y) / (y1 - y0) * ph; };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << spec.width << "\" height=\"" << spec.height
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(spec.width / 2.0) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
    << escape(spec.title) << "</text>\n";
  o << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw) << "\" height=\"" << num(ph)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0;
    const double fy = y0 + (y1 - y0) * i / 4.0;
    const double gx = left + pw * i / 4.0;
    const double gy = top + ph - ph * i / 4.0;
    o << "<text x=\"" << num(gx) << "\" y=\"" << num(top + ph + 16) << "\" text-anchor=\"middle\">"
      << tick(spec.log_x ? std::pow(10.0, fx) : fx) << "</text>\n";
    o << "<text x=\"" << num(left - 6) << "\" y=\"" << num(gy + 4) << "\" text-anchor=\"end\">" << tick(fy)
      << "</text>\n";
  }
  o << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(spec.height - 10.0) << "\" text-anchor=\"middle\">"
    << escape(spec.x_label) << "</text>\n";
  o << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
    << num(top + ph / 2) << ")\">" << escape(spec.y_label) << "</text>\n";

  double legend_y = top + 14;
  for (const auto& s : series) {
    if (s.markers) {
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i]) || (spec.log_x && s.x[i] <= 0)) continue;
        o << "<circle cx=\"" << num(px(s.x[i])) << "\" cy=\"" << num(py(s.y[i])) << "\" r=\"2\" fill=\"" << s.color
          << "\"/>\n";
      }
    } else {
      o << "<polyline fill=\"none\" stroke=\"" << s.color << "\" stroke-width=\"1.5\" points=\"";
      for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
        if (!std::isfinite(s.y[i]) || (spec.log_x && s.x[i] <= 0)) continue;
        o << num(px(s.x[i])) << ',' << num(py(s.y[i])) << ' ';
      }
      o << "\"/>\n";
    }
    if (!s.label.empty()) {
      o << "<rect x=\"" << num(left + pw - 150) << "\" y=\"" << num(legend_y - 9) << "\" width=\"10\" height=\"10\" fill=\""
        << s.color << "\"/>\n";
      o << "<text x=\"" << num(left + pw - 135) << "\" y=\"" << num(legend_y) << "\">" << escape(s.label) << "</text>\n";
      legend_y += 16;
    }
  }
  o << "</svg>\n";
  return o.str();
}

std::string disk_plot_svg(const std::string& title, const ChargeConfiguration& config,
                          const std::vector<cplx>& roots, int size) {
  const double c = size / 2.0;
  const double r = size / 2.0 - 40;
  auto px = [&](cplx z) { return c + r * z.real(); };
  auto py = [&](cplx z) { return c + 10 - r * z.imag(); };
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size + 20
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << num(c) << "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" << escape(title) << "</text>\n";
  o << "<circle cx=\"" << num(c) << "\" cy=\"" << num(c + 10) << "\" r=\"" << num(r)
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << num(c - r) << "\" y1=\"" << num(c + 10) << "\" x2=\"" << num(c + r) << "\" y2=\"" << num(c + 10)
    << "\" stroke=\"#ccc\"/>\n";
  o << "<line x1=\"" << num(c) << "\" y1=\"" << num(c + 10 - r) << "\" x2=\"" << num(c) << "\" y2=\"" << num(c + 10 + r)
    << "\" stroke=\"#ccc\"/>\n";
  for (const auto& q : config.charges) {
    if (q.p <= config.zero_threshold) continue;
    const double radius = 3.0 + 14.0 * std::sqrt(q.p);
    o << "<circle cx=\"" << num(px(q.phase)) << "\" cy=\"" << num(py(q.phase)) << "\" r=\"" << num(radius)
      << "\" fill=\"#444\" fill-opacity=\"0.7\"/>\n";
  }
  for (const cplx& z : roots) {
    const double x = px(z), y = py(z), a = 5;
    o << "<path d=\"M" << num(x - a) << ' ' << num(y - a) << " L" << num(x + a) << ' ' << num(y + a) << " M"
      << num(x - a) << ' ' << num(y + a) << " L" << num(x + a) << ' ' << num(y - a)
      << "\" stroke=\"#d62728\" stroke-width=\"2\"/>\n";
  }
  o << "</svg>\n";
  return o.str();
}

std::string side_by_side_svg(const std::vector<std::string>& panels, int panel_width, int panel_height) {
  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << panel_width * static_cast<int>(panels.size())
    << "\" height=\"" << panel_height << "\">\n";
  for (std::size_t i = 0; i < panels.size(); ++i) {
    o << "<g transform=\"translate(" << panel_width * static_cast<int>(i) << ",0)\">\n" << panels[i] << "</g>\n";
  }
  o << "</svg>\n";
  return o.str();
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::invalid_input, "cannot open " + path.string() + " for writing");
  out << text;
}

}  // namespace nullsteer
