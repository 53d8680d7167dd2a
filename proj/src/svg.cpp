#include "fbpstream/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <vector>

namespace fbpstream {

namespace {

constexpr double kLeft = 60.0;
constexpr double kRight = 20.0;
constexpr double kTop = 30.0;
constexpr double kBottom = 40.0;

std::string fixed(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

std::string label(double v) {
  if (std::fabs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&':
        out += "&amp;";
        break;
      case '<':
        out += "&lt;";
        break;
      case '>':
        out += "&gt;";
        break;
      case '"':
        out += "&quot;";
        break;
      default:
        out += c;
    }
  }
  return out;
}

// 1, 2 or 5 times a power of ten, about range / target.
double nice_step(double range, int target) {
  const double raw = range / target;
  const double magnitude = std::pow(10.0, std::floor(std::log10(raw)));
  const double r = raw / magnitude;
  const double m = r < 1.5 ? 1.0 : r < 3.5 ? 2.0 : r < 7.5 ? 5.0 : 10.0;
  return m * magnitude;
}

struct Frame {
  double x0, x1, y0, y1;  // data ranges
  double width, height;

  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (width - kLeft - kRight); }
  double py(double y) const { return height - kBottom - (y - y0) / (y1 - y0) * (height - kTop - kBottom); }
};

std::string points(const Frame& f, const Curve& c) {
  std::string out;
  for (std::size_t t = 0; t < c.size(); ++t) {
    if (t > 0) out += ' ';
    out += fixed(f.px(c.grid().point(t))) + ',' + fixed(f.py(c[t]));
  }
  return out;
}

}  // namespace

std::string render_fbp_svg(const FunctionalBoxplot& fbp, const SvgStyle& style) {
  const auto& lo = fbp.envelope_min().values();
  const auto& hi = fbp.envelope_max().values();
  double y0 = *std::min_element(lo.begin(), lo.end());
  double y1 = *std::max_element(hi.begin(), hi.end());
  for (Component c : kComponents) {
    const auto v = fbp.component(c).values();
    y0 = std::min(y0, *std::min_element(v.begin(), v.end()));
    y1 = std::max(y1, *std::max_element(v.begin(), v.end()));
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 1.0;
    y1 += 1.0;
  }
  const double ystep = nice_step(y1 - y0, 5);
  y0 = std::floor(y0 / ystep) * ystep;
  y1 = std::ceil(y1 / ystep) * ystep;

  const double xmax = std::max(1.0, fbp.grid().point(fbp.grid().size() - 1));
  const Frame f{0.0, xmax, y0, y1, static_cast<double>(style.width),
                static_cast<double>(style.height)};

  std::ostringstream svg;
  svg << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
      << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
  if (!style.title.empty()) svg << "  <title>" << escape(style.title) << "</title>\n";
  svg << "  <rect x=\"0\" y=\"0\" width=\"" << style.width << "\" height=\"" << style.height
      << "\" fill=\"white\"/>\n";

  svg << "  <g class=\"axes\" stroke=\"black\" stroke-width=\"1\" font-family=\"sans-serif\" "
         "font-size=\"11\">\n";
  svg << "    <line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(f.py(y0)) << "\" x2=\""
      << fixed(f.px(xmax)) << "\" y2=\"" << fixed(f.py(y0)) << "\"/>\n";
  svg << "    <line x1=\"" << fixed(kLeft) << "\" y1=\"" << fixed(f.py(y0)) << "\" x2=\""
      << fixed(kLeft) << "\" y2=\"" << fixed(f.py(y1)) << "\"/>\n";
  const int ysteps = static_cast<int>(std::lround((y1 - y0) / ystep));
  for (int i = 0; i <= ysteps; ++i) {
    const double v = y0 + i * ystep;
    const double y = f.py(v);
    svg << "    <line class=\"tick\" x1=\"" << fixed(kLeft - 5) << "\" y1=\"" << fixed(y)
        << "\" x2=\"" << fixed(kLeft) << "\" y2=\"" << fixed(y) << "\"/>\n";
    svg << "    <text class=\"tick-label\" x=\"" << fixed(kLeft - 8) << "\" y=\"" << fixed(y + 4)
        << "\" text-anchor=\"end\" stroke=\"none\">" << label(v) << "</text>\n";
  }
  const double xstep = std::max(1.0, nice_step(xmax, 6));
  for (double v = 0.0; v <= xmax + 1e-9; v += xstep) {
    const double x = f.px(v);
    svg << "    <line class=\"tick\" x1=\"" << fixed(x) << "\" y1=\"" << fixed(f.py(y0))
        << "\" x2=\"" << fixed(x) << "\" y2=\"" << fixed(f.py(y0) + 5) << "\"/>\n";
    svg << "    <text class=\"tick-label\" x=\"" << fixed(x) << "\" y=\"" << fixed(f.py(y0) + 18)
        << "\" text-anchor=\"middle\" stroke=\"none\">" << label(v) << "</text>\n";
  }
  svg << "  </g>\n";

  // Upper bound left to right, then lower bound back.
  std::string region = points(f, fbp.box_upper());
  const Curve& lower = fbp.box_lower();
  for (std::size_t t = lower.size(); t-- > 0;) {
    region += ' ' + fixed(f.px(lower.grid().point(t))) + ',' + fixed(f.py(lower[t]));
  }
  svg << "  <polygon class=\"central-region\" points=\"" << region << "\" fill=\""
      << escape(style.region_color) << "\" fill-opacity=\"" << label(style.region_opacity)
      << "\" stroke=\"none\"/>\n";

  const auto line = [&](const char* cls, const Curve& c, const std::string& color, double width) {
    svg << "  <polyline class=\"" << cls << "\" points=\"" << points(f, c)
        << "\" fill=\"none\" stroke=\"" << escape(color) << "\" stroke-width=\"" << label(width)
        << "\"/>\n";
  };
  line("box-lower", fbp.box_lower(), style.region_color, 1.0);
  line("box-upper", fbp.box_upper(), style.region_color, 1.0);
  line("envelope-min", fbp.envelope_min(), style.envelope_color, 1.5);
  line("envelope-max", fbp.envelope_max(), style.envelope_color, 1.5);
  line("median", fbp.median(), style.median_color, 2.5);

  svg << "</svg>\n";
  return svg.str();
}

}  // namespace fbpstream
