#include "svg.hpp"

#include <algorithm>
#include <cstdio>

namespace pce::cli {
namespace {

constexpr double kWidth = 640, kHeight = 400, kMargin = 56;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4g", v);
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

std::string line_chart_svg(const std::string& title, const std::string& x_label,
                           const std::string& y_label, const std::vector<double>& xs,
                           const std::vector<double>& ys) {
  const std::size_t count = std::min(xs.size(), ys.size());
  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  if (count > 0) {
    x0 = *std::min_element(xs.begin(), xs.begin() + count);
    x1 = *std::max_element(xs.begin(), xs.begin() + count);
    y0 = std::min(0.0, *std::min_element(ys.begin(), ys.begin() + count));
    y1 = *std::max_element(ys.begin(), ys.begin() + count);
  }
  if (x1 == x0) x1 = x0 + 1;
  if (y1 == y0) y1 = y0 + 1;
  const double pw = kWidth - 2 * kMargin, ph = kHeight - 2 * kMargin;
  auto px = [&](double x) { return kMargin + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return kHeight - kMargin - (y - y0) / (y1 - y0) * ph; };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + num(kWidth) + "\" height=\"" +
       num(kHeight) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" +
       escape(title) + "</text>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kHeight - kMargin) + "\" x2=\"" +
       num(kWidth - kMargin) + "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + num(kMargin) + "\" y1=\"" + num(kMargin) + "\" x2=\"" + num(kMargin) +
       "\" y2=\"" + num(kHeight - kMargin) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + num(kMargin) + "\" y=\"" + num(kHeight - kMargin + 16) +
       "\" font-size=\"11\">" + num(x0) + "</text>\n";
  s += "<text x=\"" + num(kWidth - kMargin) + "\" y=\"" + num(kHeight - kMargin + 16) +
       "\" text-anchor=\"end\" font-size=\"11\">" + num(x1) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kHeight - kMargin) +
       "\" text-anchor=\"end\" font-size=\"11\">" + num(y0) + "</text>\n";
  s += "<text x=\"" + num(kMargin - 4) + "\" y=\"" + num(kMargin + 4) +
       "\" text-anchor=\"end\" font-size=\"11\">" + num(y1) + "</text>\n";
  s += "<text x=\"" + num(kWidth / 2) + "\" y=\"" + num(kHeight - 12) +
       "\" text-anchor=\"middle\" font-size=\"12\">" + escape(x_label) + "</text>\n";
  s += "<text x=\"14\" y=\"" + num(kHeight / 2) + "\" font-size=\"12\" transform=\"rotate(-90 14 " +
       num(kHeight / 2) + ")\" text-anchor=\"middle\">" + escape(y_label) + "</text>\n";
  s += "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
  for (std::size_t i = 0; i < count; ++i) {
    if (i) s += ' ';
    s += num(px(xs[i])) + ',' + num(py(ys[i]));
  }
  s += "\"/>\n</svg>\n";
  return s;
}

}  // namespace pce::cli
