#include "avp/plot.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace avp {

namespace {

constexpr double kWidth = 720, kHeight = 440;
constexpr double kLeft = 70, kRight = 160, kTop = 40, kBottom = 60;
const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
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

void header(std::ostringstream& o, const Axes& axes) {
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
    << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
    << "<text x=\"" << kWidth / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">"
    << escape(axes.title) << "</text>\n";
}

struct Frame {
  double x0, x1, y0, y1;
  double px(double x) const { return kLeft + (x - x0) / (x1 - x0) * (kWidth - kLeft - kRight); }
  double py(double y) const {
    return kHeight - kBottom - (y - y0) / (y1 - y0) * (kHeight - kTop - kBottom);
  }
};

void axes_box(std::ostringstream& o, const Frame& f, const Axes& axes, bool x_ticks) {
  const double l = kLeft, r = kWidth - kRight, t = kTop, b = kHeight - kBottom;
  o << "<rect x=\"" << l << "\" y=\"" << t << "\" width=\"" << r - l << "\" height=\"" << b - t
    << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = f.y0 + (f.y1 - f.y0) * i / 5.0;
    o << "<line x1=\"" << l - 4 << "\" x2=\"" << l << "\" y1=\"" << num(f.py(y)) << "\" y2=\""
      << num(f.py(y)) << "\" stroke=\"black\"/>"
      << "<text x=\"" << l - 6 << "\" y=\"" << num(f.py(y) + 4) << "\" text-anchor=\"end\">"
      << tick(y) << "</text>\n";
    if (!x_ticks) continue;
    const double x = f.x0 + (f.x1 - f.x0) * i / 5.0;
    o << "<line x1=\"" << num(f.px(x)) << "\" x2=\"" << num(f.px(x)) << "\" y1=\"" << b
      << "\" y2=\"" << b + 4 << "\" stroke=\"black\"/>"
      << "<text x=\"" << num(f.px(x)) << "\" y=\"" << b + 18 << "\" text-anchor=\"middle\">"
      << tick(x) << "</text>\n";
  }
  o << "<text x=\"" << (l + r) / 2 << "\" y=\"" << kHeight - 16 << "\" text-anchor=\"middle\">"
    << escape(axes.x_label) << "</text>\n"
    << "<text transform=\"translate(18," << (t + b) / 2
    << ") rotate(-90)\" text-anchor=\"middle\">" << escape(axes.y_label) << "</text>\n";
}

void legend(std::ostringstream& o, const std::vector<std::string>& names) {
  for (std::size_t i = 0; i < names.size(); ++i) {
    const double y = kTop + 10 + 18 * static_cast<double>(i);
    o << "<rect x=\"" << kWidth - kRight + 12 << "\" y=\"" << y - 9 << "\" width=\"12\" height=\"12\" fill=\""
      << kPalette[i % 8] << "\"/><text x=\"" << kWidth - kRight + 30 << "\" y=\"" << y + 1
      << "\">" << escape(names[i]) << "</text>\n";
  }
}

}  // namespace

std::string svg_line_chart(const Axes& axes, const std::vector<Series>& series,
                           const std::vector<double>& markers) {
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = 0.0, y1 = -x0;
  for (const auto& s : series)
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i) {
      if (!std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y1 = 1;
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  y1 += 0.05 * (y1 - y0);
  const Frame f{x0, x1, y0, y1};

  std::ostringstream o;
  header(o, axes);
  axes_box(o, f, axes, true);
  for (double m : markers)
    o << "<line x1=\"" << num(f.px(m)) << "\" x2=\"" << num(f.px(m)) << "\" y1=\"" << kTop
      << "\" y2=\"" << kHeight - kBottom << "\" stroke=\"#999\" stroke-dasharray=\"4,3\"/>\n";
  std::vector<std::string> names;
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    names.push_back(s.label);
    o << "<polyline fill=\"none\" stroke-width=\"1.8\" stroke=\"" << kPalette[k % 8] << "\" points=\"";
    for (std::size_t i = 0; i < s.x.size() && i < s.y.size(); ++i)
      if (std::isfinite(s.y[i])) o << num(f.px(s.x[i])) << ',' << num(f.py(s.y[i])) << ' ';
    o << "\"/>\n";
  }
  legend(o, names);
  o << "</svg>\n";
  return o.str();
}

std::string svg_bar_chart(const Axes& axes, const std::vector<std::string>& categories,
                          const std::vector<std::string>& groups,
                          const std::vector<std::vector<double>>& values) {
  double y1 = 0.0;
  for (const auto& g : values)
    for (double v : g)
      if (std::isfinite(v)) y1 = std::max(y1, v);
  if (y1 <= 0) y1 = 1;
  const Frame f{0.0, static_cast<double>(std::max<std::size_t>(1, categories.size())), 0.0, y1 * 1.05};

  std::ostringstream o;
  header(o, axes);
  axes_box(o, f, axes, false);
  const double slot = f.px(1) - f.px(0);
  const double bar = 0.8 * slot / static_cast<double>(std::max<std::size_t>(1, groups.size()));
  for (std::size_t c = 0; c < categories.size(); ++c) {
    for (std::size_t g = 0; g < groups.size() && g < values.size(); ++g) {
      const double v = c < values[g].size() ? values[g][c] : 0.0;
      if (!std::isfinite(v)) continue;
      const double x = f.px(static_cast<double>(c)) + 0.1 * slot + bar * static_cast<double>(g);
      o << "<rect x=\"" << num(x) << "\" y=\"" << num(f.py(v)) << "\" width=\"" << num(bar)
        << "\" height=\"" << num(f.py(0) - f.py(v)) << "\" fill=\"" << kPalette[g % 8] << "\"/>\n";
    }
    o << "<text x=\"" << num(f.px(c + 0.5)) << "\" y=\"" << kHeight - kBottom + 18
      << "\" text-anchor=\"middle\">" << escape(categories[c]) << "</text>\n";
  }
  legend(o, groups);
  o << "</svg>\n";
  return o.str();
}

std::string svg_heatmap(const Axes& axes, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Eigen::MatrixXd& values) {
  std::ostringstream o;
  header(o, axes);
  const double rows = std::max<Eigen::Index>(1, values.rows());
  const double cols = std::max<Eigen::Index>(1, values.cols());
  const double w = (kWidth - kLeft - kRight) / cols, h = (kHeight - kTop - kBottom) / rows;
  const double hi = values.size() ? std::max(values.maxCoeff(), 1e-12) : 1.0;
  for (Eigen::Index r = 0; r < values.rows(); ++r) {
    for (Eigen::Index c = 0; c < values.cols(); ++c) {
      const double v = values(r, c);
      const int shade = std::isfinite(v) ? static_cast<int>(255 - 200 * std::clamp(v / hi, 0.0, 1.0)) : 255;
      const double x = kLeft + w * c, y = kTop + h * r;
      o << "<rect x=\"" << num(x) << "\" y=\"" << num(y) << "\" width=\"" << num(w) << "\" height=\""
        << num(h) << "\" fill=\"rgb(" << shade << ',' << shade << ",255)\" stroke=\"white\"/>"
        << "<text x=\"" << num(x + w / 2) << "\" y=\"" << num(y + h / 2 + 4)
        << "\" text-anchor=\"middle\" font-size=\"10\">" << (std::isfinite(v) ? tick(v) : "-")
        << "</text>\n";
    }
  }
  for (std::size_t r = 0; r < row_labels.size(); ++r)
    o << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(kTop + h * (r + 0.5) + 4)
      << "\" text-anchor=\"end\">" << escape(row_labels[r]) << "</text>\n";
  for (std::size_t c = 0; c < col_labels.size(); ++c)
    o << "<text x=\"" << num(kLeft + w * (c + 0.5)) << "\" y=\"" << kHeight - kBottom + 16
      << "\" text-anchor=\"middle\" font-size=\"10\">" << escape(col_labels[c]) << "</text>\n";
  o << "<text x=\"" << (kWidth - kRight + kLeft) / 2 << "\" y=\"" << kHeight - 16
    << "\" text-anchor=\"middle\">" << escape(axes.x_label) << "</text>\n"
    << "<text transform=\"translate(18," << (kHeight) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << escape(axes.y_label) << "</text>\n</svg>\n";
  return o.str();
}

}  // namespace avp
