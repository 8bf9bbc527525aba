#include "focal/svg.h"

#include <algorithm>
#include <array>

#include <fmt/format.h>

namespace focal::svg {
namespace {

constexpr std::array<const char*, 6> kPalette = {"#1f77b4", "#d62728", "#2ca02c",
                                                 "#9467bd", "#ff7f0e", "#8c564b"};

std::string Escape(const std::string& text) {
  std::string out;
  for (char c : text) {
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

}  // namespace

std::string LinePlot(const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series,
                     double y_min, double y_max) {
  constexpr double kWidth = 640, kHeight = 400;
  constexpr double kLeft = 60, kRight = 150, kTop = 40, kBottom = 50;
  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;

  double x_min = 0.0, x_max = 1.0;
  bool first = true;
  for (const auto& s : series) {
    for (double x : s.xs) {
      if (first) {
        x_min = x_max = x;
        first = false;
      }
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
    }
  }
  if (x_max == x_min) x_max = x_min + 1.0;
  if (y_max == y_min) y_max = y_min + 1.0;
  auto px = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  auto py = [&](double y) { return kTop + (1.0 - (y - y_min) / (y_max - y_min)) * plot_h; };

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      kWidth, kHeight);
  out += fmt::format("<text x=\"{:.1f}\" y=\"24\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     kLeft + plot_w / 2, Escape(title));
  out += fmt::format(
      "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"black\"/>\n",
      kLeft, kTop, plot_w, plot_h);
  for (int t = 0; t <= 4; ++t) {
    const double y = y_min + (y_max - y_min) * t / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.2f}</text>\n",
                       kLeft - 6, py(y) + 4, y);
    const double x = x_min + (x_max - x_min) * t / 4.0;
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.0f}</text>\n",
                       px(x), kTop + plot_h + 16, x);
  }
  out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + plot_w / 2, kHeight - 12, Escape(x_label));
  out += fmt::format(
      "<text x=\"16\" y=\"{:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {:.1f})\">{}</text>\n",
      kTop + plot_h / 2, kTop + plot_h / 2, Escape(y_label));

  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kPalette[s % kPalette.size()];
    std::string points;
    const auto& ser = series[s];
    for (std::size_t n = 0; n < std::min(ser.xs.size(), ser.ys.size()); ++n) {
      points += fmt::format("{:.2f},{:.2f} ", px(ser.xs[n]), py(ser.ys[n]));
    }
    out += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.5\" points=\"{}\"/>\n",
                       color, points);
    const double ly = kTop + 14 + 18 * static_cast<double>(s);
    out += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"{3}\" stroke-width=\"2\"/>\n",
                       kLeft + plot_w + 10, ly, kLeft + plot_w + 30, color);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", kLeft + plot_w + 36,
                       ly + 4, Escape(ser.label));
  }
  out += "</svg>\n";
  return out;
}

std::string Heatmap(const std::string& title, const std::string& row_axis,
                    const std::string& col_axis,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values) {
  constexpr double kCell = 56, kLeft = 90, kTop = 60;
  const double width = kLeft + kCell * static_cast<double>(col_labels.size()) + 20;
  const double height = kTop + kCell * static_cast<double>(row_labels.size()) + 40;
  double max_value = 0.0;
  for (const auto& row : values) {
    for (double v : row) max_value = std::max(max_value, v);
  }
  if (max_value <= 0.0) max_value = 1.0;

  std::string out = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" "
      "viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      width, height);
  out += fmt::format("<text x=\"{:.1f}\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n",
                     width / 2, Escape(title));
  out += fmt::format("<text x=\"{:.1f}\" y=\"40\" text-anchor=\"middle\">{}</text>\n",
                     kLeft + kCell * static_cast<double>(col_labels.size()) / 2, Escape(col_axis));
  out += fmt::format("<text x=\"12\" y=\"{:.1f}\">{}</text>\n", kTop - 6, Escape(row_axis));
  for (std::size_t c = 0; c < col_labels.size(); ++c) {
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{}</text>\n",
                       kLeft + kCell * (static_cast<double>(c) + 0.5), kTop - 6,
                       Escape(col_labels[c]));
  }
  for (std::size_t r = 0; r < row_labels.size(); ++r) {
    const double y = kTop + kCell * static_cast<double>(r);
    out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{}</text>\n",
                       kLeft - 8, y + kCell / 2 + 4, Escape(row_labels[r]));
    for (std::size_t c = 0; c < col_labels.size(); ++c) {
      const double v = r < values.size() && c < values[r].size() ? values[r][c] : 0.0;
      const int shade = 255 - static_cast<int>(200.0 * v / max_value);
      const double x = kLeft + kCell * static_cast<double>(c);
      out += fmt::format(
          "<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" "
          "fill=\"rgb({},{},255)\" stroke=\"white\"/>\n",
          x, y, kCell, kCell, shade, shade);
      out += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.3g}</text>\n",
                         x + kCell / 2, y + kCell / 2 + 4, v);
    }
  }
  out += "</svg>\n";
  return out;
}

}  // namespace focal::svg
