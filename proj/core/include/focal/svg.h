#ifndef FOCAL_SVG_H_
#define FOCAL_SVG_H_

#include <string>
#include <vector>

namespace focal::svg {

struct Series {
  std::string label;
  std::vector<double> xs;
  std::vector<double> ys;
};

// Standalone SVG line chart; the y axis spans [y_min, y_max].
std::string LinePlot(const std::string& title, const std::string& x_label,
                     const std::string& y_label, const std::vector<Series>& series,
                     double y_min, double y_max);

// Row-major heatmap with one annotated cell per value.
std::string Heatmap(const std::string& title, const std::string& row_axis,
                    const std::string& col_axis,
                    const std::vector<std::string>& row_labels,
                    const std::vector<std::string>& col_labels,
                    const std::vector<std::vector<double>>& values);

}  // namespace focal::svg

#endif  // FOCAL_SVG_H_
