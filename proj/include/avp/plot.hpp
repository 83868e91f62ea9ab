#pragma once

#include <string>
#include <vector>

#include <Eigen/Core>

namespace avp {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Axes {
  std::string title;
  std::string x_label;
  std::string y_label;
};

/// Line chart; `markers` draws dashed vertical guides at those x values.
std::string svg_line_chart(const Axes& axes, const std::vector<Series>& series,
                           const std::vector<double>& markers = {});

/// Grouped bars: values[g][c] is group g (legend entry) at category c.
std::string svg_bar_chart(const Axes& axes, const std::vector<std::string>& categories,
                          const std::vector<std::string>& groups,
                          const std::vector<std::vector<double>>& values);

/// Annotated heat map of a matrix, rows top to bottom.
std::string svg_heatmap(const Axes& axes, const std::vector<std::string>& row_labels,
                        const std::vector<std::string>& col_labels, const Eigen::MatrixXd& values);

}  // namespace avp
