#pragma once

#include <Eigen/Core>

namespace avp {

struct ChiSquareResult {
  double statistic = 0.0;
  int dof = 0;
  double p_value = 1.0;
  int bins = 0;  // after pooling
};

/// Upper tail of the chi-square distribution.
double chi_square_sf(double x, int dof);

/// Two-sample homogeneity test on histograms over the same bins. Bins whose
/// expected count falls below `min_expected` in either sample are pooled.
ChiSquareResult chi_square_homogeneity(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                       double min_expected = 5.0);

}  // namespace avp
