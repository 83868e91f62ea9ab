#include "avp/stats.hpp"

#include <algorithm>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "avp/error.hpp"

namespace avp {

double chi_square_sf(double x, int dof) {
  require(dof >= 1, Errc::invalid_argument, "chi_square_sf: dof must be >= 1");
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_homogeneity(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                                       double min_expected) {
  require(a.size() == b.size() && a.size() > 0, Errc::invalid_argument,
          "chi_square_homogeneity: histogram sizes differ");
  require((a.array() >= 0).all() && (b.array() >= 0).all(), Errc::invalid_argument,
          "chi_square_homogeneity: negative counts");
  const double na = a.sum(), nb = b.sum(), n = na + nb;
  require(na > 0 && nb > 0, Errc::invalid_argument, "chi_square_homogeneity: empty sample");

  // Keep well-populated bins, pool the rest into one.
  std::vector<std::pair<double, double>> bins;
  std::pair<double, double> pooled{0.0, 0.0};
  for (Eigen::Index i = 0; i < a.size(); ++i) {
    const double total = a[i] + b[i];
    if (total <= 0.0) continue;
    if (std::min(total * na / n, total * nb / n) < min_expected)
      pooled = {pooled.first + a[i], pooled.second + b[i]};
    else
      bins.emplace_back(a[i], b[i]);
  }
  if (pooled.first + pooled.second > 0.0) {
    const double total = pooled.first + pooled.second;
    if (std::min(total * na / n, total * nb / n) >= min_expected || bins.empty()) {
      bins.push_back(pooled);
    } else {
      auto smallest = std::min_element(bins.begin(), bins.end(), [](const auto& x, const auto& y) {
        return x.first + x.second < y.first + y.second;
      });
      smallest->first += pooled.first;
      smallest->second += pooled.second;
    }
  }

  ChiSquareResult r;
  r.bins = static_cast<int>(bins.size());
  if (r.bins < 2) return r;
  for (const auto& [oa, ob] : bins) {
    const double total = oa + ob;
    const double ea = total * na / n, eb = total * nb / n;
    r.statistic += (oa - ea) * (oa - ea) / ea + (ob - eb) * (ob - eb) / eb;
  }
  r.dof = r.bins - 1;
  r.p_value = chi_square_sf(r.statistic, r.dof);
  return r;
}

}  // namespace avp
