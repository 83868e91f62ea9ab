#include "avp/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <random>

#include <Eigen/Eigenvalues>

#include "avp/error.hpp"
#include "avp/kdtree.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

void FeatureConfig::validate() const {
  require(keypoints >= 1, Errc::invalid_argument, "features: keypoints must be >= 1");
  require(radius > 0.0 && normal_radius > 0.0, Errc::invalid_argument,
          "features: radii must be > 0");
  require(min_neighbors >= 3, Errc::invalid_argument, "features: min_neighbors must be >= 3");
  require(max_condition > 1.0, Errc::invalid_argument, "features: max_condition must be > 1");
  require(min_descriptors >= 1, Errc::invalid_argument, "features: min_descriptors must be >= 1");
  require(max_support == 0 || max_support >= min_neighbors, Errc::invalid_argument,
          "features: max_support must be 0 or >= min_neighbors");
}

json FeatureConfig::to_json() const {
  return {{"keypoints", keypoints},         {"radius", radius},
          {"normal_radius", normal_radius}, {"min_neighbors", min_neighbors},
          {"max_condition", max_condition}, {"min_descriptors", min_descriptors},
          {"max_support", max_support},
          {"dimension", kDescriptorDim}};
}

FeatureConfig FeatureConfig::from_json(const json& j) {
  reject_unknown(j,
                 {"keypoints", "radius", "normal_radius", "min_neighbors", "max_condition",
                  "min_descriptors", "max_support", "dimension"},
                 "features");
  FeatureConfig c;
  c.keypoints = j.value("keypoints", c.keypoints);
  c.radius = j.value("radius", c.radius);
  c.normal_radius = j.value("normal_radius", 0.5 * c.radius);
  c.min_neighbors = j.value("min_neighbors", c.min_neighbors);
  c.max_condition = j.value("max_condition", c.max_condition);
  c.min_descriptors = j.value("min_descriptors", c.min_descriptors);
  c.max_support = j.value("max_support", c.max_support);
  if (j.contains("dimension"))
    require(j["dimension"].get<int>() == kDescriptorDim, Errc::io,
            "descriptor dimension mismatch");
  c.validate();
  return c;
}

std::vector<int> sample_keypoint_indices(std::size_t cloud_size, int k, std::uint64_t seed) {
  require(cloud_size > 0, Errc::degenerate_input, "sample_keypoints: empty cloud");
  require(k >= 1, Errc::invalid_argument, "sample_keypoints: k must be >= 1");
  std::vector<int> idx(cloud_size);
  std::iota(idx.begin(), idx.end(), 0);
  if (cloud_size <= static_cast<std::size_t>(k)) return idx;
  // Partial Fisher-Yates.
  std::mt19937_64 rng(seed);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, cloud_size - 1);
    std::swap(idx[i], idx[pick(rng)]);
  }
  idx.resize(k);
  return idx;
}

PointCloud sample_keypoints(const PointCloud& cloud, int k, std::uint64_t seed) {
  PointCloud out;
  for (int i : sample_keypoint_indices(cloud.size(), k, seed)) out.push_back(cloud[i]);
  return out;
}

Vec3 fit_normal(const std::vector<Vec3>& pts, Vec3* eigenvalues) {
  Vec3 mean = Vec3::Zero();
  for (const auto& p : pts) mean += p;
  mean /= static_cast<double>(pts.size());
  Mat3 cov = Mat3::Zero();
  for (const auto& p : pts) {
    const Vec3 d = p - mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(pts.size());
  Eigen::SelfAdjointEigenSolver<Mat3> es(cov);
  Vec3 n = es.eigenvectors().col(0);
  if (n.z() > 0.0) n = -n;
  if (eigenvalues) *eigenvalues = es.eigenvalues();
  return n;
}

namespace {

bool lex_less(const Vec3& a, const Vec3& b) {
  if (a.x() != b.x()) return a.x() < b.x();
  if (a.y() != b.y()) return a.y() < b.y();
  return a.z() < b.z();
}

int bin(double value, double lo, double hi) {
  const int b = static_cast<int>(std::floor(kAngleBins * (value - lo) / (hi - lo)));
  return std::clamp(b, 0, kAngleBins - 1);
}

// Darboux-frame angles between two oriented points, with the source chosen
// as the one whose normal makes the smaller angle with the connecting line.
void accumulate_pair(const Vec3& p1, const Vec3& n1, const Vec3& p2, const Vec3& n2,
                     Descriptor& hist) {
  Vec3 d = p2 - p1;
  const double len = d.norm();
  double f1 = 0, f2 = 0, f3 = 0;
  if (len > 0.0) {
    const double a1 = n1.dot(d) / len;
    const double a2 = n2.dot(d) / len;
    const Vec3* src = &n1;
    const Vec3* dst = &n2;
    f3 = a1;
    if (std::abs(a1) < std::abs(a2)) {
      src = &n2;
      dst = &n1;
      d = -d;
      f3 = -a2;
    }
    Vec3 v = d.cross(*src);
    const double vn = v.norm();
    if (vn > 0.0) {
      v /= vn;
      const Vec3 w = src->cross(v);
      f2 = v.dot(*dst);
      f1 = std::atan2(w.dot(*dst), src->dot(*dst));
    } else {
      f3 = 0.0;
    }
  }
  hist[bin(f1, -M_PI, M_PI)] += 1.0;
  hist[kAngleBins + bin(f2, -1.0, 1.0)] += 1.0;
  hist[2 * kAngleBins + bin(f3, -1.0, 1.0)] += 1.0;
}

// Shared neighbourhood machinery for one cloud; normals are computed lazily.
class Support {
 public:
  Support(const PointCloud& cloud, const FeatureConfig& config)
      : cloud_(cloud), config_(config), tree_(cloud), normal_(cloud.size()),
        has_normal_(cloud.size(), 0) {}

  std::optional<Descriptor> describe(const Vec3& kp) {
    tree_.radius_search(kp, config_.radius, scratch_);
    if (static_cast<int>(scratch_.size()) < config_.min_neighbors) return std::nullopt;
    if (config_.max_support > 0 && static_cast<int>(scratch_.size()) > config_.max_support) {
      auto closer = [&](int a, int b) {
        const double da = (cloud_[a] - kp).squaredNorm(), db = (cloud_[b] - kp).squaredNorm();
        return da < db || (da == db && a < b);
      };
      std::nth_element(scratch_.begin(), scratch_.begin() + config_.max_support, scratch_.end(),
                       closer);
      scratch_.resize(config_.max_support);
    }
    canonical(scratch_);

    support_pts_.clear();
    for (int i : scratch_) support_pts_.push_back(cloud_[i]);
    Vec3 ev;
    const Vec3 fallback = fit_normal(support_pts_, &ev);
    if (!(ev[1] > 0.0) || ev[2] / ev[1] > config_.max_condition) return std::nullopt;

    normals_.clear();
    const std::vector<int> members = scratch_;
    for (int i : members) normals_.push_back(normal_at(i, fallback));

    Descriptor hist = Descriptor::Zero();
    const std::size_t n = members.size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = a + 1; b < n; ++b)
        accumulate_pair(support_pts_[a], normals_[a], support_pts_[b], normals_[b], hist);
    hist /= hist.sum();
    return hist;
  }

 private:
  void canonical(std::vector<int>& ids) const {
    std::sort(ids.begin(), ids.end(), [&](int a, int b) {
      if (cloud_[a] == cloud_[b]) return a < b;
      return lex_less(cloud_[a], cloud_[b]);
    });
  }

  Vec3 normal_at(int i, const Vec3& fallback) {
    if (has_normal_[i] == 1) return normal_[i];
    if (has_normal_[i] == 2) return fallback;
    tree_.radius_search(cloud_[i], config_.normal_radius, nscratch_);
    if (nscratch_.size() < 3) {
      has_normal_[i] = 2;
      return fallback;
    }
    canonical(nscratch_);
    npts_.clear();
    for (int k : nscratch_) npts_.push_back(cloud_[k]);
    normal_[i] = fit_normal(npts_);
    has_normal_[i] = 1;
    return normal_[i];
  }

  const PointCloud& cloud_;
  const FeatureConfig& config_;
  KdTree tree_;
  std::vector<Vec3> normal_;
  std::vector<char> has_normal_;
  std::vector<int> scratch_, nscratch_;
  std::vector<Vec3> support_pts_, normals_, npts_;
};

}  // namespace

Descriptor compute_descriptor(const PointCloud& cloud, const Vec3& kp, double radius,
                              const FeatureConfig& config) {
  require(radius > 0.0, Errc::invalid_argument, "compute_descriptor: radius must be > 0");
  FeatureConfig c = config;
  c.radius = radius;
  Support support(cloud, c);
  auto d = support.describe(kp);
  require(d.has_value(), Errc::degenerate_descriptor,
          "compute_descriptor: neighbourhood too small or ill-conditioned");
  return *d;
}

FeatureSet extract_features(const PointCloud& cloud, const FeatureConfig& config,
                            std::uint64_t seed) {
  config.validate();
  const auto kps = sample_keypoint_indices(cloud.size(), config.keypoints, seed);
  Support support(cloud, config);
  FeatureSet fs;
  fs.descriptors.reserve(kps.size());
  for (int i : kps) {
    if (auto d = support.describe(cloud[i])) fs.descriptors.push_back(*d);
  }
  fs.degenerate = static_cast<int>(fs.descriptors.size()) < config.min_descriptors;
  return fs;
}

FeatureSet extract_features(const PointCloud& cloud, int k, double radius, std::uint64_t seed) {
  FeatureConfig c;
  c.keypoints = k;
  c.radius = radius;
  c.normal_radius = 0.5 * radius;
  return extract_features(cloud, c, seed);
}

}  // namespace avp
