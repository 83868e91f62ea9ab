#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "avp/geometry.hpp"

namespace avp {

inline constexpr int kNullClass = -1;

struct Hypothesis {
  int class_id = kNullClass;  // kNullClass: not an object of interest
  Quat orientation = Quat::Identity();
  double yaw_deg = 0.0;
  double roll_deg = 0.0;

  bool is_null() const { return class_id == kNullClass; }
};

/// Ordered hypothesis list: interest classes with their orientations, then
/// the single null hypothesis last.
class HypothesisSet {
 public:
  HypothesisSet() = default;
  explicit HypothesisSet(std::vector<Hypothesis> items);

  /// Orientations Rz(i_y * 360 / yaw_bins) * Rx(i_r * 360 / roll_bins) for
  /// every interest class, yaw-major.
  static HypothesisSet grid(const std::vector<int>& interest, int yaw_bins, int roll_bins = 1);

  int size() const { return static_cast<int>(items_.size()); }
  const Hypothesis& operator[](int i) const { return items_.at(i); }
  const std::vector<Hypothesis>& items() const { return items_; }
  int null_index() const { return size() - 1; }
  std::vector<int> interest_classes() const;
  std::string label(int i) const;

  nlohmann::json to_json() const;
  static HypothesisSet from_json(const nlohmann::json& j);
  std::uint64_t hash() const;

 private:
  std::vector<Hypothesis> items_;
};

}  // namespace avp
