#include "avp/hypotheses.hpp"

#include <cmath>
#include <cstdio>

#include "avp/error.hpp"
#include "avp/serialize.hpp"

namespace avp {

using nlohmann::json;

HypothesisSet::HypothesisSet(std::vector<Hypothesis> items) : items_(std::move(items)) {
  require(items_.size() >= 2, Errc::invalid_argument, "hypothesis set needs M >= 2");
  for (std::size_t i = 0; i + 1 < items_.size(); ++i)
    require(!items_[i].is_null(), Errc::invalid_argument,
            "null hypothesis must be last and unique");
  require(items_.back().is_null(), Errc::invalid_argument, "hypothesis set lacks the null entry");
}

HypothesisSet HypothesisSet::grid(const std::vector<int>& interest, int yaw_bins, int roll_bins) {
  require(!interest.empty(), Errc::invalid_argument, "interest set is empty");
  require(yaw_bins >= 1 && roll_bins >= 1, Errc::invalid_argument, "bins must be >= 1");
  std::vector<Hypothesis> items;
  for (int c : interest) {
    require(c >= 0, Errc::invalid_argument, "interest class ids must be >= 0");
    for (int iy = 0; iy < yaw_bins; ++iy) {
      for (int ir = 0; ir < roll_bins; ++ir) {
        Hypothesis h;
        h.class_id = c;
        h.yaw_deg = 360.0 * iy / yaw_bins;
        h.roll_deg = 360.0 * ir / roll_bins;
        h.orientation = yaw_pitch_roll(h.yaw_deg * M_PI / 180.0, 0.0, h.roll_deg * M_PI / 180.0);
        items.push_back(h);
      }
    }
  }
  items.push_back(Hypothesis{});
  return HypothesisSet(std::move(items));
}

std::vector<int> HypothesisSet::interest_classes() const {
  std::vector<int> out;
  for (const auto& h : items_)
    if (!h.is_null() && (out.empty() || out.back() != h.class_id)) out.push_back(h.class_id);
  return out;
}

std::string HypothesisSet::label(int i) const {
  const auto& h = (*this)[i];
  if (h.is_null()) return "null";
  char buf[64];
  if (h.roll_deg != 0.0)
    std::snprintf(buf, sizeof(buf), "c%d_y%g_r%g", h.class_id, h.yaw_deg, h.roll_deg);
  else
    std::snprintf(buf, sizeof(buf), "c%d_y%g", h.class_id, h.yaw_deg);
  return buf;
}

json HypothesisSet::to_json() const {
  json arr = json::array();
  for (const auto& h : items_) {
    arr.push_back({{"class", h.class_id},
                   {"yaw_deg", h.yaw_deg},
                   {"roll_deg", h.roll_deg},
                   {"orientation", quat_to_json(h.orientation)}});
  }
  return arr;
}

HypothesisSet HypothesisSet::from_json(const json& j) {
  std::vector<Hypothesis> items;
  for (const auto& e : j) {
    Hypothesis h;
    h.class_id = e.at("class").get<int>();
    h.yaw_deg = e.at("yaw_deg").get<double>();
    h.roll_deg = e.at("roll_deg").get<double>();
    h.orientation = quat_from_json(e.at("orientation"));
    items.push_back(h);
  }
  return HypothesisSet(std::move(items));
}

std::uint64_t HypothesisSet::hash() const { return hash_json(to_json()); }

}  // namespace avp
