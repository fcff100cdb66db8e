#include "uavlabel/geometry.hpp"

#include <algorithm>

#include "uavlabel/error.hpp"

namespace uavlabel {

std::string_view to_string(Category c) {
  return c == Category::Animal ? "Animal" : "Human";
}

std::string_view to_string(BoxOrigin o) {
  switch (o) {
    case BoxOrigin::Drawn: return "Drawn";
    case BoxOrigin::Propagated: return "Propagated";
    case BoxOrigin::Tracked: return "Tracked";
    case BoxOrigin::ReviewEdited: return "ReviewEdited";
  }
  return "Drawn";
}

Category category_from_string(std::string_view s) {
  if (s == "Animal") return Category::Animal;
  if (s == "Human") return Category::Human;
  fail(ErrorKind::Validation, "bad_category", "unknown category '" + std::string(s) + "'");
}

BoxOrigin origin_from_string(std::string_view s) {
  if (s == "Drawn") return BoxOrigin::Drawn;
  if (s == "Propagated") return BoxOrigin::Propagated;
  if (s == "Tracked") return BoxOrigin::Tracked;
  if (s == "ReviewEdited") return BoxOrigin::ReviewEdited;
  fail(ErrorKind::Validation, "bad_origin", "unknown box origin '" + std::string(s) + "'");
}

std::string_view display_color(Category c) {
  return c == Category::Animal ? "red" : "blue";
}

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b) {
  const std::int64_t w =
      std::int64_t{std::min(a.right(), b.right())} - std::max(a.x, b.x);
  const std::int64_t h =
      std::int64_t{std::min(a.bottom(), b.bottom())} - std::max(a.y, b.y);
  if (w <= 0 || h <= 0) return 0;
  return w * h;
}

namespace {

struct Overlap {
  std::int64_t inter = 0;
  std::int64_t uni = 1;

  double ratio() const { return static_cast<double>(inter) / static_cast<double>(uni); }
};

Overlap overlap(const BoundingBox& a, const BoundingBox& b) {
  if (a.width <= 0 || a.height <= 0 || b.width <= 0 || b.height <= 0) {
    fail(ErrorKind::Domain, "zero_area_box", "IoU is undefined for a box without positive area");
  }
  const std::int64_t inter = intersection_area(a, b);
  return {inter, a.area() + b.area() - inter};
}

// a > b for exact rationals; both denominators are positive.
bool greater(const Overlap& a, const Overlap& b) {
  return static_cast<__int128>(a.inter) * b.uni > static_cast<__int128>(b.inter) * a.uni;
}

}  // namespace

double iou(const BoundingBox& a, const BoundingBox& b) { return overlap(a, b).ratio(); }

std::optional<BoundingBox> clamp_and_filter(const BoundingBox& box, int frame_width,
                                            int frame_height, int min_size) {
  if (frame_width <= 0 || frame_height <= 0) {
    fail(ErrorKind::Domain, "bad_frame_size", "frame dimensions must be positive");
  }
  const int x0 = std::clamp(box.x, 0, frame_width);
  const int y0 = std::clamp(box.y, 0, frame_height);
  const int x1 = std::clamp(box.right(), 0, frame_width);
  const int y1 = std::clamp(box.bottom(), 0, frame_height);
  if (x1 - x0 < min_size || y1 - y0 < min_size || x1 <= x0 || y1 <= y0) return std::nullopt;

  BoundingBox out = box;
  out.x = x0;
  out.y = y0;
  out.width = x1 - x0;
  out.height = y1 - y0;
  return out;
}

std::vector<MatchPair> greedy_match(std::span<const BoundingBox> set_a,
                                    std::span<const BoundingBox> set_b, double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0)) {
    fail(ErrorKind::Domain, "bad_threshold", "matching threshold must lie in (0, 1]");
  }
  const BoundingBox* first = !set_a.empty() ? &set_a.front()
                             : !set_b.empty() ? &set_b.front()
                                              : nullptr;
  if (first == nullptr) return {};
  for (const auto* set : {&set_a, &set_b}) {
    for (const auto& b : *set) {
      if (b.frame_index != first->frame_index) {
        fail(ErrorKind::Domain, "mixed_frames", "greedy_match requires boxes from one frame");
      }
    }
  }

  struct Candidate {
    std::size_t a;
    std::size_t b;
    Overlap ov;
  };
  std::vector<Candidate> candidates;
  for (std::size_t i = 0; i < set_a.size(); ++i) {
    for (std::size_t j = 0; j < set_b.size(); ++j) {
      const Overlap ov = overlap(set_a[i], set_b[j]);
      if (ov.inter > 0 && ov.ratio() >= threshold) candidates.push_back({i, j, ov});
    }
  }

  std::sort(candidates.begin(), candidates.end(), [&](const Candidate& l, const Candidate& r) {
    if (greater(l.ov, r.ov)) return true;
    if (greater(r.ov, l.ov)) return false;
    const auto la = to_underlying(set_a[l.a].box_id), ra = to_underlying(set_a[r.a].box_id);
    if (la != ra) return la < ra;
    const auto lb = to_underlying(set_b[l.b].box_id), rb = to_underlying(set_b[r.b].box_id);
    if (lb != rb) return lb < rb;
    // Equal ids within one set only happen for malformed input; keep it total.
    return std::pair(l.a, l.b) < std::pair(r.a, r.b);
  });

  std::vector<bool> used_a(set_a.size(), false);
  std::vector<bool> used_b(set_b.size(), false);
  std::vector<MatchPair> out;
  for (const auto& c : candidates) {
    if (used_a[c.a] || used_b[c.b]) continue;
    used_a[c.a] = used_b[c.b] = true;
    out.push_back({set_a[c.a].box_id, set_b[c.b].box_id, c.ov.ratio()});
  }
  return out;
}

}  // namespace uavlabel
