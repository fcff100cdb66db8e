#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace uavlabel {

/// Box identifier. Unique within one frame of one submission; propagated and
/// tracked copies keep the id of the box they came from, so one id follows an
/// object through the video.
enum class BoxId : std::uint64_t {};

constexpr std::uint64_t to_underlying(BoxId id) { return static_cast<std::uint64_t>(id); }

using AccountId = std::string;

enum class Category { Animal, Human };
enum class BoxOrigin { Drawn, Propagated, Tracked, ReviewEdited };

std::string_view to_string(Category c);
std::string_view to_string(BoxOrigin o);
Category category_from_string(std::string_view s);
BoxOrigin origin_from_string(std::string_view s);

/// Display colour contract consumed by the UI: Animal is red, Human is blue.
std::string_view display_color(Category c);

inline constexpr int kDefaultMinBoxSize = 4;

/// Axis-aligned integer rectangle. Covers columns [x, x + width) and rows
/// [y, y + height); area is width * height.
struct BoundingBox {
  BoxId box_id{};
  int frame_index = 0;
  int x = 0;
  int y = 0;
  int width = 0;
  int height = 0;
  Category category = Category::Animal;
  BoxOrigin origin = BoxOrigin::Drawn;
  AccountId author_id;

  std::int64_t area() const { return std::int64_t{width} * height; }
  int right() const { return x + width; }
  int bottom() const { return y + height; }

  bool same_rect(const BoundingBox& o) const {
    return x == o.x && y == o.y && width == o.width && height == o.height;
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

std::int64_t intersection_area(const BoundingBox& a, const BoundingBox& b);

/// Intersection over union. Areas are exact 64-bit integers and the ratio is
/// taken once. Throws Error(Domain) if either box has zero area.
double iou(const BoundingBox& a, const BoundingBox& b);

/// Clips `box` to the frame. Returns nullopt when the clipped box is thinner
/// or shorter than `min_size`.
std::optional<BoundingBox> clamp_and_filter(const BoundingBox& box, int frame_width,
                                            int frame_height,
                                            int min_size = kDefaultMinBoxSize);

struct MatchPair {
  BoxId anchor_box_id{};
  BoxId other_box_id{};
  double iou = 0.0;

  friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

/// One-to-one greedy matching: all cross pairs with IoU >= threshold are
/// accepted in descending IoU order, ties by (anchor id, other id), skipping
/// pairs whose boxes are already taken. Pair order in the result is
/// acceptance order.
std::vector<MatchPair> greedy_match(std::span<const BoundingBox> set_a,
                                    std::span<const BoundingBox> set_b, double threshold);

}  // namespace uavlabel
