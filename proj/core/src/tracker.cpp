#include "uavlabel/tracker.hpp"

#include <algorithm>
#include <cmath>

#include "uavlabel/error.hpp"

namespace uavlabel {

void TrackerConfig::validate() const {
  if (buffer < 0 || buffer > kMaxTrackerBuffer) {
    fail(ErrorKind::Configuration, "bad_buffer", "tracker buffer must lie in [0, 50]");
  }
  if (brightness_threshold < 0 || brightness_threshold > 255) {
    fail(ErrorKind::Configuration, "bad_threshold", "brightness threshold must lie in [0, 255]");
  }
  if (size_threshold <= 0) {
    fail(ErrorKind::Configuration, "bad_size_threshold", "size threshold must be positive");
  }
}

ThresholdedRegion threshold_region(const FrameImage& frame, const BoundingBox& rect, int buffer,
                                   int threshold) {
  if (rect.width <= 0 || rect.height <= 0) {
    fail(ErrorKind::Domain, "zero_area_box", "search rectangle must have positive area");
  }
  const int x0 = std::max(rect.x - buffer, 0);
  const int y0 = std::max(rect.y - buffer, 0);
  const int x1 = std::min(rect.right() + buffer, frame.width);
  const int y1 = std::min(rect.bottom() + buffer, frame.height);
  if (x1 <= x0 || y1 <= y0) {
    fail(ErrorKind::Domain, "region_outside_frame", "search region lies outside the frame");
  }

  ThresholdedRegion region{x0, y0, BinaryMask(x1 - x0, y1 - y0)};
  for (int r = 0; r < region.mask.height; ++r) {
    for (int c = 0; c < region.mask.width; ++c) {
      if (frame.at(y0 + r, x0 + c) >= threshold) region.mask.set(r, c);
    }
  }
  return region;
}

namespace {

// Top-left coordinate that centres a span of `extent` pixels on `center`,
// then shifted so the span stays inside [0, limit).
int place(double center, int extent, int limit) {
  const int start = static_cast<int>(std::floor(center - (extent - 1) / 2.0 + 0.5));
  if (extent >= limit) return 0;
  return std::clamp(start, 0, limit - extent);
}

BoundingBox carried(const BoundingBox& box, int frame_index, BoxOrigin origin) {
  BoundingBox out = box;
  out.frame_index = frame_index;
  out.origin = origin;
  return out;
}

}  // namespace

std::vector<BoundingBox> track_boxes(std::span<const BoundingBox> prev_boxes,
                                     const FrameImage& next_frame, const TrackerConfig& cfg) {
  cfg.validate();
  const int next_index = next_frame.frame_index;
  for (const auto& b : prev_boxes) {
    if (b.frame_index + 1 != next_index) {
      fail(ErrorKind::Domain, "frame_mismatch", "tracked boxes must come from the preceding frame");
    }
  }

  std::vector<BoundingBox> out;
  out.reserve(prev_boxes.size());
  for (const auto& box : prev_boxes) {
    if (box.area() > cfg.size_threshold) {
      out.push_back(carried(box, next_index, BoxOrigin::Propagated));
      continue;
    }
    const auto region = threshold_region(next_frame, box, cfg.buffer, cfg.brightness_threshold);
    const auto components = connected_components(region.mask, cfg.connectivity);
    const auto largest = select_largest(components);
    if (!largest) {
      out.push_back(carried(box, next_index, BoxOrigin::Propagated));
      continue;
    }

    BoundingBox moved = carried(box, next_index, BoxOrigin::Tracked);
    moved.x = place(region.x + largest->centroid_col, box.width, next_frame.width);
    moved.y = place(region.y + largest->centroid_row, box.height, next_frame.height);
    moved.width = std::min(box.width, next_frame.width);
    moved.height = std::min(box.height, next_frame.height);
    out.push_back(moved);
  }
  return out;
}

std::vector<BoundingBox> copy_boxes(std::span<const BoundingBox> prev_boxes) {
  std::vector<BoundingBox> out;
  out.reserve(prev_boxes.size());
  for (const auto& b : prev_boxes) out.push_back(carried(b, b.frame_index + 1, BoxOrigin::Propagated));
  return out;
}

}  // namespace uavlabel
