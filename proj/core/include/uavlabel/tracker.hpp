#pragma once

#include <span>
#include <vector>

#include "uavlabel/components.hpp"
#include "uavlabel/geometry.hpp"
#include "uavlabel/image.hpp"

namespace uavlabel {

inline constexpr int kMaxTrackerBuffer = 50;

struct TrackerConfig {
  int buffer = 10;                // search margin in px; the UI slider, 0..50
  int brightness_threshold = 200; // pixels >= this are foreground
  long size_threshold = 2500;     // boxes with area above this are copied, not tracked
  Connectivity connectivity = Connectivity::Eight;

  /// Throws Error(Configuration) when a field is out of range.
  void validate() const;
};

/// The buffered search region of a box, thresholded.
struct ThresholdedRegion {
  int x = 0;  // region offset in frame coordinates
  int y = 0;
  BinaryMask mask;
};

/// Expands `rect` by `buffer` on every side, clips to the frame, and marks
/// pixels with intensity >= `threshold`. A threshold above 255 selects
/// nothing. Throws Error(Domain) if the region misses the frame entirely.
ThresholdedRegion threshold_region(const FrameImage& frame, const BoundingBox& rect, int buffer,
                                   int threshold);

/// Moves every box from frame k onto `next_frame` (frame k + 1).
///
/// Boxes larger than `size_threshold` are copied as they are. Smaller boxes
/// have their buffered search region thresholded; if any bright component is
/// found the box keeps its size and is re-centred on the largest component's
/// centroid (rounded to the nearest pixel, then shifted inside the frame),
/// otherwise it is copied. Copies carry origin Propagated, moved boxes
/// origin Tracked. Output order equals input order.
std::vector<BoundingBox> track_boxes(std::span<const BoundingBox> prev_boxes,
                                     const FrameImage& next_frame, const TrackerConfig& cfg);

/// Plain propagation: same rectangle on the next frame, origin Propagated.
std::vector<BoundingBox> copy_boxes(std::span<const BoundingBox> prev_boxes);

}  // namespace uavlabel
