#pragma once

#include <optional>
#include <span>
#include <vector>

#include "uavlabel/image.hpp"

namespace uavlabel {

enum class Connectivity { Four = 4, Eight = 8 };

/// Summary of one foreground component. Coordinates are mask-local.
struct ComponentStats {
  long pixel_count = 0;
  double centroid_row = 0.0;
  double centroid_col = 0.0;
  int min_row = 0;
  int max_row = 0;
  int min_col = 0;
  int max_col = 0;

  friend bool operator==(const ComponentStats&, const ComponentStats&) = default;
};

/// Two-pass labeling with a union-find equivalence table. Components come
/// back ordered by (min_row, min_col) of their extent, then by raster order
/// of their first pixel.
std::vector<ComponentStats> connected_components(const BinaryMask& mask,
                                                 Connectivity connectivity = Connectivity::Eight);

/// Largest component by pixel count; ties go to the earliest in the
/// ordering above.
std::optional<ComponentStats> select_largest(std::span<const ComponentStats> components);

}  // namespace uavlabel
