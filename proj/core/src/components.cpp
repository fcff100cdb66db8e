#include "uavlabel/components.hpp"

#include <algorithm>
#include <utility>

namespace uavlabel {

namespace {

class EquivalenceTable {
 public:
  int make() {
    parent_.push_back(static_cast<int>(parent_.size()));
    return parent_.back();
  }

  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }

  // The smaller root wins so that roots follow first-seen raster order.
  void join(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a;
    else parent_[a] = b;
  }

 private:
  std::vector<int> parent_;
};

struct Accumulator {
  long count = 0;
  long long row_sum = 0;
  long long col_sum = 0;
  int min_row = 0, max_row = 0, min_col = 0, max_col = 0;
  long first_pixel = 0;
};

}  // namespace

std::vector<ComponentStats> connected_components(const BinaryMask& mask, Connectivity connectivity) {
  const int w = mask.width;
  const int h = mask.height;
  if (w <= 0 || h <= 0) return {};

  std::vector<int> labels(static_cast<std::size_t>(w) * h, -1);
  EquivalenceTable table;
  const bool eight = connectivity == Connectivity::Eight;

  auto label_at = [&](int r, int c) { return labels[static_cast<std::size_t>(r) * w + c]; };

  // First pass: provisional labels from the already-visited neighbours
  // (west, north-west, north, north-east).
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      int neighbours[4];
      int n = 0;
      if (c > 0 && mask.at(r, c - 1)) neighbours[n++] = label_at(r, c - 1);
      if (r > 0) {
        if (mask.at(r - 1, c)) neighbours[n++] = label_at(r - 1, c);
        if (eight && c > 0 && mask.at(r - 1, c - 1)) neighbours[n++] = label_at(r - 1, c - 1);
        if (eight && c + 1 < w && mask.at(r - 1, c + 1)) neighbours[n++] = label_at(r - 1, c + 1);
      }
      int& here = labels[static_cast<std::size_t>(r) * w + c];
      if (n == 0) {
        here = table.make();
        continue;
      }
      here = *std::min_element(neighbours, neighbours + n);
      for (int i = 0; i < n; ++i) table.join(here, neighbours[i]);
    }
  }

  // Second pass: resolve equivalences and accumulate statistics per root.
  std::vector<int> slot_of_root;
  std::vector<Accumulator> acc;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const int provisional = label_at(r, c);
      if (provisional < 0) continue;
      const int root = table.find(provisional);
      if (static_cast<std::size_t>(root) >= slot_of_root.size()) slot_of_root.resize(root + 1, -1);
      if (slot_of_root[root] < 0) {
        slot_of_root[root] = static_cast<int>(acc.size());
        acc.push_back({0, 0, 0, r, r, c, c, static_cast<long>(r) * w + c});
      }
      Accumulator& a = acc[slot_of_root[root]];
      ++a.count;
      a.row_sum += r;
      a.col_sum += c;
      a.min_row = std::min(a.min_row, r);
      a.max_row = std::max(a.max_row, r);
      a.min_col = std::min(a.min_col, c);
      a.max_col = std::max(a.max_col, c);
    }
  }

  std::stable_sort(acc.begin(), acc.end(), [](const Accumulator& l, const Accumulator& r) {
    if (l.min_row != r.min_row) return l.min_row < r.min_row;
    if (l.min_col != r.min_col) return l.min_col < r.min_col;
    return l.first_pixel < r.first_pixel;
  });

  std::vector<ComponentStats> out;
  out.reserve(acc.size());
  for (const auto& a : acc) {
    out.push_back({a.count, static_cast<double>(a.row_sum) / static_cast<double>(a.count),
                   static_cast<double>(a.col_sum) / static_cast<double>(a.count), a.min_row,
                   a.max_row, a.min_col, a.max_col});
  }
  return out;
}

std::optional<ComponentStats> select_largest(std::span<const ComponentStats> components) {
  if (components.empty()) return std::nullopt;
  const ComponentStats* best = &components.front();
  for (const auto& c : components.subspan(1)) {
    const bool earlier = std::pair(c.min_row, c.min_col) < std::pair(best->min_row, best->min_col);
    if (c.pixel_count > best->pixel_count || (c.pixel_count == best->pixel_count && earlier)) {
      best = &c;
    }
  }
  return *best;
}

}  // namespace uavlabel
