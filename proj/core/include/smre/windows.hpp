#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

#include "smre/core.hpp"

namespace smre {

// An axis-aligned cube {anchor_i <= x_i < anchor_i + side}. Anchors are
// 0-based grid coordinates.
struct Window {
  std::array<int, kMaxDim> anchor{};
  int side = 1;

  std::size_t cardinality(int dim) const;
  bool contains(const Grid& grid, std::size_t index) const;

  friend bool operator==(const Window&, const Window&) = default;
};

bool intersects(const Window& a, const Window& b, int dim);

// All cubes of the grid with side lengths in [min_side, max_side], ordered by
// side and then lexicographically by anchor. The windows are generated on
// demand; only the per-side offsets are stored.
class WindowSystem {
 public:
  const Grid& grid() const { return grid_; }
  int min_side() const { return min_side_; }
  int max_side() const { return max_side_; }

  std::size_t size() const { return offsets_.back(); }
  std::size_t count_for_side(int side) const;
  std::size_t first_index_of_side(int side) const;
  int side_of(std::size_t index) const;

  Window operator[](std::size_t index) const;
  std::size_t index_of(const Window& w) const;

  // Flat grid indices covered by the window, in storage order.
  std::vector<std::size_t> support(const Window& w) const;

  // Calls f(offset, length) for each contiguous run of the window's support
  // (runs along the last axis).
  template <class F>
  void for_each_run(const Window& w, F&& f) const;

 private:
  friend WindowSystem enumerate(const Grid& grid, int min_side, int max_side);
  WindowSystem(Grid grid, int min_side, int max_side);

  Grid grid_;
  int min_side_ = 1;
  int max_side_ = 1;
  // offsets_[k] = index of the first window with side min_side + k.
  std::vector<std::size_t> offsets_;
};

// Throws InvalidArgument unless 1 <= min_side <= max_side <= grid.side().
WindowSystem enumerate(const Grid& grid, int min_side, int max_side);

// Closed form: sum over s of (m - s + 1)^d.
std::size_t window_count(const Grid& grid, int min_side, int max_side);

// Residue-class key of a group: all windows with the given side whose
// anchors are congruent to `residue` modulo the side.
struct GroupKey {
  int side = 1;
  std::array<int, kMaxDim> residue{};
};

// A partition of constraint indices into groups of pairwise disjoint
// supports.
class Partition {
 public:
  static Partition from_groups(std::vector<std::vector<std::size_t>> groups);

  std::size_t size() const;
  std::vector<std::size_t> group(std::size_t j) const;

  bool structured() const { return system_.has_value(); }
  // Only valid for structured partitions.
  const GroupKey& key(std::size_t j) const { return keys_[j]; }
  const WindowSystem& system() const { return *system_; }

  // Calls f(window_index, window) for every window of group j, in index
  // order. Only valid for structured partitions.
  template <class F>
  void for_each_window(std::size_t j, F&& f) const;

 private:
  friend Partition partition_disjoint(const WindowSystem& system);

  std::optional<WindowSystem> system_;
  std::vector<GroupKey> keys_;
  std::vector<std::vector<std::size_t>> groups_;
};

// Groups windows by (side, anchor residue mod side). Windows in a group tile
// the grid without overlap. Residue classes that contain no window (possible
// only when 2 * side - 1 > m) are omitted, so the group count is
// sum_s min(s, m - s + 1)^d.
Partition partition_disjoint(const WindowSystem& system);

// ---------------------------------------------------------------------------

template <class F>
void WindowSystem::for_each_run(const Window& w, F&& f) const {
  const int d = grid_.dim();
  const std::size_t len = static_cast<std::size_t>(w.side);
  if (d == 1) {
    f(static_cast<std::size_t>(w.anchor[0]), len);
    return;
  }
  // odometer over the leading d - 1 axes
  std::array<int, kMaxDim> off{};
  while (true) {
    std::size_t base = 0;
    for (int axis = 0; axis < d - 1; ++axis) {
      base += static_cast<std::size_t>(w.anchor[axis] + off[axis]) *
              grid_.stride(axis);
    }
    base += static_cast<std::size_t>(w.anchor[d - 1]);
    f(base, len);
    int axis = d - 2;
    while (axis >= 0 && ++off[axis] == w.side) {
      off[axis] = 0;
      --axis;
    }
    if (axis < 0) break;
  }
}

template <class F>
void Partition::for_each_window(std::size_t j, F&& f) const {
  const WindowSystem& sys = *system_;
  const GroupKey& k = keys_[j];
  const int d = sys.grid().dim();
  const int m = sys.grid().side();
  const int s = k.side;
  const int span = m - s + 1;  // anchors per axis for this side
  const std::size_t first = sys.first_index_of_side(s);

  Window w;
  w.side = s;
  w.anchor = k.residue;
  while (true) {
    std::size_t local = 0;
    for (int axis = 0; axis < d; ++axis) {
      local = local * static_cast<std::size_t>(span) +
              static_cast<std::size_t>(w.anchor[axis]);
    }
    f(first + local, w);
    int axis = d - 1;
    while (axis >= 0) {
      w.anchor[axis] += s;
      if (w.anchor[axis] < span) break;
      w.anchor[axis] = k.residue[axis];
      --axis;
    }
    if (axis < 0) break;
  }
}

}  // namespace smre
