#include "smre/windows.hpp"

#include <algorithm>
#include <string>

#include "smre/error.hpp"

namespace smre {

namespace {

std::size_t ipow(std::size_t base, int exp) {
  std::size_t r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

}  // namespace

std::size_t Window::cardinality(int dim) const {
  return ipow(static_cast<std::size_t>(side), dim);
}

bool Window::contains(const Grid& grid, std::size_t index) const {
  const auto c = grid.coords(index);
  for (int axis = 0; axis < grid.dim(); ++axis) {
    if (c[axis] < anchor[axis] || c[axis] >= anchor[axis] + side) return false;
  }
  return true;
}

bool intersects(const Window& a, const Window& b, int dim) {
  for (int axis = 0; axis < dim; ++axis) {
    const int lo = std::max(a.anchor[axis], b.anchor[axis]);
    const int hi = std::min(a.anchor[axis] + a.side, b.anchor[axis] + b.side);
    if (lo >= hi) return false;
  }
  return true;
}

WindowSystem::WindowSystem(Grid grid, int min_side, int max_side)
    : grid_(grid), min_side_(min_side), max_side_(max_side) {
  offsets_.reserve(static_cast<std::size_t>(max_side - min_side + 2));
  std::size_t total = 0;
  offsets_.push_back(0);
  for (int s = min_side; s <= max_side; ++s) {
    total += ipow(static_cast<std::size_t>(grid.side() - s + 1), grid.dim());
    offsets_.push_back(total);
  }
}

std::size_t WindowSystem::count_for_side(int side) const {
  if (side < min_side_ || side > max_side_) return 0;
  const auto k = static_cast<std::size_t>(side - min_side_);
  return offsets_[k + 1] - offsets_[k];
}

std::size_t WindowSystem::first_index_of_side(int side) const {
  return offsets_[static_cast<std::size_t>(side - min_side_)];
}

int WindowSystem::side_of(std::size_t index) const {
  const auto it = std::upper_bound(offsets_.begin(), offsets_.end(), index);
  return min_side_ + static_cast<int>(it - offsets_.begin()) - 1;
}

Window WindowSystem::operator[](std::size_t index) const {
  if (index >= size()) throw InvalidArgument("window index out of range");
  Window w;
  w.side = side_of(index);
  std::size_t local = index - first_index_of_side(w.side);
  const auto span = static_cast<std::size_t>(grid_.side() - w.side + 1);
  for (int axis = grid_.dim() - 1; axis >= 0; --axis) {
    w.anchor[axis] = static_cast<int>(local % span);
    local /= span;
  }
  return w;
}

std::size_t WindowSystem::index_of(const Window& w) const {
  if (w.side < min_side_ || w.side > max_side_) {
    throw InvalidArgument("window side outside the system's range");
  }
  const int span = grid_.side() - w.side + 1;
  std::size_t local = 0;
  for (int axis = 0; axis < grid_.dim(); ++axis) {
    if (w.anchor[axis] < 0 || w.anchor[axis] >= span) {
      throw InvalidArgument("window does not fit inside the grid");
    }
    local = local * static_cast<std::size_t>(span) +
            static_cast<std::size_t>(w.anchor[axis]);
  }
  return first_index_of_side(w.side) + local;
}

std::vector<std::size_t> WindowSystem::support(const Window& w) const {
  std::vector<std::size_t> out;
  out.reserve(w.cardinality(grid_.dim()));
  for_each_run(w, [&](std::size_t off, std::size_t len) {
    for (std::size_t i = 0; i < len; ++i) out.push_back(off + i);
  });
  return out;
}

WindowSystem enumerate(const Grid& grid, int min_side, int max_side) {
  if (min_side < 1 || min_side > max_side || max_side > grid.side()) {
    throw InvalidArgument("invalid window side range [" +
                          std::to_string(min_side) + ", " +
                          std::to_string(max_side) + "] for grid side " +
                          std::to_string(grid.side()));
  }
  return WindowSystem(grid, min_side, max_side);
}

std::size_t window_count(const Grid& grid, int min_side, int max_side) {
  std::size_t total = 0;
  for (int s = min_side; s <= max_side; ++s) {
    total += ipow(static_cast<std::size_t>(grid.side() - s + 1), grid.dim());
  }
  return total;
}

Partition Partition::from_groups(std::vector<std::vector<std::size_t>> groups) {
  Partition p;
  p.groups_ = std::move(groups);
  return p;
}

std::size_t Partition::size() const {
  return structured() ? keys_.size() : groups_.size();
}

std::vector<std::size_t> Partition::group(std::size_t j) const {
  if (!structured()) return groups_.at(j);
  std::vector<std::size_t> out;
  for_each_window(j, [&](std::size_t idx, const Window&) { out.push_back(idx); });
  return out;
}

Partition partition_disjoint(const WindowSystem& system) {
  Partition p;
  p.system_ = system;
  const int d = system.grid().dim();
  const int m = system.grid().side();
  for (int s = system.min_side(); s <= system.max_side(); ++s) {
    // residues beyond the last anchor would give empty groups
    const int count = std::min(s, m - s + 1);
    GroupKey key;
    key.side = s;
    while (true) {
      p.keys_.push_back(key);
      int axis = d - 1;
      while (axis >= 0 && ++key.residue[axis] == count) {
        key.residue[axis] = 0;
        --axis;
      }
      if (axis < 0) break;
    }
  }
  return p;
}

}  // namespace smre
