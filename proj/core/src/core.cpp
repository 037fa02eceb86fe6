#include "smre/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <string>

#include "smre/error.hpp"

namespace smre {

Grid::Grid(int dim, int side) : dim_(dim), side_(side) {
  if (dim < 1 || dim > kMaxDim) {
    throw InvalidArgument("grid dimension must be in 1.." +
                          std::to_string(kMaxDim) + ", got " +
                          std::to_string(dim));
  }
  if (side < 1) {
    throw InvalidArgument("grid side must be positive, got " +
                          std::to_string(side));
  }
  size_ = 1;
  for (int i = 0; i < dim_; ++i) size_ *= static_cast<std::size_t>(side_);
  std::size_t s = 1;
  strides_ = {0, 0, 0};
  for (int axis = dim_ - 1; axis >= 0; --axis) {
    strides_[axis] = s;
    s *= static_cast<std::size_t>(side_);
  }
}

std::array<int, kMaxDim> Grid::coords(std::size_t index) const {
  std::array<int, kMaxDim> c{};
  for (int axis = 0; axis < dim_; ++axis) {
    c[axis] = static_cast<int>(index / strides_[axis]);
    index %= strides_[axis];
  }
  return c;
}

std::size_t Grid::index(const std::array<int, kMaxDim>& c) const {
  std::size_t idx = 0;
  for (int axis = 0; axis < dim_; ++axis) {
    idx += static_cast<std::size_t>(c[axis]) * strides_[axis];
  }
  return idx;
}

SignalArray::SignalArray(Grid grid, double fill)
    : grid_(grid), values_(grid.size(), fill) {}

SignalArray::SignalArray(Grid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) {
    throw InvalidArgument("signal length " + std::to_string(values_.size()) +
                          " does not match grid size " +
                          std::to_string(grid_.size()));
  }
  if (!all_finite()) throw InvalidArgument("signal contains non-finite values");
}

bool SignalArray::all_finite() const {
  return std::all_of(values_.begin(), values_.end(),
                     [](double x) { return std::isfinite(x); });
}

SignalArray& SignalArray::operator+=(const SignalArray& other) {
  require_same_grid(grid_, other.grid_, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

SignalArray& SignalArray::operator-=(const SignalArray& other) {
  require_same_grid(grid_, other.grid_, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

SignalArray& SignalArray::operator*=(double scale) {
  for (double& x : values_) x *= scale;
  return *this;
}

SignalArray& SignalArray::axpy(double scale, const SignalArray& other) {
  require_same_grid(grid_, other.grid_, "axpy");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += scale * other.values_[i];
  }
  return *this;
}

SignalArray operator+(SignalArray a, const SignalArray& b) { return a += b; }
SignalArray operator-(SignalArray a, const SignalArray& b) { return a -= b; }
SignalArray operator*(double s, SignalArray a) { return a *= s; }

double dot(const SignalArray& a, const SignalArray& b) {
  require_same_grid(a.grid(), b.grid(), "dot");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

double norm(const SignalArray& a) { return std::sqrt(dot(a, a)); }

double distance(const SignalArray& a, const SignalArray& b) {
  require_same_grid(a.grid(), b.grid(), "distance");
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return std::sqrt(acc);
}

double sup_distance(const SignalArray& a, const SignalArray& b) {
  require_same_grid(a.grid(), b.grid(), "sup_distance");
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

SignalArray apply(Transform t, const SignalArray& v) {
  SignalArray out = v;
  if (t == Transform::Square) {
    for (double& x : out.values()) x *= x;
  }
  return out;
}

const char* to_string(Transform t) {
  return t == Transform::Square ? "square" : "identity";
}

Transform transform_from_string(const char* name) {
  if (std::strcmp(name, "identity") == 0) return Transform::Identity;
  if (std::strcmp(name, "square") == 0) return Transform::Square;
  throw InvalidArgument(std::string("unknown transform '") + name + "'");
}

NoiseModel::NoiseModel(double s) : sigma(s) {
  if (!(s > 0.0) || !std::isfinite(s)) {
    throw InvalidArgument("noise sigma must be positive and finite");
  }
}

GradientField forward_difference(const SignalArray& u) {
  const Grid& g = u.grid();
  GradientField out;
  out.reserve(g.dim());
  const std::size_t n = g.size();
  const std::size_t m = static_cast<std::size_t>(g.side());
  for (int axis = 0; axis < g.dim(); ++axis) {
    SignalArray comp(g, 0.0);
    const std::size_t stride = g.stride(axis);
    for (std::size_t i = 0; i < n; ++i) {
      // coordinate along this axis
      const std::size_t c = (i / stride) % m;
      if (c + 1 < m) comp[i] = u[i + stride] - u[i];
    }
    out.push_back(std::move(comp));
  }
  return out;
}

SignalArray difference_adjoint(const GradientField& field) {
  if (field.empty()) throw InvalidArgument("empty gradient field");
  const Grid& g = field.front().grid();
  if (static_cast<int>(field.size()) != g.dim()) {
    throw ShapeMismatch("gradient field has wrong number of components");
  }
  SignalArray out(g, 0.0);
  const std::size_t n = g.size();
  const std::size_t m = static_cast<std::size_t>(g.side());
  for (int axis = 0; axis < g.dim(); ++axis) {
    const SignalArray& comp = field[axis];
    require_same_grid(g, comp.grid(), "difference_adjoint");
    const std::size_t stride = g.stride(axis);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t c = (i / stride) % m;
      if (c + 1 < m) {
        out[i] -= comp[i];
        out[i + stride] += comp[i];
      }
    }
  }
  return out;
}

std::vector<double> squared_magnitude(const GradientField& field) {
  std::vector<double> out(field.empty() ? 0 : field.front().size(), 0.0);
  for (const SignalArray& comp : field) {
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += comp[i] * comp[i];
  }
  return out;
}

double average(const SignalArray& weight, Transform transform,
               const SignalArray& v) {
  require_same_grid(weight.grid(), v.grid(), "average");
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    acc += weight[i] * apply(transform, v[i]);
  }
  return std::abs(acc);
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) {
    throw ShapeMismatch(std::string(what) + ": grid mismatch (" +
                        std::to_string(a.dim()) + "d/" +
                        std::to_string(a.side()) + " vs " +
                        std::to_string(b.dim()) + "d/" +
                        std::to_string(b.side()) + ")");
  }
}

}  // namespace smre
