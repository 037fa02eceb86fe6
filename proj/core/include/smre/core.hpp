#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace smre {

inline constexpr int kMaxDim = 3;

// The lattice {0..m-1}^d. Arrays on it are stored row-major with axis 0
// slowest, so the last axis is contiguous.
class Grid {
 public:
  Grid() = default;
  Grid(int dim, int side);

  int dim() const { return dim_; }
  int side() const { return side_; }
  std::size_t size() const { return size_; }
  std::size_t stride(int axis) const { return strides_[axis]; }

  std::array<int, kMaxDim> coords(std::size_t index) const;
  std::size_t index(const std::array<int, kMaxDim>& coords) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dim_ == b.dim_ && a.side_ == b.side_;
  }

 private:
  int dim_ = 1;
  int side_ = 1;
  std::size_t size_ = 1;
  std::array<std::size_t, kMaxDim> strides_{1, 1, 1};
};

// A real-valued function on a grid.
class SignalArray {
 public:
  SignalArray() = default;
  explicit SignalArray(Grid grid, double fill = 0.0);
  // Throws InvalidArgument if the length does not match or an entry is not
  // finite.
  SignalArray(Grid grid, std::vector<double> values);

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  const std::vector<double>& vector() const { return values_; }

  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }

  bool all_finite() const;

  SignalArray& operator+=(const SignalArray& other);
  SignalArray& operator-=(const SignalArray& other);
  SignalArray& operator*=(double scale);
  // this += scale * other
  SignalArray& axpy(double scale, const SignalArray& other);

  friend bool operator==(const SignalArray& a, const SignalArray& b) {
    return a.grid_ == b.grid_ && a.values_ == b.values_;
  }

 private:
  Grid grid_;
  std::vector<double> values_ = std::vector<double>(1, 0.0);
};

SignalArray operator+(SignalArray a, const SignalArray& b);
SignalArray operator-(SignalArray a, const SignalArray& b);
SignalArray operator*(double s, SignalArray a);

double dot(const SignalArray& a, const SignalArray& b);
double norm(const SignalArray& a);
double distance(const SignalArray& a, const SignalArray& b);
double sup_distance(const SignalArray& a, const SignalArray& b);

// Pointwise residual transform.
enum class Transform { Identity, Square };

inline double apply(Transform t, double x) {
  return t == Transform::Square ? x * x : x;
}
SignalArray apply(Transform t, const SignalArray& v);
const char* to_string(Transform t);
Transform transform_from_string(const char* name);

struct NoiseModel {
  explicit NoiseModel(double sigma);
  double sigma;
};

// One array per axis; component i holds the forward difference along axis i.
using GradientField = std::vector<SignalArray>;

// (Du)_{v,i} = u_{v+e_i} - u_v, and 0 on the last index along axis i.
GradientField forward_difference(const SignalArray& u);
// The adjoint D^T of forward_difference (a negative divergence).
SignalArray difference_adjoint(const GradientField& g);
// Pointwise Euclidean norm squared of a gradient field, |Du_v|_2^2.
std::vector<double> squared_magnitude(const GradientField& g);

// mu_S(v) = |<weight, transform(v)>|.
double average(const SignalArray& weight, Transform transform,
               const SignalArray& v);

void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace smre
