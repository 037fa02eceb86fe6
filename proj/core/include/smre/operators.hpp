#pragma once

#include <memory>
#include <vector>

#include <Eigen/Dense>

#include "smre/core.hpp"

namespace smre {

// Sampled circular Gaussian on [-radius, radius]^dim, row-major with the
// centre tap at offset (radius, ..., radius). Taps are not renormalised after
// truncation, so they sum to slightly less than one.
struct GaussianKernel {
  int dim = 2;
  double sigma = 1.0;
  int radius = 1;
  std::vector<double> taps;

  int width() const { return 2 * radius + 1; }
  double center() const;
  double sum() const;
};

// ceil(4 * sigma): the truncated tail mass stays below 1e-4.
int default_radius(double sigma);

GaussianKernel gaussian_kernel(double sigma, int radius, int dim = 2);

// Standard deviation in pixels of a Gaussian with the given full width at
// half maximum: (fwhm / pixel_size) / (2 sqrt(2 ln 2)).
double sigma_from_fwhm(double fwhm, double pixel_size);

enum class ConvolutionMethod { Auto, Spatial, Fourier };

// Kernels with radius above this use the FFT path under Auto.
inline constexpr int kSpatialRadiusLimit = 8;

// A forward operator K together with its exact adjoint. Convolutions use zero
// padding outside the grid (linear, not circular). Copies share immutable
// state and are safe to use from several threads.
class LinearOperator {
 public:
  enum class Kind { Identity, Convolution, Dense };

  static LinearOperator identity(const Grid& grid);
  static LinearOperator convolution(
      const Grid& grid, const GaussianKernel& kernel,
      ConvolutionMethod method = ConvolutionMethod::Auto);
  // General kernel with (2 radius + 1)^dim row-major taps.
  static LinearOperator convolution(
      const Grid& grid, int radius, std::vector<double> taps,
      ConvolutionMethod method = ConvolutionMethod::Auto);
  // Maps R^cols to R^rows; both sides are modelled as 1-d grids.
  static LinearOperator dense(Eigen::MatrixXd matrix);

  Kind kind() const { return kind_; }
  const Grid& domain() const { return domain_; }
  const Grid& range() const { return range_; }
  // Resolved method for convolutions (never Auto).
  ConvolutionMethod method() const;
  const Eigen::MatrixXd& matrix() const;
  const std::vector<double>& taps() const;
  int radius() const;

  SignalArray apply(const SignalArray& u) const;
  SignalArray adjoint(const SignalArray& v) const;

  // diag(K^T K)
  SignalArray normal_diagonal() const;
  // An upper bound on ||K||^2, exact for identity and dense operators.
  double norm_squared_bound() const;

 private:
  struct ConvState;

  Kind kind_ = Kind::Identity;
  Grid domain_;
  Grid range_;
  std::shared_ptr<const Eigen::MatrixXd> matrix_;
  std::shared_ptr<const ConvState> conv_;
};

SignalArray apply(const LinearOperator& op, const SignalArray& u);
SignalArray adjoint(const LinearOperator& op, const SignalArray& v);

}  // namespace smre
