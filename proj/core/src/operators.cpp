#include "smre/operators.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <numbers>
#include <numeric>
#include <string>

#include "smre/error.hpp"

namespace smre {

namespace {

// The FFTW planner is not reentrant.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

int smooth_size_at_least(int n) {
  for (int c = std::max(n, 1);; ++c) {
    int r = c;
    for (int p : {2, 3, 5, 7}) {
      while (r % p == 0) r /= p;
    }
    if (r == 1) return c;
  }
}

struct FftwBuffer {
  explicit FftwBuffer(std::size_t bytes) : ptr(fftw_malloc(bytes)) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  void* ptr;
};

std::size_t ipow(std::size_t b, int e) {
  std::size_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

// out[v] += sum_o taps[o] * u[v - o], zero outside the grid.
void spatial_convolve(const Grid& grid, int radius,
                      const std::vector<double>& taps, const SignalArray& u,
                      SignalArray& out) {
  const int d = grid.dim();
  const int m = grid.side();
  const int w = 2 * radius + 1;
  std::array<int, kMaxDim> o{};
  for (int a = 0; a < d; ++a) o[a] = -radius;
  std::size_t tap_index = 0;
  while (true) {
    const double k = taps[tap_index];
    // output coordinates v with 0 <= v - o < m
    std::array<int, kMaxDim> lo{}, hi{};
    bool empty = false;
    for (int a = 0; a < d; ++a) {
      lo[a] = std::max(0, o[a]);
      hi[a] = std::min(m, m + o[a]);
      if (lo[a] >= hi[a]) empty = true;
    }
    if (!empty && k != 0.0) {
      std::ptrdiff_t shift = 0;
      for (int a = 0; a < d; ++a) {
        shift += static_cast<std::ptrdiff_t>(o[a]) *
                 static_cast<std::ptrdiff_t>(grid.stride(a));
      }
      std::array<int, kMaxDim> v = lo;
      const auto run = static_cast<std::size_t>(hi[d - 1] - lo[d - 1]);
      while (true) {
        std::size_t base = 0;
        for (int a = 0; a < d; ++a) {
          base += static_cast<std::size_t>(v[a]) * grid.stride(a);
        }
        double* dst = out.values().data() + base;
        const double* src = u.values().data() + (static_cast<std::ptrdiff_t>(base) - shift);
        for (std::size_t i = 0; i < run; ++i) dst[i] += k * src[i];
        int a = d - 2;
        while (a >= 0 && ++v[a] == hi[a]) {
          v[a] = lo[a];
          --a;
        }
        if (a < 0) break;
      }
    }
    ++tap_index;
    int a = d - 1;
    while (a >= 0 && ++o[a] > radius) {
      o[a] = -radius;
      --a;
    }
    if (a < 0) break;
  }
  (void)w;
}

std::vector<double> reflect(int dim, int radius, const std::vector<double>& taps) {
  // reversing the row-major order negates every coordinate offset
  (void)dim;
  (void)radius;
  return std::vector<double>(taps.rbegin(), taps.rend());
}

}  // namespace

struct FourierPlan {
  int dim = 1;
  std::array<int, kMaxDim> n{};
  std::size_t real_size = 1;
  std::size_t complex_size = 1;
  fftw_plan forward = nullptr;
  fftw_plan backward = nullptr;
  std::vector<std::complex<double>> spectrum;            // of the taps
  std::vector<std::complex<double>> reflected_spectrum;  // of the reflection

  FourierPlan(const Grid& grid, int radius, const std::vector<double>& taps) {
    dim = grid.dim();
    const int len = smooth_size_at_least(grid.side() + radius);
    for (int a = 0; a < dim; ++a) n[a] = len;
    real_size = ipow(static_cast<std::size_t>(len), dim);
    complex_size = real_size / static_cast<std::size_t>(len) *
                   static_cast<std::size_t>(len / 2 + 1);

    FftwBuffer in(sizeof(double) * real_size);
    FftwBuffer out(sizeof(fftw_complex) * complex_size);
    {
      std::lock_guard<std::mutex> lock(fftw_planner_mutex());
      forward = fftw_plan_dft_r2c(dim, n.data(), static_cast<double*>(in.ptr),
                                  static_cast<fftw_complex*>(out.ptr),
                                  FFTW_ESTIMATE);
      backward = fftw_plan_dft_c2r(dim, n.data(),
                                   static_cast<fftw_complex*>(out.ptr),
                                   static_cast<double*>(in.ptr), FFTW_ESTIMATE);
    }
    if (!forward || !backward) throw Error("FFTW planning failed");
    spectrum = transform_taps(radius, taps);
    reflected_spectrum = transform_taps(radius, reflect(dim, radius, taps));
  }

  ~FourierPlan() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    if (forward) fftw_destroy_plan(forward);
    if (backward) fftw_destroy_plan(backward);
  }
  FourierPlan(const FourierPlan&) = delete;
  FourierPlan& operator=(const FourierPlan&) = delete;

  std::size_t padded_index(const std::array<int, kMaxDim>& c) const {
    std::size_t idx = 0;
    for (int a = 0; a < dim; ++a) {
      idx = idx * static_cast<std::size_t>(n[a]) + static_cast<std::size_t>(c[a]);
    }
    return idx;
  }

  std::vector<std::complex<double>> transform_taps(
      int radius, const std::vector<double>& taps) const {
    FftwBuffer in(sizeof(double) * real_size);
    FftwBuffer out(sizeof(fftw_complex) * complex_size);
    auto* re = static_cast<double*>(in.ptr);
    std::fill(re, re + real_size, 0.0);
    std::array<int, kMaxDim> o{};
    for (int a = 0; a < dim; ++a) o[a] = -radius;
    std::size_t t = 0;
    while (true) {
      std::array<int, kMaxDim> c{};
      for (int a = 0; a < dim; ++a) c[a] = (o[a] % n[a] + n[a]) % n[a];
      re[padded_index(c)] += taps[t++];
      int a = dim - 1;
      while (a >= 0 && ++o[a] > radius) {
        o[a] = -radius;
        --a;
      }
      if (a < 0) break;
    }
    fftw_execute_dft_r2c(forward, re, static_cast<fftw_complex*>(out.ptr));
    const auto* cs = reinterpret_cast<const std::complex<double>*>(out.ptr);
    return {cs, cs + complex_size};
  }

  void convolve(const Grid& grid, const std::vector<std::complex<double>>& spec,
                const SignalArray& u, SignalArray& result) const {
    FftwBuffer in(sizeof(double) * real_size);
    FftwBuffer out(sizeof(fftw_complex) * complex_size);
    auto* re = static_cast<double*>(in.ptr);
    std::fill(re, re + real_size, 0.0);
    const std::size_t m = static_cast<std::size_t>(grid.side());
    const std::size_t len = static_cast<std::size_t>(n[dim - 1]);
    // copy rows (runs along the last axis)
    const std::size_t rows = grid.size() / m;
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r, padded = 0, mult = 1;
      for (int a = dim - 2; a >= 0; --a) {
        padded += (rem % m) * mult;
        rem /= m;
        mult *= static_cast<std::size_t>(n[a]);
      }
      std::copy_n(u.values().data() + r * m, m, re + padded * len);
    }
    auto* cx = static_cast<fftw_complex*>(out.ptr);
    fftw_execute_dft_r2c(forward, re, cx);
    auto* c = reinterpret_cast<std::complex<double>*>(out.ptr);
    for (std::size_t i = 0; i < complex_size; ++i) c[i] *= spec[i];
    fftw_execute_dft_c2r(backward, cx, re);
    const double scale = 1.0 / static_cast<double>(real_size);
    for (std::size_t r = 0; r < rows; ++r) {
      std::size_t rem = r, padded = 0, mult = 1;
      for (int a = dim - 2; a >= 0; --a) {
        padded += (rem % m) * mult;
        rem /= m;
        mult *= static_cast<std::size_t>(n[a]);
      }
      double* dst = result.values().data() + r * m;
      const double* src = re + padded * len;
      for (std::size_t i = 0; i < m; ++i) dst[i] = src[i] * scale;
    }
  }
};

struct LinearOperator::ConvState {
  int radius = 0;
  std::vector<double> taps;
  std::vector<double> reflected;
  ConvolutionMethod method = ConvolutionMethod::Spatial;
  std::unique_ptr<FourierPlan> fourier;
};

double GaussianKernel::center() const { return taps[taps.size() / 2]; }

double GaussianKernel::sum() const {
  return std::accumulate(taps.begin(), taps.end(), 0.0);
}

int default_radius(double sigma) {
  return std::max(1, static_cast<int>(std::ceil(4.0 * sigma)));
}

GaussianKernel gaussian_kernel(double sigma, int radius, int dim) {
  if (!(sigma > 0.0)) throw InvalidArgument("kernel sigma must be positive");
  if (radius < 1) throw InvalidArgument("kernel radius must be at least 1");
  if (dim < 1 || dim > kMaxDim) throw InvalidArgument("bad kernel dimension");
  GaussianKernel k;
  k.dim = dim;
  k.sigma = sigma;
  k.radius = radius;
  const int w = 2 * radius + 1;
  k.taps.resize(ipow(static_cast<std::size_t>(w), dim));
  const double norm = std::pow(std::sqrt(2.0 * std::numbers::pi) * sigma, -dim);
  for (std::size_t i = 0; i < k.taps.size(); ++i) {
    std::size_t rem = i;
    double r2 = 0.0;
    for (int a = 0; a < dim; ++a) {
      const int off = static_cast<int>(rem % static_cast<std::size_t>(w)) - radius;
      rem /= static_cast<std::size_t>(w);
      r2 += static_cast<double>(off) * off;
    }
    k.taps[i] = norm * std::exp(-r2 / (2.0 * sigma * sigma));
  }
  return k;
}

double sigma_from_fwhm(double fwhm, double pixel_size) {
  if (!(fwhm > 0.0) || !(pixel_size > 0.0)) {
    throw InvalidArgument("fwhm and pixel size must be positive");
  }
  return (fwhm / pixel_size) / (2.0 * std::sqrt(2.0 * std::log(2.0)));
}

LinearOperator LinearOperator::identity(const Grid& grid) {
  LinearOperator op;
  op.kind_ = Kind::Identity;
  op.domain_ = grid;
  op.range_ = grid;
  return op;
}

LinearOperator LinearOperator::convolution(const Grid& grid,
                                           const GaussianKernel& kernel,
                                           ConvolutionMethod method) {
  if (kernel.dim != grid.dim()) {
    throw ShapeMismatch("kernel dimension does not match the grid");
  }
  return convolution(grid, kernel.radius, kernel.taps, method);
}

LinearOperator LinearOperator::convolution(const Grid& grid, int radius,
                                           std::vector<double> taps,
                                           ConvolutionMethod method) {
  if (radius < 0) throw InvalidArgument("negative kernel radius");
  if (taps.size() != ipow(static_cast<std::size_t>(2 * radius + 1), grid.dim())) {
    throw ShapeMismatch("kernel tap count does not match radius and dimension");
  }
  auto state = std::make_shared<ConvState>();
  state->radius = radius;
  state->reflected = reflect(grid.dim(), radius, taps);
  state->taps = std::move(taps);
  if (method == ConvolutionMethod::Auto) {
    method = radius <= kSpatialRadiusLimit ? ConvolutionMethod::Spatial
                                           : ConvolutionMethod::Fourier;
  }
  state->method = method;
  if (method == ConvolutionMethod::Fourier) {
    state->fourier = std::make_unique<FourierPlan>(grid, radius, state->taps);
  }
  LinearOperator op;
  op.kind_ = Kind::Convolution;
  op.domain_ = grid;
  op.range_ = grid;
  op.conv_ = std::move(state);
  return op;
}

LinearOperator LinearOperator::dense(Eigen::MatrixXd matrix) {
  if (matrix.rows() < 1 || matrix.cols() < 1) {
    throw InvalidArgument("dense operator needs a non-empty matrix");
  }
  if (!matrix.allFinite()) throw InvalidArgument("dense operator is not finite");
  LinearOperator op;
  op.kind_ = Kind::Dense;
  op.domain_ = Grid(1, static_cast<int>(matrix.cols()));
  op.range_ = Grid(1, static_cast<int>(matrix.rows()));
  op.matrix_ = std::make_shared<const Eigen::MatrixXd>(std::move(matrix));
  return op;
}

ConvolutionMethod LinearOperator::method() const {
  return conv_ ? conv_->method : ConvolutionMethod::Spatial;
}

const Eigen::MatrixXd& LinearOperator::matrix() const {
  if (!matrix_) throw InvalidArgument("operator is not dense");
  return *matrix_;
}

const std::vector<double>& LinearOperator::taps() const {
  if (!conv_) throw InvalidArgument("operator is not a convolution");
  return conv_->taps;
}

int LinearOperator::radius() const { return conv_ ? conv_->radius : 0; }

SignalArray LinearOperator::apply(const SignalArray& u) const {
  require_same_grid(domain_, u.grid(), "LinearOperator::apply");
  switch (kind_) {
    case Kind::Identity:
      return u;
    case Kind::Convolution: {
      SignalArray out(range_, 0.0);
      if (conv_->method == ConvolutionMethod::Fourier) {
        conv_->fourier->convolve(range_, conv_->fourier->spectrum, u, out);
      } else {
        spatial_convolve(range_, conv_->radius, conv_->taps, u, out);
      }
      return out;
    }
    case Kind::Dense: {
      Eigen::Map<const Eigen::VectorXd> x(u.values().data(), u.size());
      Eigen::VectorXd y = (*matrix_) * x;
      return SignalArray(range_, std::vector<double>(y.data(), y.data() + y.size()));
    }
  }
  return u;
}

SignalArray LinearOperator::adjoint(const SignalArray& v) const {
  require_same_grid(range_, v.grid(), "LinearOperator::adjoint");
  switch (kind_) {
    case Kind::Identity:
      return v;
    case Kind::Convolution: {
      // correlation with the taps, i.e. convolution with their reflection
      SignalArray out(domain_, 0.0);
      if (conv_->method == ConvolutionMethod::Fourier) {
        conv_->fourier->convolve(domain_, conv_->fourier->reflected_spectrum, v, out);
      } else {
        spatial_convolve(domain_, conv_->radius, conv_->reflected, v, out);
      }
      return out;
    }
    case Kind::Dense: {
      Eigen::Map<const Eigen::VectorXd> y(v.values().data(), v.size());
      Eigen::VectorXd x = matrix_->transpose() * y;
      return SignalArray(domain_, std::vector<double>(x.data(), x.data() + x.size()));
    }
  }
  return v;
}

SignalArray LinearOperator::normal_diagonal() const {
  switch (kind_) {
    case Kind::Identity:
      return SignalArray(domain_, 1.0);
    case Kind::Convolution: {
      std::vector<double> sq(conv_->taps.size());
      std::transform(conv_->taps.begin(), conv_->taps.end(), sq.begin(),
                     [](double t) { return t * t; });
      const LinearOperator squared =
          convolution(domain_, conv_->radius, std::move(sq), conv_->method);
      return squared.adjoint(SignalArray(range_, 1.0));
    }
    case Kind::Dense: {
      Eigen::VectorXd d = matrix_->colwise().squaredNorm().transpose();
      return SignalArray(domain_, std::vector<double>(d.data(), d.data() + d.size()));
    }
  }
  return SignalArray(domain_, 1.0);
}

double LinearOperator::norm_squared_bound() const {
  switch (kind_) {
    case Kind::Identity:
      return 1.0;
    case Kind::Convolution: {
      double l1 = 0.0;
      for (double t : conv_->taps) l1 += std::abs(t);
      return l1 * l1;
    }
    case Kind::Dense: {
      const Eigen::MatrixXd& a = *matrix_;
      const Eigen::MatrixXd gram =
          a.rows() <= a.cols() ? Eigen::MatrixXd(a * a.transpose())
                               : Eigen::MatrixXd(a.transpose() * a);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
      return eig.eigenvalues().maxCoeff();
    }
  }
  return 1.0;
}

SignalArray apply(const LinearOperator& op, const SignalArray& u) {
  return op.apply(u);
}

SignalArray adjoint(const LinearOperator& op, const SignalArray& v) {
  return op.adjoint(v);
}

}  // namespace smre
