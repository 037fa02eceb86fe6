#include "smre/app/synthetic.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "smre/error.hpp"
#include "smre/operators.hpp"
#include "smre/random.hpp"

namespace smre::app {

SignalArray peak_train(int m) {
  if (m < 64) throw InvalidArgument("peak train needs at least 64 samples");
  struct Bump {
    double center, width, height;
  };
  static constexpr std::array<Bump, kPeakTrainMaxima> bumps = {{
      {0.06, 0.010, 2.0}, {0.14, 0.006, 1.2}, {0.22, 0.015, 3.0}, {0.31, 0.008, 1.5},
      {0.40, 0.012, 2.5}, {0.48, 0.005, 1.0}, {0.57, 0.018, 3.5}, {0.66, 0.007, 1.8},
      {0.75, 0.010, 2.2}, {0.84, 0.006, 1.3}, {0.93, 0.013, 2.8},
  }};
  SignalArray s(Grid(1, m), 0.0);
  for (int i = 0; i < m; ++i) {
    const double x = (i + 0.5) / m;
    double acc = 0.0;
    for (const Bump& b : bumps) {
      const double z = (x - b.center) / b.width;
      acc += b.height * std::exp(-0.5 * z * z);
    }
    s[static_cast<std::size_t>(i)] = acc;
  }
  return s;
}

SignalArray two_filament(int m, double background) {
  if (m < 16) throw InvalidArgument("phantom needs side at least 16");
  const Grid g(2, m);
  SignalArray s(g, background);
  const double w = std::max(0.8, m / 64.0);  // filament half width in pixels
  const double two_pi = 2.0 * std::numbers::pi;
  for (int r = 0; r < m; ++r) {
    for (int c = 0; c < m; ++c) {
      const double x = c, y = r;
      // wavy filament y = 0.35m + 0.12m sin(2 pi x / m)
      const double f1 = 0.35 * m + 0.12 * m * std::sin(two_pi * x / m);
      const double s1 = 0.12 * m * two_pi / m * std::cos(two_pi * x / m);
      const double d1 = (y - f1) / std::sqrt(1.0 + s1 * s1);
      // straight filament y = 0.95m - 0.6x
      const double d2 = (y - (0.95 * m - 0.6 * x)) / std::sqrt(1.0 + 0.36);
      double v = background + std::exp(-0.5 * d1 * d1 / (w * w)) +
                 0.8 * std::exp(-0.5 * d2 * d2 / (w * w));
      s[g.index({r, c})] = v;
    }
  }
  return s;
}

SignalArray add_gaussian_noise(const SignalArray& truth, double sigma,
                               std::uint64_t seed, std::uint64_t trial) {
  const NoiseModel noise(sigma);
  NormalStream rng(seed, trial);
  SignalArray y = truth;
  for (double& x : y.values()) x += noise.sigma * rng();
  return y;
}

SignalArray blur_poisson(const SignalArray& truth, double kernel_sigma,
                         double intensity, std::uint64_t seed) {
  if (!(intensity > 0.0)) throw InvalidArgument("intensity must be positive");
  const Grid& g = truth.grid();
  const LinearOperator k = LinearOperator::convolution(
      g, gaussian_kernel(kernel_sigma, default_radius(kernel_sigma), g.dim()));
  const SignalArray mean = k.apply(truth);
  std::mt19937_64 rng(seed);
  SignalArray y(g, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double mu = std::max(0.0, intensity * mean[i]);
    y[i] = mu > 0.0 ? static_cast<double>(std::poisson_distribution<long>(mu)(rng)) : 0.0;
  }
  return y;
}

}  // namespace smre::app
