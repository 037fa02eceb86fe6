#pragma once

#include <cstdint>

#include "smre/core.hpp"

namespace smre::app {

// Eleven smooth bumps of varying height and width on a zero baseline.
SignalArray peak_train(int m);
inline constexpr int kPeakTrainMaxima = 11;

// Two thin bright curves (one wavy, one diagonal) on a dim background,
// values in [background, ~2].
SignalArray two_filament(int m, double background = 0.1);

// truth + N(0, sigma^2) noise drawn from stream `trial` of `seed`.
SignalArray add_gaussian_noise(const SignalArray& truth, double sigma,
                               std::uint64_t seed, std::uint64_t trial = 0);

// Poisson counts with mean intensity * (K truth), K a Gaussian blur.
SignalArray blur_poisson(const SignalArray& truth, double kernel_sigma,
                         double intensity, std::uint64_t seed);

}  // namespace smre::app
