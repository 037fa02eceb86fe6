#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "smre/constraint_system.hpp"
#include "smre/core.hpp"

namespace smre {

// Monte-Carlo quantiles of the multiresolution statistic under Gaussian
// white noise. `alpha` is the coverage level: the true signal satisfies the
// calibrated constraint with probability about alpha, so both the global
// threshold and the per-scale values are empirical alpha-quantiles.
struct QuantileTable {
  std::string kind;  // "global" or "per_scale"
  double alpha = 0.9;
  double sigma = 1.0;
  int n_trials = 0;
  std::uint64_t seed = 0;
  Transform transform = Transform::Identity;
  std::string system;  // descriptor of what was simulated
  double global_q = 0.0;
  std::map<int, double> per_scale;  // side -> q_{alpha, side}

  // Content hash of everything except the simulated values.
  std::string hash() const;

  friend bool operator==(const QuantileTable&, const QuantileTable&) = default;
};

// Order statistic at position ceil(level * n) (1-based); no interpolation.
double empirical_quantile(std::vector<double> samples, double level);

// T(sigma * eps) for trials 0..n_trials-1. Trial t draws from the normal
// stream (seed, t), so results do not depend on the thread count.
std::vector<double> simulate_statistics(const ConstraintSystem& system,
                                        const NoiseModel& noise, int n_trials,
                                        std::uint64_t seed, int threads = 0);

// Per trial, for each side s in [min_side, max_side], the maximum over
// windows of side s of sum_S (sigma * eps)^2.
std::vector<std::vector<double>> simulate_scale_maxima(
    const Grid& grid, int min_side, int max_side, const NoiseModel& noise,
    int n_trials, std::uint64_t seed, int threads = 0);

QuantileTable simulate_global_quantile(const ConstraintSystem& system,
                                       const NoiseModel& noise, double alpha,
                                       int n_trials, std::uint64_t seed,
                                       int threads = 0);

QuantileTable per_scale_constants(const Grid& grid, int min_side, int max_side,
                                  const NoiseModel& noise, double alpha,
                                  int n_trials, std::uint64_t seed,
                                  int threads = 0);

// c_s = 1 / q_{alpha, s} for s = min_side..max_side, as side coefficients
// of a windowed system with q = 1.
std::vector<double> scale_coefficients(const QuantileTable& table, int min_side,
                                       int max_side);

// Key-value text form with the hash on the last line; doubles are written in
// shortest round-trip form.
std::string serialize(const QuantileTable& table);
// Throws Error on malformed input or hash mismatch.
QuantileTable parse_table(const std::string& text);

void write_table(const QuantileTable& table, const std::filesystem::path& path);
QuantileTable read_table(const std::filesystem::path& path);

// $SMRE_QUANTILE_CACHE if set, else ".smre-cache" in the working directory.
std::filesystem::path default_cache_directory();
std::filesystem::path cache_file(const std::filesystem::path& dir,
                                 const std::string& hash);

// Key of a table that would be produced by the given request; lets callers
// look up the cache before simulating.
QuantileTable global_request(const ConstraintSystem& system, const NoiseModel& noise,
                             double alpha, int n_trials, std::uint64_t seed);
QuantileTable per_scale_request(const Grid& grid, int min_side, int max_side,
                                const NoiseModel& noise, double alpha,
                                int n_trials, std::uint64_t seed);

// Loads the cached table for the request's hash, if present and valid.
std::optional<QuantileTable> load_cached(const QuantileTable& request,
                                         const std::filesystem::path& dir);

}  // namespace smre
