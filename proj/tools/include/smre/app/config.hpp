#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "smre/core.hpp"
#include "smre/prox.hpp"

namespace smre::app {

enum class Pipeline { Regress1d, Denoise2d, Deconvolve };

const char* to_string(Pipeline p);
Pipeline pipeline_from_string(const std::string& name);

enum class WeightKind { Indicator, Normalized };

struct RunConfig {
  Pipeline pipeline = Pipeline::Regress1d;
  std::vector<std::filesystem::path> inputs;
  std::filesystem::path truth;  // evaluate only
  std::filesystem::path output_dir = ".";
  int grid_side = 0;  // simulate-quantiles without input data

  Regularizer regularizer = Regularizer::tv2();
  int min_side = 1;
  int max_side = 100;  // clamped to the grid side
  Transform transform = Transform::Identity;
  WeightKind weights = WeightKind::Normalized;
  double alpha = 0.9;
  double sigma = 1.0;  // noise level; Poisson pipelines simulate with 1
  bool poisson = false;
  double input_scale = 1.0;

  double lambda = 1.0;
  double tau = 1e-4;
  int max_outer = 500;
  int prox_max_iter = 500;        // lagged-diffusivity / proximal steps per call
  int dykstra_max_sweeps = 20000; // per projection
  double epsilon_safe = 0.0;

  double kernel_sigma = 4.3422;
  int kernel_radius = 0;  // 0 picks the default for kernel_sigma

  std::uint64_t seed = 20120101;
  int n_trials = 1000;
  int threads = 0;
  std::filesystem::path quantile_table;  // empty: cache only
};

// Defaults for a pipeline before any user field is applied.
RunConfig defaults_for(Pipeline p);

// Builds a config from a JSON document. Unknown keys and out-of-range
// values are rejected with InvalidArgument naming the key.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::filesystem::path& path);

nlohmann::json to_json(const RunConfig& c);

}  // namespace smre::app
