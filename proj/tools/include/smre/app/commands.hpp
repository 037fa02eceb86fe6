#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>

#include <nlohmann/json.hpp>

#include "smre/admm.hpp"
#include "smre/app/config.hpp"
#include "smre/constraint_system.hpp"
#include "smre/quantiles.hpp"

namespace smre::app {

// Where a command currently is; copied into the error record on failure.
struct Context {
  std::string stage = "startup";
  std::filesystem::path path;
  std::ostream* log = nullptr;  // progress and cache messages
};

// Clamps the configured side range to the grid.
int effective_max_side(const RunConfig& c, const Grid& grid);

// Cache lookup first (SMRE_QUANTILE_CACHE or .smre-cache), then the
// configured table path, then simulation. New tables are written to the
// cache and, when set, to config.quantile_table.
QuantileTable obtain_table(const RunConfig& c, const Grid& grid, Context& ctx);

ConstraintSystem assemble_system(const RunConfig& c, const Grid& grid,
                                 const QuantileTable& table);
LinearOperator assemble_operator(const RunConfig& c, const Grid& grid);
AdmmConfig solver_config(const RunConfig& c);

struct RunResult {
  SignalArray estimate;
  AdmmReport report;
  nlohmann::json diagnostics;
};

// Solves one data set with an already obtained table.
RunResult solve(const RunConfig& c, const SignalArray& y, const QuantileTable& table);

int run(const RunConfig& c, Context& ctx);
int simulate_quantiles(const RunConfig& c, Context& ctx);
int evaluate(const RunConfig& c, Context& ctx);

struct GenerateOptions {
  std::string kind = "peak";  // peak | filament | filament-blur
  int size = 256;
  double noise = 0.3;         // Gaussian sigma (peak, filament)
  double kernel_sigma = 4.34; // filament-blur
  double intensity = 50.0;    // filament-blur photon scale
  std::uint64_t seed = 1;
  int trials = 1;
  std::filesystem::path output_dir = ".";
};

int generate(const GenerateOptions& o, Context& ctx);

// Throws InvalidArgument describing the first violation.
void validate_metrics(const nlohmann::json& doc);

nlohmann::json error_record(const std::string& command, const Context& ctx,
                            const std::exception& e);

// Runs `body`, turning exceptions into an error record on `err` (one JSON
// line) and, when possible, `<output_dir>/error.json`. Returns the exit code.
int guarded(const std::string& command, Context& ctx,
            const std::filesystem::path& output_dir, std::ostream& err,
            const std::function<int()>& body);

}  // namespace smre::app
