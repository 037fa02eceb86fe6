#include "smre/app/cli.hpp"

#include <charconv>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <vector>

#include <CLI11.hpp>

#include "smre/app/commands.hpp"
#include "smre/error.hpp"

namespace smre::app {

namespace {

using nlohmann::json;

// Config-file fields that may be overridden from the command line.
struct Overrides {
  std::string config;
  std::vector<std::function<void(json&)>> setters;

  template <class T>
  void add(CLI::App* app, const std::string& flag, const std::string& key,
           const std::string& help) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(flag, *value, help);
    setters.push_back([opt, value, key](json& doc) {
      if (opt->count() > 0) doc[key] = *value;
    });
  }
};

void add_config_options(CLI::App* app, Overrides& o) {
  app->add_option("-c,--config", o.config, "JSON config file");
  o.add<std::string>(app, "--pipeline", "pipeline", "regress1d | denoise2d | deconvolve");
  o.add<std::vector<std::string>>(app, "-i,--input", "input", "input data file(s)");
  o.add<std::string>(app, "--truth", "truth", "truth signal (evaluate)");
  o.add<std::string>(app, "-o,--output-dir", "output_dir", "output directory");
  o.add<std::string>(app, "--regularizer", "regularizer", "tv2 | tv1beta | l1");
  o.add<double>(app, "--beta", "beta", "TV1 smoothing parameter");
  o.add<int>(app, "--min-side", "min_side", "smallest window side");
  o.add<int>(app, "--max-side", "max_side", "largest window side");
  o.add<std::string>(app, "--weights", "weights", "indicator | normalized");
  o.add<double>(app, "--alpha", "alpha", "quantile level in (0, 1)");
  o.add<double>(app, "--input-scale", "input_scale", "multiply input values");
  o.add<double>(app, "--lambda", "lambda", "ADMM step size");
  o.add<double>(app, "--tau", "tau", "ADMM stopping tolerance");
  o.add<int>(app, "--max-outer", "max_outer", "ADMM iteration cap");
  o.add<int>(app, "--prox-max-iter", "prox_max_iter", "inner prox iteration cap");
  o.add<int>(app, "--dykstra-max-sweeps", "dykstra_max_sweeps", "sweeps per projection");
  o.add<double>(app, "--epsilon-safe", "epsilon_safe", "standardization floor");
  o.add<double>(app, "--kernel-sigma", "kernel_sigma", "Gaussian blur sigma (pixels)");
  o.add<int>(app, "--kernel-radius", "kernel_radius", "kernel radius, 0 for default");
  o.add<std::uint64_t>(app, "--seed", "seed", "simulation seed");
  o.add<int>(app, "--n-trials", "n_trials", "quantile simulation trials");
  o.add<int>(app, "--threads", "threads", "worker threads, 0 for all cores");
  o.add<std::string>(app, "--quantile-table", "quantile_table", "quantile table file");
  o.add<int>(app, "--grid-side", "grid_side", "grid side for simulate-quantiles");
  // sigma is a number or the word "poisson"
  auto sigma = std::make_shared<std::string>();
  CLI::Option* opt = app->add_option("--sigma", *sigma, "noise level or \"poisson\"");
  o.setters.push_back([opt, sigma](json& doc) {
    if (opt->count() == 0) return;
    double x = 0.0;
    const char* b = sigma->data();
    const char* e = b + sigma->size();
    const auto [ptr, ec] = std::from_chars(b, e, x);
    if (ec == std::errc() && ptr == e) {
      doc["sigma"] = x;
    } else {
      doc["sigma"] = *sigma;
    }
  });
}

RunConfig resolve(const Overrides& o) {
  json doc = json::object();
  if (!o.config.empty()) {
    std::ifstream in(o.config);
    if (!in) throw InvalidArgument("cannot open config file '" + o.config + "'");
    try {
      doc = json::parse(in);
    } catch (const json::parse_error& e) {
      throw InvalidArgument("config file '" + o.config + "' is not valid JSON: " + e.what());
    }
  }
  for (const auto& set : o.setters) set(doc);
  return parse_config(doc);
}

// Best guess at the output directory before the config is valid.
std::filesystem::path output_dir_hint(const Overrides& o) {
  json doc = json::object();
  for (const auto& set : o.setters) set(doc);
  if (doc.contains("output_dir") && doc["output_dir"].is_string()) {
    return doc["output_dir"].get<std::string>();
  }
  if (!o.config.empty()) {
    try {
      std::ifstream in(o.config);
      const json file = json::parse(in);
      if (file.contains("output_dir") && file["output_dir"].is_string()) {
        return file["output_dir"].get<std::string>();
      }
    } catch (const std::exception&) {
      // fall through to the working directory
    }
  }
  return ".";
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Statistical multiresolution estimation"};
  app.require_subcommand(1);

  Overrides run_o, sim_o, eval_o;
  CLI::App* run_cmd = app.add_subcommand("run", "compute an estimate for each input");
  add_config_options(run_cmd, run_o);
  CLI::App* sim_cmd = app.add_subcommand("simulate-quantiles", "build or reuse a quantile table");
  add_config_options(sim_cmd, sim_o);
  CLI::App* eval_cmd = app.add_subcommand("evaluate", "score estimates against a truth signal");
  add_config_options(eval_cmd, eval_o);

  GenerateOptions gen;
  CLI::App* gen_cmd = app.add_subcommand("generate", "write synthetic truth and data");
  gen_cmd->add_option("--kind", gen.kind, "peak | filament | filament-blur")
      ->check(CLI::IsMember({"peak", "filament", "filament-blur"}));
  gen_cmd->add_option("--size", gen.size, "samples per axis");
  gen_cmd->add_option("--noise", gen.noise, "Gaussian noise level");
  gen_cmd->add_option("--kernel-sigma", gen.kernel_sigma, "blur sigma (filament-blur)");
  gen_cmd->add_option("--intensity", gen.intensity, "photon scale (filament-blur)");
  gen_cmd->add_option("--seed", gen.seed, "noise seed");
  gen_cmd->add_option("--trials", gen.trials, "number of data sets");
  gen_cmd->add_option("-o,--output-dir", gen.output_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  Context ctx;
  ctx.log = &out;
  if (*gen_cmd) {
    return guarded("generate", ctx, gen.output_dir, err, [&] { return generate(gen, ctx); });
  }
  struct Entry {
    CLI::App* cmd;
    Overrides* o;
    std::function<int(const RunConfig&, Context&)> body;
  };
  for (const Entry& e : {Entry{run_cmd, &run_o, run}, Entry{sim_cmd, &sim_o, simulate_quantiles},
                         Entry{eval_cmd, &eval_o, evaluate}}) {
    if (!*e.cmd) continue;
    return guarded(e.cmd->get_name(), ctx, output_dir_hint(*e.o), err, [&] {
      ctx.stage = "config";
      ctx.path = e.o->config;
      const RunConfig c = resolve(*e.o);
      ctx.path.clear();
      return e.body(c, ctx);
    });
  }
  return 1;
}

}  // namespace smre::app
