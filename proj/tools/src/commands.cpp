#include "smre/app/commands.hpp"

#include <atomic>
#include <cstdio>
#include <chrono>
#include <exception>
#include <fstream>
#include <map>
#include <mutex>
#include <ostream>
#include <set>
#include <thread>

#include "smre/app/io.hpp"
#include "smre/app/synthetic.hpp"
#include "smre/error.hpp"
#include "smre/metrics.hpp"

namespace smre::app {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void say(Context& ctx, const std::string& msg) {
  if (ctx.log) *ctx.log << "smre: " << msg << std::endl;
}

int grid_dim(Pipeline p) { return p == Pipeline::Regress1d ? 1 : 2; }

NoiseModel noise_for(const RunConfig& c) { return NoiseModel(c.poisson ? 1.0 : c.sigma); }

ConstraintSystem base_system(const RunConfig& c, const Grid& grid, double q) {
  const WindowSystem ws = enumerate(grid, c.min_side, effective_max_side(c, grid));
  const std::vector<double> coef = c.weights == WeightKind::Indicator
                                       ? indicator_coefficients(ws)
                                       : normalized_coefficients(ws);
  return ConstraintSystem::windowed(ws, Transform::Identity, q, coef);
}

QuantileTable request_for(const RunConfig& c, const Grid& grid) {
  const NoiseModel noise = noise_for(c);
  if (c.pipeline == Pipeline::Denoise2d) {
    return per_scale_request(grid, c.min_side, effective_max_side(c, grid), noise, c.alpha,
                             c.n_trials, c.seed);
  }
  return global_request(base_system(c, grid, 1.0), noise, c.alpha, c.n_trials, c.seed);
}

void write_json(const json& doc, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path);
  if (!out) throw Error("cannot open output file '" + path.string() + "'");
  out << doc.dump(2) << '\n';
  if (!out) throw Error("write failed for '" + path.string() + "'");
}

json table_summary(const QuantileTable& t) {
  json doc;
  doc["hash"] = t.hash();
  doc["kind"] = t.kind;
  doc["alpha"] = t.alpha;
  doc["sigma"] = t.sigma;
  doc["n_trials"] = t.n_trials;
  doc["seed"] = t.seed;
  if (t.kind == "global") {
    doc["q"] = t.global_q;
  } else {
    json s = json::object();
    for (const auto& [side, q] : t.per_scale) s[std::to_string(side)] = q;
    doc["per_scale"] = s;
  }
  return doc;
}

const char* error_type(const std::exception& e) {
  if (dynamic_cast<const ShapeMismatch*>(&e)) return "shape_mismatch";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "invalid_argument";
  if (dynamic_cast<const SolverError*>(&e)) return "solver_error";
  if (dynamic_cast<const std::filesystem::filesystem_error*>(&e)) return "io_error";
  if (dynamic_cast<const Error*>(&e)) return "error";
  return "internal";
}

int exit_code(const std::exception& e) {
  if (dynamic_cast<const InvalidArgument*>(&e)) return 2;  // includes ShapeMismatch
  if (dynamic_cast<const SolverError*>(&e)) return 3;
  return 1;
}

}  // namespace

int effective_max_side(const RunConfig& c, const Grid& grid) {
  if (c.min_side > grid.side()) {
    throw InvalidArgument("min_side " + std::to_string(c.min_side) + " exceeds grid side " +
                          std::to_string(grid.side()));
  }
  return std::min(c.max_side, grid.side());
}

QuantileTable obtain_table(const RunConfig& c, const Grid& grid, Context& ctx) {
  const QuantileTable req = request_for(c, grid);
  const std::filesystem::path dir = default_cache_directory();
  const std::string hash = req.hash();

  auto store = [&](const QuantileTable& t) {
    try {
      write_table(t, cache_file(dir, hash));
    } catch (const std::exception& e) {
      say(ctx, std::string("warning: quantile cache not written: ") + e.what());
    }
    if (!c.quantile_table.empty() && !std::filesystem::exists(c.quantile_table)) {
      write_table(t, c.quantile_table);
    }
  };

  if (auto hit = load_cached(req, dir)) {
    say(ctx, "quantile cache hit " + hash + " (" + cache_file(dir, hash).string() + ")");
    if (!c.quantile_table.empty() && !std::filesystem::exists(c.quantile_table)) {
      write_table(*hit, c.quantile_table);
    }
    return *hit;
  }
  if (!c.quantile_table.empty() && std::filesystem::exists(c.quantile_table)) {
    ctx.path = c.quantile_table;
    const QuantileTable t = read_table(c.quantile_table);
    if (t.hash() != hash) {
      throw InvalidArgument("quantile table '" + c.quantile_table.string() +
                            "' was built for a different setting (hash " + t.hash() +
                            ", expected " + hash + ")");
    }
    say(ctx, "quantile table loaded from " + c.quantile_table.string());
    store(t);
    return t;
  }
  say(ctx, "simulating quantile table " + hash + " (" + std::to_string(c.n_trials) +
               " trials)");
  const NoiseModel noise = noise_for(c);
  const QuantileTable t =
      c.pipeline == Pipeline::Denoise2d
          ? per_scale_constants(grid, c.min_side, effective_max_side(c, grid), noise, c.alpha,
                                c.n_trials, c.seed, c.threads)
          : simulate_global_quantile(base_system(c, grid, 1.0), noise, c.alpha, c.n_trials,
                                     c.seed, c.threads);
  store(t);
  return t;
}

ConstraintSystem assemble_system(const RunConfig& c, const Grid& grid,
                                 const QuantileTable& table) {
  if (c.pipeline == Pipeline::Denoise2d) {
    const int smax = effective_max_side(c, grid);
    const WindowSystem ws = enumerate(grid, c.min_side, smax);
    return ConstraintSystem::windowed(ws, Transform::Square, 1.0,
                                      scale_coefficients(table, c.min_side, smax));
  }
  return base_system(c, grid, table.global_q);
}

LinearOperator assemble_operator(const RunConfig& c, const Grid& grid) {
  if (c.pipeline != Pipeline::Deconvolve) return LinearOperator::identity(grid);
  const int radius = c.kernel_radius > 0 ? c.kernel_radius : default_radius(c.kernel_sigma);
  return LinearOperator::convolution(grid, gaussian_kernel(c.kernel_sigma, radius, grid.dim()));
}

AdmmConfig solver_config(const RunConfig& c) {
  AdmmConfig a;
  a.lambda = c.lambda;
  a.tau = c.tau;
  a.max_outer = c.max_outer;
  a.prox_max_iter = c.prox_max_iter;
  a.dykstra_max_sweeps = c.dykstra_max_sweeps;
  // the lagged-standardization variant runs at a fixed subproblem accuracy
  a.tighten_tolerances = !c.poisson;
  a.epsilon_safe = c.epsilon_safe;
  return a;
}

RunResult solve(const RunConfig& c, const SignalArray& y, const QuantileTable& table) {
  if (y.grid().dim() != grid_dim(c.pipeline)) {
    throw InvalidArgument(std::string(to_string(c.pipeline)) + " expects " +
                          std::to_string(grid_dim(c.pipeline)) + "D data");
  }
  auto t0 = Clock::now();
  const ConstraintSystem sys = assemble_system(c, y.grid(), table);
  const LinearOperator k = assemble_operator(c, y.grid());
  const double t_assemble = seconds_since(t0);

  t0 = Clock::now();
  const AdmmConfig acfg = solver_config(c);
  AdmmReport rep = c.poisson ? admm_solve_poisson(k, y, c.regularizer, sys, acfg)
                             : admm_solve(k, y, c.regularizer, sys, acfg);
  const double t_solve = seconds_since(t0);

  json d;
  d["pipeline"] = to_string(c.pipeline);
  d["grid"] = {{"dim", y.grid().dim()}, {"side", y.grid().side()}};
  d["regularizer"] = to_string(c.regularizer);
  d["q"] = sys.q();
  d["quantile_table"] = table.hash();
  d["lambda"] = c.lambda;
  d["tau"] = c.tau;
  d["status"] = to_string(rep.status);
  d["iterations"] = rep.iterations;
  d["k_tau"] = rep.status == ExitStatus::Converged ? json(rep.iterations) : json(nullptr);
  d["residuals"] = rep.residuals;
  d["objective"] = rep.objective;
  d["dykstra_sweeps"] = rep.dykstra_sweeps;
  d["unconverged_projections"] = rep.unconverged_projections;
  d["unconverged_prox"] = rep.unconverged_prox;
  d["final_statistic"] = rep.statistic;
  d["data_statistic"] = rep.data_statistic;
  d["lagged_standardization"] = rep.lagged_standardization;
  if (rep.lagged_standardization) d["epsilon_safe"] = rep.epsilon_safe;
  d["stage_seconds"] = {{"assemble", t_assemble},
                        {"solve", t_solve},
                        {"projection", rep.projection_seconds},
                        {"prox", rep.prox_seconds}};
  SignalArray u = rep.u;
  return RunResult{std::move(u), std::move(rep), std::move(d)};
}

int run(const RunConfig& c, Context& ctx) {
  ctx.stage = "validate";
  if (c.inputs.empty()) throw InvalidArgument("no input given");
  std::set<std::string> stems;
  for (const auto& in : c.inputs) {
    if (!stems.insert(in.stem().string()).second) {
      ctx.path = in;
      throw InvalidArgument("two inputs share the file stem '" + in.stem().string() + "'");
    }
  }

  struct Job {
    std::filesystem::path input;
    SignalArray y;
    double load_seconds = 0.0;
    const QuantileTable* table = nullptr;
  };
  std::vector<Job> jobs;
  std::map<std::pair<int, int>, QuantileTable> tables;
  for (const auto& in : c.inputs) {
    ctx.stage = "load";
    ctx.path = in;
    const auto t0 = Clock::now();
    SignalArray y = read_signal(in);
    if (c.input_scale != 1.0) y *= c.input_scale;
    if (y.grid().dim() != grid_dim(c.pipeline)) {
      throw InvalidArgument("'" + in.string() + "': " + to_string(c.pipeline) + " expects " +
                            std::to_string(grid_dim(c.pipeline)) + "D data");
    }
    jobs.push_back({in, std::move(y), seconds_since(t0), nullptr});
  }
  std::map<std::pair<int, int>, double> table_seconds;
  for (Job& j : jobs) {
    const std::pair<int, int> key{j.y.grid().dim(), j.y.grid().side()};
    if (!tables.contains(key)) {
      ctx.stage = "quantiles";
      ctx.path = j.input;
      const auto t0 = Clock::now();
      tables.emplace(key, obtain_table(c, j.y.grid(), ctx));
      table_seconds[key] = seconds_since(t0);
    }
    j.table = &tables.at(key);
  }

  ctx.stage = "solve";
  std::filesystem::create_directories(c.output_dir);
  const std::size_t workers = std::min<std::size_t>(
      jobs.size(), c.threads > 0 ? static_cast<std::size_t>(c.threads)
                                 : std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::exception_ptr> errors(jobs.size());
  std::vector<std::string> stages(jobs.size(), "solve");
  std::atomic<std::size_t> next{0};
  std::mutex log_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < jobs.size(); i = next++) {
      Job& j = jobs[i];
      try {
        RunResult res = solve(c, j.y, *j.table);
        stages[i] = "write";
        const auto t0 = Clock::now();
        const std::string stem = j.input.stem().string();
        const std::filesystem::path base = c.output_dir / stem;
        write_csv(res.estimate, base.string() + ".estimate.csv");
        json& d = res.diagnostics;
        if (res.estimate.grid().dim() == 2) {
          const PgmScale sc = write_pgm(res.estimate, base.string() + ".estimate.pgm");
          d["pgm"] = {{"offset", sc.offset}, {"scale", sc.scale}};
        }
        d["input"] = j.input.string();
        d["config"] = to_json(c);
        d["stage_seconds"]["load"] = j.load_seconds;
        d["stage_seconds"]["quantiles"] =
            table_seconds[{j.y.grid().dim(), j.y.grid().side()}];
        d["stage_seconds"]["write"] = seconds_since(t0);
        write_json(d, base.string() + ".diagnostics.json");
        std::lock_guard lock(log_mutex);
        say(ctx, j.input.string() + ": " + to_string(res.report.status) + " after " +
                     std::to_string(res.report.iterations) + " iterations");
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& t : pool) t.join();
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    if (errors[i]) {
      ctx.stage = stages[i];
      ctx.path = jobs[i].input;
      std::rethrow_exception(errors[i]);
    }
  }
  return 0;
}

int simulate_quantiles(const RunConfig& c, Context& ctx) {
  ctx.stage = "validate";
  Grid grid;
  if (c.grid_side > 0) {
    grid = Grid(grid_dim(c.pipeline), c.grid_side);
  } else if (!c.inputs.empty()) {
    ctx.stage = "load";
    ctx.path = c.inputs.front();
    grid = read_signal(c.inputs.front()).grid();
  } else {
    throw InvalidArgument("simulate-quantiles needs grid_side or an input file");
  }
  ctx.stage = "quantiles";
  const QuantileTable t = obtain_table(c, grid, ctx);
  json out = table_summary(t);
  out["cache_file"] = cache_file(default_cache_directory(), t.hash()).string();
  if (ctx.log) *ctx.log << out.dump() << std::endl;
  return 0;
}

int evaluate(const RunConfig& c, Context& ctx) {
  ctx.stage = "validate";
  if (c.truth.empty()) throw InvalidArgument("evaluate needs a truth path");
  if (c.inputs.empty()) throw InvalidArgument("evaluate needs at least one estimate");
  ctx.stage = "load";
  ctx.path = c.truth;
  const SignalArray truth = read_signal(c.truth);

  json records = json::array();
  double sums[3] = {0, 0, 0};
  double maxima = 0.0;
  for (const auto& in : c.inputs) {
    ctx.stage = "load";
    ctx.path = in;
    const SignalArray est = read_signal(in);
    ctx.stage = "metrics";
    const MetricReport m = evaluate_metrics(est, truth, c.regularizer);
    json r;
    r["estimate"] = in.string();
    r["ise"] = m.ise;
    r["iae"] = m.iae;
    r["bregman"] = m.bregman;
    r["local_maxima"] = m.local_maxima >= 0 ? json(m.local_maxima) : json(nullptr);
    records.push_back(r);
    sums[0] += m.ise;
    sums[1] += m.iae;
    sums[2] += m.bregman;
    maxima += m.local_maxima;
  }
  const double n = static_cast<double>(records.size());
  json doc;
  doc["schema"] = "smre-metrics/1";
  doc["truth"] = c.truth.string();
  doc["regularizer"] = to_string(c.regularizer);
  doc["records"] = records;
  doc["aggregate"] = {{"trials", records.size()},
                      {"mise", sums[0] / n},
                      {"miae", sums[1] / n},
                      {"msb", sums[2] / n},
                      {"mlm", truth.grid().dim() == 1 ? json(maxima / n) : json(nullptr)}};
  validate_metrics(doc);
  ctx.stage = "write";
  ctx.path = c.output_dir / "metrics.json";
  write_json(doc, ctx.path);
  say(ctx, "metrics for " + std::to_string(records.size()) + " estimate(s) written to " +
               ctx.path.string());
  return 0;
}

int generate(const GenerateOptions& o, Context& ctx) {
  ctx.stage = "validate";
  if (o.trials < 1) throw InvalidArgument("trials must be positive");
  SignalArray truth;
  if (o.kind == "peak") {
    truth = peak_train(o.size);
  } else if (o.kind == "filament" || o.kind == "filament-blur") {
    truth = two_filament(o.size);
  } else {
    throw InvalidArgument("unknown synthetic kind '" + o.kind + "'");
  }
  ctx.stage = "write";
  std::filesystem::create_directories(o.output_dir);
  write_csv(truth, o.output_dir / "truth.csv");
  if (truth.grid().dim() == 2) write_pgm(truth, o.output_dir / "truth.pgm");
  json files = json::array();
  for (int t = 0; t < o.trials; ++t) {
    ctx.stage = "generate";
    const SignalArray y =
        o.kind == "filament-blur"
            ? blur_poisson(truth, o.kernel_sigma, o.intensity, o.seed + static_cast<std::uint64_t>(t))
            : add_gaussian_noise(truth, o.noise, o.seed, static_cast<std::uint64_t>(t));
    ctx.stage = "write";
    std::string name = "data";
    if (o.trials > 1) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "_%03d", t);
      name += buf;
    }
    write_csv(y, o.output_dir / (name + ".csv"));
    if (y.grid().dim() == 2) write_pgm(y, o.output_dir / (name + ".pgm"));
    files.push_back(name + ".csv");
  }
  json manifest;
  manifest["kind"] = o.kind;
  manifest["size"] = o.size;
  manifest["seed"] = o.seed;
  manifest["trials"] = o.trials;
  if (o.kind == "filament-blur") {
    manifest["kernel_sigma"] = o.kernel_sigma;
    manifest["intensity"] = o.intensity;
  } else {
    manifest["noise"] = o.noise;
  }
  if (o.kind == "peak") manifest["truth_local_maxima"] = count_local_maxima(truth);
  manifest["truth"] = "truth.csv";
  manifest["data"] = files;
  write_json(manifest, o.output_dir / "generate.json");
  say(ctx, "wrote " + std::to_string(o.trials) + " data set(s) to " + o.output_dir.string());
  return 0;
}

void validate_metrics(const json& doc) {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidArgument("metrics record: " + what);
  };
  auto nonneg = [&](const json& obj, const char* key) {
    need(obj.contains(key) && obj.at(key).is_number(), std::string(key) + " must be a number");
    need(obj.at(key).get<double>() >= 0.0, std::string(key) + " must be nonnegative");
  };
  need(doc.is_object(), "not an object");
  need(doc.value("schema", "") == "smre-metrics/1", "schema must be smre-metrics/1");
  need(doc.contains("truth") && doc.at("truth").is_string(), "truth must be a string");
  need(doc.contains("regularizer") && doc.at("regularizer").is_string(),
       "regularizer must be a string");
  need(doc.contains("records") && doc.at("records").is_array(), "records must be an array");
  need(!doc.at("records").empty(), "records must not be empty");
  bool one_d = true;
  for (const json& r : doc.at("records")) {
    need(r.is_object(), "record must be an object");
    need(r.contains("estimate") && r.at("estimate").is_string(), "estimate must be a string");
    nonneg(r, "ise");
    nonneg(r, "iae");
    nonneg(r, "bregman");
    need(r.contains("local_maxima"), "local_maxima missing");
    const json& lm = r.at("local_maxima");
    need(lm.is_null() || (lm.is_number_integer() && lm.get<int>() >= 1),
         "local_maxima must be null or a positive integer");
    one_d = one_d && !lm.is_null();
  }
  need(doc.contains("aggregate") && doc.at("aggregate").is_object(),
       "aggregate must be an object");
  const json& a = doc.at("aggregate");
  need(a.contains("trials") && a.at("trials").is_number_integer() &&
           a.at("trials").get<std::size_t>() == doc.at("records").size(),
       "aggregate trials must equal the record count");
  nonneg(a, "mise");
  nonneg(a, "miae");
  nonneg(a, "msb");
  need(a.contains("mlm"), "aggregate mlm missing");
  need(one_d ? a.at("mlm").is_number() : a.at("mlm").is_null(),
       "aggregate mlm must be a number for 1D records and null otherwise");
}

json error_record(const std::string& command, const Context& ctx, const std::exception& e) {
  json err;
  err["command"] = command;
  err["stage"] = ctx.stage;
  err["type"] = error_type(e);
  err["message"] = e.what();
  err["path"] = ctx.path.empty() ? json(nullptr) : json(ctx.path.string());
  if (const auto* s = dynamic_cast<const SolverError*>(&e)) err["residual"] = s->residual();
  return json{{"error", err}};
}

int guarded(const std::string& command, Context& ctx, const std::filesystem::path& output_dir,
            std::ostream& err, const std::function<int()>& body) {
  const std::filesystem::path record = output_dir / "error.json";
  try {
    std::error_code ec;
    std::filesystem::remove(record, ec);
    return body();
  } catch (const std::exception& e) {
    const json rec = error_record(command, ctx, e);
    err << rec.dump() << std::endl;
    try {
      std::filesystem::create_directories(output_dir);
      std::ofstream out(record);
      out << rec.dump(2) << '\n';
    } catch (const std::exception&) {
      // the stderr record is authoritative
    }
    return exit_code(e);
  }
}

}  // namespace smre::app
