#include "smre/app/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "smre/error.hpp"

namespace smre::app {

namespace {

using nlohmann::json;

const std::set<std::string> kKeys = {
    "pipeline",     "input",          "truth",        "output_dir",
    "regularizer",  "beta",           "min_side",     "max_side",
    "transform",    "weights",        "alpha",        "sigma",
    "input_scale",  "lambda",         "tau",          "max_outer",
    "epsilon_safe", "kernel_sigma",   "kernel_radius", "seed",
    "n_trials",     "threads",        "quantile_table", "grid_side",
    "prox_max_iter", "dykstra_max_sweeps"};

[[noreturn]] void bad(const std::string& key, const std::string& why) {
  throw InvalidArgument("config field '" + key + "': " + why);
}

template <class T>
T get(const json& doc, const std::string& key) {
  try {
    return doc.at(key).get<T>();
  } catch (const json::exception&) {
    bad(key, "wrong type");
  }
}

double positive(const json& doc, const std::string& key) {
  const double v = get<double>(doc, key);
  if (!(v > 0.0) || !std::isfinite(v)) bad(key, "must be positive");
  return v;
}

double nonnegative(const json& doc, const std::string& key) {
  const double v = get<double>(doc, key);
  if (!(v >= 0.0) || !std::isfinite(v)) bad(key, "must be nonnegative");
  return v;
}

int count(const json& doc, const std::string& key, int lo) {
  const int v = get<int>(doc, key);
  if (v < lo) bad(key, "must be at least " + std::to_string(lo));
  return v;
}

}  // namespace

const char* to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Regress1d:
      return "regress1d";
    case Pipeline::Denoise2d:
      return "denoise2d";
    case Pipeline::Deconvolve:
      return "deconvolve";
  }
  return "unknown";
}

Pipeline pipeline_from_string(const std::string& name) {
  if (name == "regress1d") return Pipeline::Regress1d;
  if (name == "denoise2d") return Pipeline::Denoise2d;
  if (name == "deconvolve") return Pipeline::Deconvolve;
  throw InvalidArgument("unknown pipeline '" + name + "'");
}

RunConfig defaults_for(Pipeline p) {
  RunConfig c;
  c.pipeline = p;
  switch (p) {
    case Pipeline::Regress1d:
      break;
    case Pipeline::Denoise2d:
      c.regularizer = Regularizer::tv1beta(1e-8);
      c.max_side = 25;
      c.transform = Transform::Square;
      c.weights = WeightKind::Indicator;
      c.lambda = 0.25;
      break;
    case Pipeline::Deconvolve:
      c.regularizer = Regularizer::tv1beta(1e-8);
      c.max_side = 25;
      c.weights = WeightKind::Indicator;
      c.poisson = true;
      c.lambda = 0.05;
      c.tau = 0.0;
      c.max_outer = 100;
      c.prox_max_iter = 50;
      c.dykstra_max_sweeps = 500;
      break;
  }
  return c;
}

RunConfig parse_config(const json& doc) {
  if (!doc.is_object()) throw InvalidArgument("config must be a JSON object");
  for (const auto& [key, _] : doc.items()) {
    if (!kKeys.contains(key)) bad(key, "unknown key");
  }
  const Pipeline p = doc.contains("pipeline")
                         ? pipeline_from_string(get<std::string>(doc, "pipeline"))
                         : Pipeline::Regress1d;
  RunConfig c = defaults_for(p);

  if (doc.contains("input")) {
    const json& in = doc.at("input");
    if (in.is_string()) {
      c.inputs.emplace_back(in.get<std::string>());
    } else if (in.is_array()) {
      for (const json& e : in) {
        if (!e.is_string()) bad("input", "entries must be paths");
        c.inputs.emplace_back(e.get<std::string>());
      }
    } else {
      bad("input", "must be a path or a list of paths");
    }
  }
  if (doc.contains("truth")) c.truth = get<std::string>(doc, "truth");
  if (doc.contains("output_dir")) c.output_dir = get<std::string>(doc, "output_dir");
  if (doc.contains("grid_side")) c.grid_side = count(doc, "grid_side", 1);

  double beta = c.regularizer.kind == Regularizer::Kind::TV1Beta ? c.regularizer.beta : 1e-8;
  if (doc.contains("beta")) beta = positive(doc, "beta");
  if (doc.contains("regularizer")) {
    const std::string r = get<std::string>(doc, "regularizer");
    if (r == "tv2") {
      c.regularizer = Regularizer::tv2();
    } else if (r == "tv1beta") {
      c.regularizer = Regularizer::tv1beta(beta);
    } else if (r == "l1") {
      c.regularizer = Regularizer::l1();
    } else {
      bad("regularizer", "expected tv2, tv1beta or l1");
    }
  } else if (c.regularizer.kind == Regularizer::Kind::TV1Beta) {
    c.regularizer = Regularizer::tv1beta(beta);
  }

  if (doc.contains("min_side")) c.min_side = count(doc, "min_side", 1);
  if (doc.contains("max_side")) c.max_side = count(doc, "max_side", 1);
  if (c.max_side < c.min_side) bad("max_side", "must not be below min_side");
  if (doc.contains("transform")) {
    c.transform = transform_from_string(get<std::string>(doc, "transform").c_str());
  }
  if (doc.contains("weights")) {
    const std::string w = get<std::string>(doc, "weights");
    if (w == "indicator") {
      c.weights = WeightKind::Indicator;
    } else if (w == "normalized") {
      c.weights = WeightKind::Normalized;
    } else {
      bad("weights", "expected indicator or normalized");
    }
  }
  if (doc.contains("alpha")) {
    c.alpha = get<double>(doc, "alpha");
    if (!(c.alpha > 0.0 && c.alpha < 1.0)) bad("alpha", "must lie in (0, 1)");
  }
  if (doc.contains("sigma")) {
    const json& s = doc.at("sigma");
    if (s.is_string()) {
      if (s.get<std::string>() != "poisson") bad("sigma", "expected a number or \"poisson\"");
      c.poisson = true;
      c.sigma = 1.0;
    } else {
      c.sigma = positive(doc, "sigma");
      c.poisson = false;
    }
  }
  if (doc.contains("input_scale")) c.input_scale = positive(doc, "input_scale");
  if (doc.contains("lambda")) c.lambda = positive(doc, "lambda");
  if (doc.contains("tau")) c.tau = nonnegative(doc, "tau");
  if (doc.contains("max_outer")) c.max_outer = count(doc, "max_outer", 1);
  if (doc.contains("prox_max_iter")) c.prox_max_iter = count(doc, "prox_max_iter", 1);
  if (doc.contains("dykstra_max_sweeps")) {
    c.dykstra_max_sweeps = count(doc, "dykstra_max_sweeps", 1);
  }
  if (doc.contains("epsilon_safe")) c.epsilon_safe = nonnegative(doc, "epsilon_safe");
  if (doc.contains("kernel_sigma")) c.kernel_sigma = positive(doc, "kernel_sigma");
  if (doc.contains("kernel_radius")) c.kernel_radius = count(doc, "kernel_radius", 0);
  if (doc.contains("seed")) c.seed = get<std::uint64_t>(doc, "seed");
  if (doc.contains("n_trials")) c.n_trials = count(doc, "n_trials", 1);
  if (doc.contains("threads")) c.threads = count(doc, "threads", 0);
  if (doc.contains("quantile_table")) c.quantile_table = get<std::string>(doc, "quantile_table");

  const Transform expected =
      c.pipeline == Pipeline::Denoise2d ? Transform::Square : Transform::Identity;
  if (c.transform != expected) {
    bad("transform", std::string(to_string(c.pipeline)) + " uses the " +
                         to_string(expected) + " transform");
  }
  if (c.pipeline != Pipeline::Deconvolve && c.poisson) {
    bad("sigma", "\"poisson\" is only available for deconvolve");
  }
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument("cannot open config file '" + path.string() + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw InvalidArgument("config file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return parse_config(doc);
}

json to_json(const RunConfig& c) {
  json doc;
  doc["pipeline"] = to_string(c.pipeline);
  std::vector<std::string> inputs;
  for (const auto& p : c.inputs) inputs.push_back(p.string());
  doc["input"] = inputs;
  if (!c.truth.empty()) doc["truth"] = c.truth.string();
  doc["output_dir"] = c.output_dir.string();
  if (c.grid_side > 0) doc["grid_side"] = c.grid_side;
  doc["regularizer"] = to_string(c.regularizer);
  if (c.regularizer.kind == Regularizer::Kind::TV1Beta) doc["beta"] = c.regularizer.beta;
  doc["min_side"] = c.min_side;
  doc["max_side"] = c.max_side;
  doc["transform"] = to_string(c.transform);
  doc["weights"] = c.weights == WeightKind::Indicator ? "indicator" : "normalized";
  doc["alpha"] = c.alpha;
  if (c.poisson) {
    doc["sigma"] = "poisson";
  } else {
    doc["sigma"] = c.sigma;
  }
  doc["input_scale"] = c.input_scale;
  doc["lambda"] = c.lambda;
  doc["tau"] = c.tau;
  doc["max_outer"] = c.max_outer;
  doc["prox_max_iter"] = c.prox_max_iter;
  doc["dykstra_max_sweeps"] = c.dykstra_max_sweeps;
  doc["epsilon_safe"] = c.epsilon_safe;
  doc["kernel_sigma"] = c.kernel_sigma;
  doc["kernel_radius"] = c.kernel_radius;
  doc["seed"] = c.seed;
  doc["n_trials"] = c.n_trials;
  doc["threads"] = c.threads;
  if (!c.quantile_table.empty()) doc["quantile_table"] = c.quantile_table.string();
  return doc;
}

}  // namespace smre::app
