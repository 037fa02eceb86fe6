#include "smre/quantiles.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "smre/error.hpp"
#include "smre/random.hpp"

namespace smre {

namespace {

std::string fmt(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("quantile table: bad number '" + s + "'");
  }
  return x;
}

template <class Int>
Int parse_int(const std::string& s) {
  Int x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error("quantile table: bad integer '" + s + "'");
  }
  return x;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

void validate_request(double alpha, int n_trials) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidArgument("alpha must lie in (0, 1)");
  if (n_trials < 100) throw InvalidArgument("n_trials must be at least 100");
}

// Runs f(trial) for every trial, spread over worker threads.
template <class F>
void for_each_trial(int n_trials, int threads, F&& f) {
  int workers = threads > 0 ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_trials);
  if (workers <= 1) {
    for (int t = 0; t < n_trials; ++t) f(t);
    return;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        for (int t = w; t < n_trials; t += workers) f(t);
      } catch (...) {
        errors[static_cast<std::size_t>(w)] = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

SignalArray noise_field(const Grid& grid, double sigma, std::uint64_t seed, int trial) {
  NormalStream rng(seed, static_cast<std::uint64_t>(trial));
  SignalArray eps(grid, 0.0);
  for (double& x : eps.values()) x = sigma * rng();
  return eps;
}

std::string key_text(const QuantileTable& t) {
  std::ostringstream os;
  os << "kind=" << t.kind << "\nalpha=" << fmt(t.alpha) << "\nsigma=" << fmt(t.sigma)
     << "\nn_trials=" << t.n_trials << "\nseed=" << t.seed
     << "\ntransform=" << to_string(t.transform) << "\nsystem=" << t.system << "\n";
  return os.str();
}

}  // namespace

std::string QuantileTable::hash() const {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(fnv1a(key_text(*this))));
  return buf;
}

double empirical_quantile(std::vector<double> samples, double level) {
  if (samples.empty()) throw InvalidArgument("empirical_quantile: no samples");
  if (!(level > 0.0 && level <= 1.0)) {
    throw InvalidArgument("empirical_quantile: level must lie in (0, 1]");
  }
  const auto n = samples.size();
  auto pos = static_cast<std::size_t>(std::ceil(level * static_cast<double>(n)));
  pos = std::clamp<std::size_t>(pos, 1, n);
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(pos - 1),
                   samples.end());
  return samples[pos - 1];
}

std::vector<double> simulate_statistics(const ConstraintSystem& system,
                                        const NoiseModel& noise, int n_trials,
                                        std::uint64_t seed, int threads) {
  if (system.size() == 0) throw InvalidArgument("degenerate constraint system");
  std::vector<double> out(static_cast<std::size_t>(std::max(n_trials, 0)));
  for_each_trial(n_trials, threads, [&](int t) {
    out[static_cast<std::size_t>(t)] =
        mr_statistic(system, noise_field(system.grid(), noise.sigma, seed, t));
  });
  return out;
}

std::vector<std::vector<double>> simulate_scale_maxima(
    const Grid& grid, int min_side, int max_side, const NoiseModel& noise,
    int n_trials, std::uint64_t seed, int threads) {
  const WindowSystem ws = enumerate(grid, min_side, max_side);
  std::vector<std::vector<double>> out(static_cast<std::size_t>(std::max(n_trials, 0)));
  for_each_trial(n_trials, threads, [&](int t) {
    SignalArray sq = noise_field(grid, noise.sigma, seed, t);
    for (double& x : sq.values()) x *= x;
    out[static_cast<std::size_t>(t)] = side_maxima(ws, sq);
  });
  return out;
}

QuantileTable global_request(const ConstraintSystem& system, const NoiseModel& noise,
                             double alpha, int n_trials, std::uint64_t seed) {
  QuantileTable t;
  t.kind = "global";
  t.alpha = alpha;
  t.sigma = noise.sigma;
  t.n_trials = n_trials;
  t.seed = seed;
  t.transform = system.transform();
  t.system = system.with_threshold(1.0).describe();
  return t;
}

QuantileTable per_scale_request(const Grid& grid, int min_side, int max_side,
                                const NoiseModel& noise, double alpha,
                                int n_trials, std::uint64_t seed) {
  QuantileTable t;
  t.kind = "per_scale";
  t.alpha = alpha;
  t.sigma = noise.sigma;
  t.n_trials = n_trials;
  t.seed = seed;
  t.transform = Transform::Square;
  t.system = "grid=" + std::to_string(grid.dim()) + "x" + std::to_string(grid.side()) +
             ";sides=" + std::to_string(min_side) + ".." + std::to_string(max_side);
  return t;
}

QuantileTable simulate_global_quantile(const ConstraintSystem& system,
                                       const NoiseModel& noise, double alpha,
                                       int n_trials, std::uint64_t seed,
                                       int threads) {
  validate_request(alpha, n_trials);
  QuantileTable t = global_request(system, noise, alpha, n_trials, seed);
  t.global_q = empirical_quantile(simulate_statistics(system, noise, n_trials, seed, threads),
                                  alpha);
  return t;
}

QuantileTable per_scale_constants(const Grid& grid, int min_side, int max_side,
                                  const NoiseModel& noise, double alpha,
                                  int n_trials, std::uint64_t seed, int threads) {
  validate_request(alpha, n_trials);
  QuantileTable t = per_scale_request(grid, min_side, max_side, noise, alpha, n_trials, seed);
  const auto maxima =
      simulate_scale_maxima(grid, min_side, max_side, noise, n_trials, seed, threads);
  std::vector<double> column(maxima.size());
  for (int s = min_side; s <= max_side; ++s) {
    const auto k = static_cast<std::size_t>(s - min_side);
    for (std::size_t i = 0; i < maxima.size(); ++i) column[i] = maxima[i][k];
    t.per_scale[s] = empirical_quantile(column, alpha);
  }
  return t;
}

std::vector<double> scale_coefficients(const QuantileTable& table, int min_side,
                                       int max_side) {
  std::vector<double> out;
  for (int s = min_side; s <= max_side; ++s) {
    auto it = table.per_scale.find(s);
    if (it == table.per_scale.end()) {
      throw InvalidArgument("quantile table has no entry for side " + std::to_string(s));
    }
    if (!(it->second > 0.0)) {
      throw InvalidArgument("non-positive quantile for side " + std::to_string(s));
    }
    out.push_back(1.0 / it->second);
  }
  return out;
}

std::string serialize(const QuantileTable& table) {
  std::ostringstream os;
  os << "# smre quantile table\n" << key_text(table);
  os << "global_q=" << fmt(table.global_q) << "\n";
  for (const auto& [s, q] : table.per_scale) os << "scale." << s << "=" << fmt(q) << "\n";
  os << "hash=" << table.hash() << "\n";
  return os.str();
}

QuantileTable parse_table(const std::string& text) {
  QuantileTable t;
  std::string stored_hash;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("quantile table: malformed line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    if (key == "kind") {
      t.kind = val;
    } else if (key == "alpha") {
      t.alpha = parse_double(val);
    } else if (key == "sigma") {
      t.sigma = parse_double(val);
    } else if (key == "n_trials") {
      t.n_trials = parse_int<int>(val);
    } else if (key == "seed") {
      t.seed = parse_int<std::uint64_t>(val);
    } else if (key == "transform") {
      t.transform = transform_from_string(val.c_str());
    } else if (key == "system") {
      t.system = val;
    } else if (key == "global_q") {
      t.global_q = parse_double(val);
    } else if (key.rfind("scale.", 0) == 0) {
      t.per_scale[parse_int<int>(key.substr(6))] = parse_double(val);
    } else if (key == "hash") {
      stored_hash = val;
    } else {
      throw Error("quantile table: unknown key '" + key + "'");
    }
  }
  if (stored_hash != t.hash()) throw Error("quantile table: hash mismatch");
  return t;
}

void write_table(const QuantileTable& table, const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  // write then rename so readers never see a partial file
  const std::filesystem::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary);
    if (!out) throw Error("cannot write quantile table " + tmp.string());
    out << serialize(table);
    if (!out) throw Error("cannot write quantile table " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

QuantileTable read_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read quantile table " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_table(ss.str());
}

std::filesystem::path default_cache_directory() {
  if (const char* env = std::getenv("SMRE_QUANTILE_CACHE"); env && *env) return env;
  return ".smre-cache";
}

std::filesystem::path cache_file(const std::filesystem::path& dir, const std::string& hash) {
  return dir / ("quantiles-" + hash + ".txt");
}

std::optional<QuantileTable> load_cached(const QuantileTable& request,
                                         const std::filesystem::path& dir) {
  const auto path = cache_file(dir, request.hash());
  if (!std::filesystem::exists(path)) return std::nullopt;
  try {
    QuantileTable t = read_table(path);
    if (t.hash() != request.hash()) return std::nullopt;
    return t;
  } catch (const Error&) {
    return std::nullopt;
  }
}

}  // namespace smre
