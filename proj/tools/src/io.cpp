#include "smre/app/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <vector>

#include "smre/error.hpp"

namespace smre::app {

namespace {

[[noreturn]] void fail(const std::filesystem::path& path, const std::string& why) {
  throw InvalidArgument("'" + path.string() + "': " + why);
}

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_number(std::string_view text, const std::filesystem::path& path, int line) {
  text = trim(text);
  double x = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), x);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    fail(path, "line " + std::to_string(line) + ": not a number '" + std::string(text) + "'");
  }
  if (!std::isfinite(x)) fail(path, "line " + std::to_string(line) + ": non-finite value");
  return x;
}

void ensure_parent(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
}

// Next header token of a PNM file, skipping whitespace and comments.
std::string pnm_token(std::istream& in) {
  std::string tok;
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      if (!tok.empty()) return tok;
    } else {
      tok.push_back(static_cast<char>(c));
    }
    c = in.get();
  }
  return tok;
}

}  // namespace

std::string format_double(double x) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, ptr);
}

SignalArray read_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail(path, "cannot open input file");
  std::vector<std::vector<double>> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string_view t = trim(line);
    if (t.empty()) continue;
    std::vector<double> row;
    std::size_t start = 0;
    while (true) {
      const std::size_t comma = t.find(',', start);
      row.push_back(parse_number(t.substr(start, comma - start), path, lineno));
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) fail(path, "no values");
  const std::size_t cols = rows.front().size();
  for (const auto& r : rows) {
    if (r.size() != cols) fail(path, "ragged rows");
  }
  if (cols == 1) {
    std::vector<double> v;
    for (const auto& r : rows) v.push_back(r[0]);
    const int n = static_cast<int>(v.size());
    return SignalArray(Grid(1, n), std::move(v));
  }
  if (cols != rows.size()) fail(path, "matrix must be square");
  std::vector<double> v;
  v.reserve(cols * cols);
  for (const auto& r : rows) v.insert(v.end(), r.begin(), r.end());
  return SignalArray(Grid(2, static_cast<int>(cols)), std::move(v));
}

void write_csv(const SignalArray& s, const std::filesystem::path& path) {
  ensure_parent(path);
  std::ofstream out(path);
  if (!out) fail(path, "cannot open output file");
  const Grid& g = s.grid();
  if (g.dim() == 1) {
    for (double x : s.values()) out << format_double(x) << '\n';
  } else if (g.dim() == 2) {
    const std::size_t m = static_cast<std::size_t>(g.side());
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) {
        if (c) out << ',';
        out << format_double(s[r * m + c]);
      }
      out << '\n';
    }
  } else {
    fail(path, "CSV output supports 1D and 2D signals");
  }
  if (!out) fail(path, "write failed");
}

SignalArray read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(path, "cannot open input file");
  if (pnm_token(in) != "P5") fail(path, "not a binary PGM (P5)");
  int w = 0, h = 0, maxval = 0;
  try {
    w = std::stoi(pnm_token(in));
    h = std::stoi(pnm_token(in));
    maxval = std::stoi(pnm_token(in));
  } catch (const std::exception&) {
    fail(path, "malformed PGM header");
  }
  if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 65535) fail(path, "malformed PGM header");
  if (w != h) fail(path, "image must be square");
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  const std::size_t bytes = maxval > 255 ? 2 : 1;
  std::vector<unsigned char> raw(n * bytes);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  if (static_cast<std::size_t>(in.gcount()) != raw.size()) fail(path, "truncated pixel data");
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = bytes == 2 ? static_cast<double>((raw[2 * i] << 8) | raw[2 * i + 1]) : raw[i];
  }
  return SignalArray(Grid(2, w), std::move(v));
}

PgmScale write_pgm(const SignalArray& s, const std::filesystem::path& path) {
  if (s.grid().dim() != 2) fail(path, "PGM output needs a 2D signal");
  ensure_parent(path);
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(path, "cannot open output file");
  const auto [lo, hi] = std::minmax_element(s.values().begin(), s.values().end());
  PgmScale sc{*lo, *hi > *lo ? (*hi - *lo) / 255.0 : 1.0};
  const int m = s.grid().side();
  out << "P5\n" << m << ' ' << m << "\n255\n";
  std::vector<unsigned char> pix(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double t = std::round((s[i] - sc.offset) / sc.scale);
    pix[i] = static_cast<unsigned char>(std::clamp(t, 0.0, 255.0));
  }
  out.write(reinterpret_cast<const char*>(pix.data()), static_cast<std::streamsize>(pix.size()));
  if (!out) fail(path, "write failed");
  return sc;
}

SignalArray read_signal(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) fail(path, "input file does not exist");
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  if (ext == ".pgm") return read_pgm(path);
  if (ext == ".csv" || ext == ".txt") return read_csv(path);
  fail(path, "unsupported extension (expected .csv or .pgm)");
}

}  // namespace smre::app
