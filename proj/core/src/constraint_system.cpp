#include "smre/constraint_system.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

#include "smre/error.hpp"

namespace smre {

namespace {

std::string format_double(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

void validate_q(double q) {
  if (!(q > 0.0) || !std::isfinite(q)) {
    throw InvalidArgument("constraint threshold q must be positive and finite");
  }
}

}  // namespace

ConstraintSystem ConstraintSystem::windowed(const WindowSystem& windows,
                                            Transform transform, double q,
                                            std::vector<double> side_coefficients) {
  validate_q(q);
  const auto sides =
      static_cast<std::size_t>(windows.max_side() - windows.min_side() + 1);
  if (side_coefficients.size() != sides) {
    throw ShapeMismatch("expected one coefficient per window side");
  }
  for (double c : side_coefficients) {
    if (!std::isfinite(c)) throw InvalidArgument("non-finite side coefficient");
    if (transform == Transform::Square && c < 0.0) {
      throw InvalidArgument("square transform requires nonnegative weights");
    }
  }
  ConstraintSystem s;
  s.grid_ = windows.grid();
  s.transform_ = transform;
  s.q_ = q;
  s.windows_ = std::make_shared<const WindowSystem>(windows);
  s.coefficients_ = std::move(side_coefficients);
  s.partition_ = std::make_shared<const Partition>(partition_disjoint(windows));
  return s;
}

ConstraintSystem ConstraintSystem::dense(const Grid& grid,
                                         std::vector<SignalArray> weights,
                                         Transform transform, double q) {
  validate_q(q);
  if (transform == Transform::Square) {
    // a weighted sum of squares is an ellipsoid, which has no closed-form
    // projection
    throw InvalidArgument("square transform requires windowed weights");
  }
  for (const SignalArray& w : weights) {
    require_same_grid(grid, w.grid(), "ConstraintSystem::dense");
    if (norm(w) == 0.0) throw InvalidArgument("constraint weight is zero");
  }
  ConstraintSystem s;
  s.grid_ = grid;
  s.transform_ = transform;
  s.q_ = q;
  s.partition_ = std::make_shared<const Partition>(partition_by_support(weights));
  s.dense_ = std::make_shared<const std::vector<SignalArray>>(std::move(weights));
  return s;
}

ConstraintSystem ConstraintSystem::with_modulation(SignalArray modulation) const {
  if (!is_windowed()) throw InvalidArgument("modulation needs a windowed system");
  require_same_grid(grid_, modulation.grid(), "with_modulation");
  if (transform_ == Transform::Square) {
    const double first = modulation[0];
    for (std::size_t i = 0; i < modulation.size(); ++i) {
      if (modulation[i] != first) {
        throw InvalidArgument(
            "square transform only admits a constant modulation");
      }
    }
    if (first < 0.0) {
      throw InvalidArgument("square transform requires nonnegative weights");
    }
  }
  ConstraintSystem s = *this;
  s.modulation_ = std::make_shared<const SignalArray>(std::move(modulation));
  return s;
}

ConstraintSystem ConstraintSystem::with_threshold(double q) const {
  validate_q(q);
  ConstraintSystem s = *this;
  s.q_ = q;
  return s;
}

std::size_t ConstraintSystem::size() const {
  return is_windowed() ? windows_->size() : dense_->size();
}

double ConstraintSystem::coefficient(int side) const {
  return coefficients_.at(static_cast<std::size_t>(side - windows_->min_side()));
}

const SignalArray& ConstraintSystem::dense_weight(std::size_t index) const {
  if (!dense_) throw InvalidArgument("not a dense constraint system");
  return dense_->at(index);
}

SignalArray ConstraintSystem::weight(std::size_t index) const {
  if (!is_windowed()) return dense_weight(index);
  const Window w = (*windows_)[index];
  const double c = coefficient(w.side);
  SignalArray out(grid_, 0.0);
  windows_->for_each_run(w, [&](std::size_t off, std::size_t len) {
    for (std::size_t i = off; i < off + len; ++i) {
      out[i] = modulation_ ? c * (*modulation_)[i] : c;
    }
  });
  return out;
}

double ConstraintSystem::average(std::size_t index, const SignalArray& v) const {
  require_same_grid(grid_, v.grid(), "ConstraintSystem::average");
  if (!is_windowed()) return smre::average(dense_weight(index), transform_, v);
  const Window w = (*windows_)[index];
  double acc = 0.0;
  windows_->for_each_run(w, [&](std::size_t off, std::size_t len) {
    for (std::size_t i = off; i < off + len; ++i) {
      const double t = apply(transform_, v[i]);
      acc += modulation_ ? (*modulation_)[i] * t : t;
    }
  });
  return std::abs(coefficient(w.side) * acc);
}

std::string ConstraintSystem::describe() const {
  std::ostringstream os;
  os << "grid=" << grid_.dim() << "x" << grid_.side()
     << ";transform=" << to_string(transform_) << ";q=" << format_double(q_);
  if (is_windowed()) {
    os << ";sides=" << windows_->min_side() << ".." << windows_->max_side()
       << ";coefficients=";
    for (double c : coefficients_) os << format_double(c) << ",";
    if (modulation_) {
      os << ";modulation=";
      for (double g : modulation_->values()) os << format_double(g) << ",";
    }
  } else {
    os << ";dense=" << dense_->size() << ";weights=";
    for (const SignalArray& w : *dense_) {
      for (double x : w.values()) os << format_double(x) << ",";
      os << "|";
    }
  }
  return os.str();
}

std::vector<double> indicator_coefficients(const WindowSystem& windows) {
  return std::vector<double>(
      static_cast<std::size_t>(windows.max_side() - windows.min_side() + 1), 1.0);
}

std::vector<double> normalized_coefficients(const WindowSystem& windows) {
  std::vector<double> out;
  for (int s = windows.min_side(); s <= windows.max_side(); ++s) {
    out.push_back(1.0 / std::sqrt(static_cast<double>(
                            Window{{}, s}.cardinality(windows.grid().dim()))));
  }
  return out;
}

std::vector<double> side_maxima(const WindowSystem& windows,
                                const SignalArray& values) {
  const Grid& g = windows.grid();
  require_same_grid(g, values.grid(), "side_maxima");
  const int d = g.dim();
  const int m = g.side();
  const std::size_t mp = static_cast<std::size_t>(m) + 1;

  // table[c] = sum of values over the box [0, c) with c in {0..m}^d
  std::array<std::size_t, kMaxDim> tstride{};
  std::size_t tsize = 1;
  for (int a = d - 1; a >= 0; --a) {
    tstride[a] = tsize;
    tsize *= mp;
  }
  std::vector<double> table(tsize, 0.0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto c = g.coords(i);
    std::size_t t = 0;
    for (int a = 0; a < d; ++a) t += static_cast<std::size_t>(c[a] + 1) * tstride[a];
    table[t] = values[i];
  }
  for (int a = 0; a < d; ++a) {
    for (std::size_t t = 0; t < tsize; ++t) {
      if ((t / tstride[a]) % mp != 0) table[t] += table[t - tstride[a]];
    }
  }

  std::vector<double> out;
  const int corners = 1 << d;
  for (int s = windows.min_side(); s <= windows.max_side(); ++s) {
    // signed offsets of the 2^d corners relative to the low corner
    std::vector<std::ptrdiff_t> corner_off(static_cast<std::size_t>(corners));
    std::vector<double> corner_sign(static_cast<std::size_t>(corners));
    for (int c = 0; c < corners; ++c) {
      std::ptrdiff_t off = 0;
      int lows = 0;
      for (int a = 0; a < d; ++a) {
        if (c & (1 << a)) {
          off += static_cast<std::ptrdiff_t>(s) * static_cast<std::ptrdiff_t>(tstride[a]);
        } else {
          ++lows;
        }
      }
      corner_off[static_cast<std::size_t>(c)] = off;
      corner_sign[static_cast<std::size_t>(c)] = (lows % 2 == 0) ? 1.0 : -1.0;
    }
    const int span = m - s + 1;
    double best = 0.0;
    std::array<int, kMaxDim> anchor{};
    while (true) {
      std::size_t base = 0;
      for (int a = 0; a < d; ++a) base += static_cast<std::size_t>(anchor[a]) * tstride[a];
      // innermost axis handled as a contiguous sweep
      const std::size_t step = tstride[d - 1];
      for (int x = 0; x < span; ++x) {
        double acc = 0.0;
        const std::size_t b = base + static_cast<std::size_t>(x) * step;
        for (int c = 0; c < corners; ++c) {
          acc += corner_sign[static_cast<std::size_t>(c)] *
                 table[b + static_cast<std::size_t>(corner_off[static_cast<std::size_t>(c)])];
        }
        best = std::max(best, std::abs(acc));
      }
      int a = d - 2;
      while (a >= 0 && ++anchor[a] == span) {
        anchor[a] = 0;
        --a;
      }
      if (a < 0) break;
    }
    out.push_back(best);
  }
  return out;
}

double mr_statistic(const ConstraintSystem& system, const SignalArray& v) {
  if (system.size() == 0) throw InvalidArgument("empty constraint system");
  require_same_grid(system.grid(), v.grid(), "mr_statistic");
  if (!system.is_windowed()) {
    double best = 0.0;
    for (std::size_t i = 0; i < system.size(); ++i) {
      best = std::max(best, system.average(i, v));
    }
    return best;
  }
  SignalArray t = apply(system.transform(), v);
  if (system.modulated()) {
    const SignalArray& g = system.modulation();
    for (std::size_t i = 0; i < t.size(); ++i) t[i] *= g[i];
  }
  const std::vector<double> maxima = side_maxima(system.windows(), t);
  double best = 0.0;
  for (std::size_t k = 0; k < maxima.size(); ++k) {
    best = std::max(best, std::abs(system.side_coefficients()[k]) * maxima[k]);
  }
  return best;
}

Partition partition_by_support(const std::vector<SignalArray>& weights) {
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::vector<bool>> used;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    const SignalArray& w = weights[i];
    std::size_t j = 0;
    for (; j < groups.size(); ++j) {
      bool clash = false;
      for (std::size_t n = 0; n < w.size() && !clash; ++n) {
        clash = w[n] != 0.0 && used[j][n];
      }
      if (!clash) break;
    }
    if (j == groups.size()) {
      groups.emplace_back();
      used.emplace_back(w.size(), false);
    }
    groups[j].push_back(i);
    for (std::size_t n = 0; n < w.size(); ++n) {
      if (w[n] != 0.0) used[j][n] = true;
    }
  }
  return Partition::from_groups(std::move(groups));
}

}  // namespace smre
