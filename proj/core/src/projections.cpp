#include "smre/projections.hpp"

#include <cmath>

#include "smre/error.hpp"

namespace smre {

SignalArray project_band(const SignalArray& v, const SignalArray& weight, double q) {
  require_same_grid(v.grid(), weight.grid(), "project_band");
  if (!(q > 0.0)) throw InvalidArgument("project_band: q must be positive");
  const double nn = dot(weight, weight);
  if (nn == 0.0) throw InvalidArgument("project_band: zero weight");
  const double t = dot(weight, v);
  if (std::abs(t) <= q) return v;
  SignalArray out = v;
  out.axpy(-(t - std::copysign(q, t)) / nn, weight);
  return out;
}

SignalArray project_ball(const SignalArray& v, const Window& window, double q_s) {
  if (!(q_s > 0.0)) throw InvalidArgument("project_ball: q_s must be positive");
  const Grid& g = v.grid();
  for (int a = 0; a < g.dim(); ++a) {
    if (window.anchor[a] < 0 || window.anchor[a] + window.side > g.side()) {
      throw InvalidArgument("project_ball: window outside the grid");
    }
  }
  double ss = 0.0;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (window.contains(g, i)) {
      idx.push_back(i);
      ss += v[i] * v[i];
    }
  }
  if (ss <= q_s) return v;
  const double scale = std::sqrt(q_s / ss);
  SignalArray out = v;
  for (std::size_t i : idx) out[i] *= scale;
  return out;
}

// Carries out the per-constraint steps of the cyclic projection.
struct DykstraSweeper {
  using Entry = DykstraState::Entry;
  using Block = DykstraState::Block;

  struct DenseSupport {
    std::vector<std::size_t> index;
    std::vector<double> weight;
    double norm2 = 0.0;
  };

  const ConstraintSystem& sys;
  std::vector<DenseSupport> dense;
  double ball_scale = 1.0;  // constant modulation folded into ball coefficients

  explicit DykstraSweeper(const ConstraintSystem& system) : sys(system) {
    if (!sys.is_windowed()) {
      dense.resize(sys.size());
      for (std::size_t i = 0; i < sys.size(); ++i) {
        const SignalArray& w = sys.dense_weight(i);
        for (std::size_t n = 0; n < w.size(); ++n) {
          if (w[n] != 0.0) {
            dense[i].index.push_back(n);
            dense[i].weight.push_back(w[n]);
            dense[i].norm2 += w[n] * w[n];
          }
        }
      }
    } else if (sys.transform() == Transform::Square && sys.modulated()) {
      ball_scale = sys.modulation()[0];
    }
  }

  // Visits every constraint of group j in order: f(constraint_index, window).
  template <class F>
  void for_each_constraint(std::size_t j, F&& f) const {
    if (sys.is_windowed()) {
      sys.partition().for_each_window(j, f);
    } else {
      for (std::size_t i : sys.partition().group(j)) f(i, Window{});
    }
  }

  // Slab step with previous coefficient b; returns the new coefficient.
  // Updates x in place and adds the squared correction change to dq.
  double band_step(std::size_t c, const Window& w, double b, SignalArray& x,
                   double& dq) const {
    const double q = sys.q();
    if (!sys.is_windowed()) {
      const DenseSupport& s = dense[c];
      double t = 0.0;
      for (std::size_t k = 0; k < s.index.size(); ++k) t += s.weight[k] * x[s.index[k]];
      t += b * s.norm2;
      const double b_new = std::abs(t) <= q ? 0.0 : (t - std::copysign(q, t)) / s.norm2;
      const double delta = b - b_new;
      if (delta != 0.0) {
        for (std::size_t k = 0; k < s.index.size(); ++k) {
          x[s.index[k]] += delta * s.weight[k];
        }
        dq += delta * delta * s.norm2;
      }
      return b_new;
    }
    const double coef = sys.coefficient(w.side);
    if (coef == 0.0) return 0.0;
    const WindowSystem& ws = sys.windows();
    double t = 0.0;
    double nn = 0.0;
    if (sys.modulated()) {
      const SignalArray& g = sys.modulation();
      ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
        for (std::size_t i = off; i < off + len; ++i) {
          t += g[i] * x[i];
          nn += g[i] * g[i];
        }
      });
    } else {
      ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
        for (std::size_t i = off; i < off + len; ++i) t += x[i];
      });
      nn = static_cast<double>(w.cardinality(sys.grid().dim()));
    }
    t *= coef;
    nn *= coef * coef;
    if (nn == 0.0) return 0.0;
    t += b * nn;
    const double b_new = std::abs(t) <= q ? 0.0 : (t - std::copysign(q, t)) / nn;
    const double delta = (b - b_new) * coef;
    if (delta != 0.0) {
      if (sys.modulated()) {
        const SignalArray& g = sys.modulation();
        ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
          for (std::size_t i = off; i < off + len; ++i) x[i] += delta * g[i];
        });
      } else {
        ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
          for (std::size_t i = off; i < off + len; ++i) x[i] += delta;
        });
      }
      dq += (b - b_new) * (b - b_new) * nn;
    }
    return b_new;
  }

  // Ball step. `old` points at the previous correction on the window (or
  // nullptr for zero). Returns true and fills `out` when the constraint is
  // active.
  bool ball_step(const Window& w, const double* old, SignalArray& x,
                 std::vector<double>& out, double& dq) const {
    const double kappa = sys.coefficient(w.side) * ball_scale;
    if (kappa <= 0.0) return false;
    const double q_s = sys.q() / kappa;
    const WindowSystem& ws = sys.windows();
    double ss = 0.0;
    std::size_t k = 0;
    ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
      for (std::size_t i = off; i < off + len; ++i, ++k) {
        const double z = old ? x[i] + old[k] : x[i];
        ss += z * z;
      }
    });
    if (ss <= q_s) {
      // z is feasible: x takes z and the correction drops to zero
      if (old) {
        k = 0;
        ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
          for (std::size_t i = off; i < off + len; ++i, ++k) {
            x[i] += old[k];
            dq += old[k] * old[k];
          }
        });
      }
      return false;
    }
    const double keep = std::sqrt(q_s / ss);
    k = 0;
    ws.for_each_run(w, [&](std::size_t off, std::size_t len) {
      for (std::size_t i = off; i < off + len; ++i, ++k) {
        const double z = old ? x[i] + old[k] : x[i];
        const double corr = (1.0 - keep) * z;
        const double prev = old ? old[k] : 0.0;
        dq += (corr - prev) * (corr - prev);
        out.push_back(corr);
        x[i] = keep * z;
      }
    });
    return true;
  }

  // One Dykstra step for group j: replaces the block and updates x.
  void group_step(std::size_t j, Block& block, SignalArray& x, double& dq) const {
    Block next;
    std::size_t cursor = 0;
    const bool ball = sys.transform() == Transform::Square;
    for_each_constraint(j, [&](std::size_t c, const Window& w) {
      const Entry* prev = nullptr;
      if (cursor < block.entries.size() && block.entries[cursor].constraint == c) {
        prev = &block.entries[cursor++];
      }
      if (ball) {
        const double* old = prev ? block.values.data() + prev->offset : nullptr;
        const std::size_t offset = next.values.size();
        if (ball_step(w, old, x, next.values, dq)) {
          next.entries.push_back(Entry{c, 0.0, offset});
        }
      } else {
        const double b = band_step(c, w, prev ? prev->scalar : 0.0, x, dq);
        if (b != 0.0) next.entries.push_back(Entry{c, b, 0});
      }
    });
    block = std::move(next);
  }

  // Adds the correction of one block to acc.
  void accumulate(std::size_t j, const Block& block, SignalArray& acc) const {
    for (const Entry& e : block.entries) {
      if (!sys.is_windowed()) {
        const DenseSupport& s = dense[e.constraint];
        for (std::size_t k = 0; k < s.index.size(); ++k) {
          acc[s.index[k]] += e.scalar * s.weight[k];
        }
        continue;
      }
      const Window w = sys.windows()[e.constraint];
      if (sys.transform() == Transform::Square) {
        std::size_t k = e.offset;
        sys.windows().for_each_run(w, [&](std::size_t off, std::size_t len) {
          for (std::size_t i = off; i < off + len; ++i) acc[i] += block.values[k++];
        });
      } else {
        const double c = e.scalar * sys.coefficient(w.side);
        sys.windows().for_each_run(w, [&](std::size_t off, std::size_t len) {
          for (std::size_t i = off; i < off + len; ++i) {
            acc[i] += sys.modulated() ? c * sys.modulation()[i] : c;
          }
        });
      }
    }
    (void)j;
  }
};

SignalArray project_group(const SignalArray& v, std::size_t group,
                          const ConstraintSystem& system) {
  require_same_grid(system.grid(), v.grid(), "project_group");
  if (group >= system.partition().size()) {
    throw InvalidArgument("project_group: group index out of range");
  }
  DykstraSweeper sweeper(system);
  DykstraState::Block block;
  SignalArray x = v;
  double dq = 0.0;
  sweeper.group_step(group, block, x, dq);
  return x;
}

SignalArray DykstraState::correction(std::size_t j, const ConstraintSystem& system) const {
  SignalArray acc(system.grid(), 0.0);
  DykstraSweeper(system).accumulate(j, groups_.at(j), acc);
  return acc;
}

DykstraResult dykstra(const SignalArray& h, const ConstraintSystem& system,
                      const DykstraOptions& options, DykstraState* state) {
  require_same_grid(system.grid(), h.grid(), "dykstra");
  if (system.size() == 0) throw InvalidArgument("empty constraint system");
  if (options.max_sweeps < 1) throw InvalidArgument("max_sweeps must be positive");

  DykstraState local;
  DykstraState& st = state ? *state : local;
  const std::size_t groups = system.partition().size();
  DykstraSweeper sweeper(system);

  SignalArray x = h;
  if (st.groups_.size() == groups) {
    SignalArray sum(system.grid(), 0.0);
    for (std::size_t j = 0; j < groups; ++j) sweeper.accumulate(j, st.groups_[j], sum);
    x -= sum;
  } else {
    st.groups_.assign(groups, DykstraState::Block{});
  }

  DykstraResult result;
  const double q_limit = system.q() * (1.0 + options.feasibility_slack);
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    const SignalArray before = x;
    double dq = 0.0;
    for (std::size_t j = 0; j < groups; ++j) {
      sweeper.group_step(j, st.groups_[j], x, dq);
    }
    ++st.sweeps_;
    result.sweeps = sweep;
    result.change = std::max(distance(x, before), std::sqrt(dq));
    if (result.change <= options.tol) {
      result.statistic = mr_statistic(system, x);
      if (result.statistic <= q_limit) {
        result.converged = true;
        break;
      }
    }
  }
  if (!result.converged) result.statistic = mr_statistic(system, x);
  result.x = std::move(x);
  return result;
}

}  // namespace smre
