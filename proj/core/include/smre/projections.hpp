#pragma once

#include <cstddef>
#include <vector>

#include "smre/constraint_system.hpp"
#include "smre/core.hpp"
#include "smre/windows.hpp"

namespace smre {

// Projection onto the slab {x : |<w, x>| <= q}. Throws InvalidArgument if
// w is zero or q is not positive.
SignalArray project_band(const SignalArray& v, const SignalArray& weight, double q);

// Projection onto {x : sum_{n in S} x_n^2 <= q_s}: the restriction to S is
// scaled radially, the rest is untouched.
SignalArray project_ball(const SignalArray& v, const Window& window, double q_s);

// Exact projection onto the intersection of the constraints of group j,
// which act on disjoint coordinates.
SignalArray project_group(const SignalArray& v, std::size_t group,
                          const ConstraintSystem& system);

struct DykstraOptions {
  double tol = 1e-8;
  int max_sweeps = 10000;
  // Exit also requires mr_statistic <= q * (1 + feasibility_slack).
  double feasibility_slack = 1e-6;
};

// Correction terms of the cyclic projection, one block per group. Only the
// windows whose constraint was active carry storage: a scalar multiple of the
// weight for slabs, a vector on the window for balls.
class DykstraState {
 public:
  std::size_t group_count() const { return groups_.size(); }
  long long sweeps() const { return sweeps_; }
  bool empty() const { return groups_.empty(); }
  void reset() {
    groups_.clear();
    sweeps_ = 0;
  }

  // Materialised correction of group j (zero for inactive windows).
  SignalArray correction(std::size_t j, const ConstraintSystem& system) const;

 private:
  friend struct DykstraSweeper;
  friend SignalArray project_group(const SignalArray&, std::size_t,
                                   const ConstraintSystem&);
  friend struct DykstraResult dykstra(const SignalArray&, const ConstraintSystem&,
                                      const struct DykstraOptions&, DykstraState*);

  struct Entry {
    std::size_t constraint = 0;
    double scalar = 0.0;      // slab: correction = scalar * weight
    std::size_t offset = 0;   // ball: start in `values`
  };
  struct Block {
    std::vector<Entry> entries;
    std::vector<double> values;
  };

  std::vector<Block> groups_;
  long long sweeps_ = 0;
};

struct DykstraResult {
  SignalArray x;
  int sweeps = 0;
  bool converged = false;
  // max(||x_k - x_{k-1}||, ||corrections_k - corrections_{k-1}||) of the
  // last sweep
  double change = 0.0;
  double statistic = 0.0;
};

// Dykstra's cyclic projection of h onto the feasible set of the system,
// one group per step. With state == nullptr the corrections start at zero.
// A non-empty state resumes from its corrections (x = h - sum of them),
// which is the same iteration started from another dual point; it is reset
// if the partition size differs.
DykstraResult dykstra(const SignalArray& h, const ConstraintSystem& system,
                      const DykstraOptions& options = {},
                      DykstraState* state = nullptr);

}  // namespace smre
