#pragma once

#include <functional>
#include <string>
#include <vector>

#include "smre/constraint_system.hpp"
#include "smre/core.hpp"
#include "smre/operators.hpp"
#include "smre/projections.hpp"
#include "smre/prox.hpp"

namespace smre {

struct AdmmConfig {
  double lambda = 1.0;
  double tau = 1e-4;
  int max_outer = 500;
  // Iteration k solves its subproblems to base * max(1, ||Y||) / k^2, or to
  // base * max(1, ||Y||) at every k when tighten_tolerances is off.
  double inner_tol_base = 1e-6;
  double dykstra_tol_base = 1e-6;
  bool tighten_tolerances = true;
  // Lower bound on both schedules, relative to max(1, ||Y||).
  double tol_floor = 1e-12;
  int dykstra_max_sweeps = 20000;
  int prox_max_iter = 500;
  // Resume each projection from the previous corrections.
  bool warm_start_projection = true;
  // Standardization floor of the Poisson variant; <= 0 selects
  // 1e-3 * max(Y).
  double epsilon_safe = 0.0;
};

enum class ExitStatus { Converged, MaxIter };

const char* to_string(ExitStatus s);

struct AdmmState {
  SignalArray u;
  SignalArray v;
  SignalArray p;
  int k = 0;
  double r = 0.0;
};

struct AdmmReport {
  SignalArray u;
  SignalArray v;
  SignalArray p;
  int iterations = 0;
  std::vector<double> residuals;   // r_k, k = 1..iterations
  std::vector<double> objective;   // J(u_k)
  std::vector<int> dykstra_sweeps;
  // Projections that hit the sweep limit.
  int unconverged_projections = 0;
  int unconverged_prox = 0;
  // T(v) under the constraint weights used last.
  double statistic = 0.0;
  // T(Y - Ku) under the same weights.
  double data_statistic = 0.0;
  ExitStatus status = ExitStatus::MaxIter;
  bool lagged_standardization = false;
  double epsilon_safe = 0.0;
  double projection_seconds = 0.0;
  double prox_seconds = 0.0;
};

// Called after every completed iteration.
using AdmmObserver = std::function<void(const AdmmState&)>;

// max(||K u_k + v_k - Y||, ||K (u_k - u_prev)||)
double residual(const SignalArray& u_k, const SignalArray& v_k,
                const SignalArray& u_prev, const LinearOperator& k,
                const SignalArray& y);

// Alternating direction method of multipliers for
//   min J(u)  subject to  T(Y - Ku) <= q,
// starting from u = v = p = 0.
AdmmReport admm_solve(const LinearOperator& k, const SignalArray& y,
                      const Regularizer& j, const ConstraintSystem& system,
                      const AdmmConfig& config, const AdmmObserver& observer = {});

// Same iteration, but the projection at step k uses the base weights
// divided pointwise by sqrt(max((K u_{k-1})_v, epsilon_safe)). No
// convergence guarantee. Requires Y >= 0 and an identity-transform
// windowed base system.
AdmmReport admm_solve_poisson(const LinearOperator& k, const SignalArray& y,
                              const Regularizer& j,
                              const ConstraintSystem& base_system,
                              const AdmmConfig& config,
                              const AdmmObserver& observer = {});

// 1 / sqrt(max(Ku, epsilon)) pointwise.
SignalArray standardization(const SignalArray& ku, double epsilon);

}  // namespace smre
