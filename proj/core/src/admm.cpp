#include "smre/admm.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "smre/error.hpp"

namespace smre {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void validate(const LinearOperator& k, const SignalArray& y,
              const ConstraintSystem& system, const AdmmConfig& cfg) {
  if (!(cfg.lambda > 0.0)) throw InvalidArgument("ADMM lambda must be positive");
  if (!(cfg.tau >= 0.0)) throw InvalidArgument("ADMM tau must be nonnegative");
  if (cfg.max_outer < 1) throw InvalidArgument("ADMM max_outer must be positive");
  if (!(cfg.inner_tol_base > 0.0) || !(cfg.dykstra_tol_base > 0.0)) {
    throw InvalidArgument("ADMM tolerance bases must be positive");
  }
  require_same_grid(k.range(), y.grid(), "admm: data vs operator range");
  require_same_grid(system.grid(), y.grid(), "admm: data vs constraint grid");
}

// The generic loop; `weights_for` returns the system for iteration k given
// K u_{k-1}.
template <class SystemFor>
AdmmReport run(const LinearOperator& k, const SignalArray& y, const Regularizer& j,
               const AdmmConfig& cfg, const AdmmObserver& observer,
               SystemFor&& system_for) {
  const double scale = std::max(1.0, norm(y));
  AdmmState st;
  st.u = SignalArray(k.domain(), 0.0);
  st.v = SignalArray(y.grid(), 0.0);
  st.p = SignalArray(y.grid(), 0.0);
  SignalArray ku(y.grid(), 0.0);
  DykstraState dstate;
  AdmmReport rep;
  ConstraintSystem last = system_for(ku);

  for (st.k = 1; st.k <= cfg.max_outer; ++st.k) {
    const double kk =
        cfg.tighten_tolerances ? static_cast<double>(st.k) * static_cast<double>(st.k) : 1.0;
    const double floor = cfg.tol_floor * scale;
    const double dtol = std::max(cfg.dykstra_tol_base * scale / kk, floor);
    const double ptol = std::max(cfg.inner_tol_base * scale / kk, floor);

    // v_k = P_C(Y + lambda p_{k-1} - K u_{k-1})
    last = system_for(ku);
    SignalArray h = y;
    h.axpy(cfg.lambda, st.p);
    h -= ku;
    auto t0 = Clock::now();
    DykstraOptions dopt;
    dopt.tol = dtol;
    dopt.max_sweeps = cfg.dykstra_max_sweeps;
    if (!cfg.warm_start_projection) dstate.reset();
    DykstraResult proj = dykstra(h, last, dopt, &dstate);
    rep.projection_seconds += seconds_since(t0);
    rep.dykstra_sweeps.push_back(proj.sweeps);
    if (!proj.converged) ++rep.unconverged_projections;
    st.v = std::move(proj.x);

    // u_k = argmin 1/2 ||Ku - (Y + lambda p_{k-1} - v_k)||^2 + lambda J(u)
    SignalArray z = y;
    z.axpy(cfg.lambda, st.p);
    z -= st.v;
    t0 = Clock::now();
    ProxResult pr;
    try {
      pr = prox(j, k, z, cfg.lambda, ptol, cfg.prox_max_iter, st.k > 1 ? &st.u : nullptr);
    } catch (const SolverError& e) {
      throw SolverError("ADMM iteration " + std::to_string(st.k) + ": " + e.what(),
                        e.residual());
    }
    rep.prox_seconds += seconds_since(t0);
    if (!pr.converged) ++rep.unconverged_prox;
    const SignalArray ku_prev = ku;
    ku = k.apply(pr.minimizer);
    st.u = std::move(pr.minimizer);

    // p_k = p_{k-1} - (K u_k + v_k - Y) / lambda
    SignalArray gap = ku + st.v;
    gap -= y;
    st.p.axpy(-1.0 / cfg.lambda, gap);

    st.r = std::max(norm(gap), distance(ku, ku_prev));
    rep.residuals.push_back(st.r);
    rep.objective.push_back(value(j, st.u));
    rep.iterations = st.k;
    if (observer) observer(st);
    if (st.r <= cfg.tau) {
      rep.status = ExitStatus::Converged;
      break;
    }
  }
  rep.statistic = mr_statistic(last, st.v);
  rep.data_statistic = mr_statistic(last, y - ku);
  rep.u = std::move(st.u);
  rep.v = std::move(st.v);
  rep.p = std::move(st.p);
  return rep;
}

}  // namespace

const char* to_string(ExitStatus s) {
  return s == ExitStatus::Converged ? "converged" : "max_iter";
}

double residual(const SignalArray& u_k, const SignalArray& v_k,
                const SignalArray& u_prev, const LinearOperator& k,
                const SignalArray& y) {
  const SignalArray ku = k.apply(u_k);
  SignalArray gap = ku + v_k;
  gap -= y;
  return std::max(norm(gap), norm(k.apply(u_k - u_prev)));
}

AdmmReport admm_solve(const LinearOperator& k, const SignalArray& y,
                      const Regularizer& j, const ConstraintSystem& system,
                      const AdmmConfig& config, const AdmmObserver& observer) {
  validate(k, y, system, config);
  return run(k, y, j, config, observer,
             [&](const SignalArray&) -> const ConstraintSystem& { return system; });
}

SignalArray standardization(const SignalArray& ku, double epsilon) {
  if (!(epsilon > 0.0)) throw InvalidArgument("epsilon must be positive");
  SignalArray g = ku;
  for (double& x : g.values()) x = 1.0 / std::sqrt(std::max(x, epsilon));
  return g;
}

AdmmReport admm_solve_poisson(const LinearOperator& k, const SignalArray& y,
                              const Regularizer& j,
                              const ConstraintSystem& base_system,
                              const AdmmConfig& config,
                              const AdmmObserver& observer) {
  validate(k, y, base_system, config);
  if (!base_system.is_windowed() || base_system.transform() != Transform::Identity) {
    throw InvalidArgument(
        "lagged standardization needs an identity-transform windowed system");
  }
  double ymax = 0.0;
  for (double x : y.values()) {
    if (x < 0.0) throw InvalidArgument("Poisson data must be nonnegative");
    ymax = std::max(ymax, x);
  }
  double eps = config.epsilon_safe;
  if (!(eps > 0.0)) eps = 1e-3 * ymax;
  if (!(eps > 0.0)) throw InvalidArgument("Poisson data is identically zero");

  AdmmReport rep = run(k, y, j, config, observer, [&](const SignalArray& ku) {
    return base_system.with_modulation(standardization(ku, eps));
  });
  rep.lagged_standardization = true;
  rep.epsilon_safe = eps;
  return rep;
}

}  // namespace smre
