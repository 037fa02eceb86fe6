#include "smre/prox.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

#include <Eigen/SparseCholesky>

#include "smre/error.hpp"

namespace smre {

namespace {

using Apply = std::function<SignalArray(const SignalArray&)>;

struct CgOutcome {
  int iterations = 0;
  double residual = 0.0;
};

// Preconditioned CG on A x = b, warm-started from x; `precond` applies the
// inverse of the preconditioner. Stops once the true residual norm is at
// most target.
CgOutcome conjugate_gradient(const Apply& a, const SignalArray& b, const Apply& precond,
                             double target, int max_iter, SignalArray& x) {
  CgOutcome out;
  SignalArray r = b - a(x);
  double rn = norm(r);
  while (rn > target && out.iterations < max_iter) {
    // restart from the true residual each pass to avoid recurrence drift
    SignalArray zz = precond(r);
    SignalArray p = zz;
    double rz = dot(r, zz);
    while (out.iterations < max_iter) {
      ++out.iterations;
      const SignalArray ap = a(p);
      const double pap = dot(p, ap);
      if (!(pap > 0.0)) break;
      const double alpha = rz / pap;
      x.axpy(alpha, p);
      r.axpy(-alpha, ap);
      if (norm(r) <= 0.5 * target) break;
      zz = precond(r);
      const double rz_new = dot(r, zz);
      p *= rz_new / rz;
      p += zz;
      rz = rz_new;
    }
    r = b - a(x);
    const double rn_new = norm(r);
    if (!(rn_new < rn) && rn_new > target) {
      rn = rn_new;
      break;  // stagnation at round-off level
    }
    rn = rn_new;
  }
  out.residual = rn;
  return out;
}

Apply jacobi(SignalArray diag) {
  for (double& x : diag.values()) x = 1.0 / std::max(x, 1e-300);
  return [d = std::move(diag)](const SignalArray& r) {
    SignalArray z = r;
    for (std::size_t i = 0; i < z.size(); ++i) z[i] *= d[i];
    return z;
  };
}

// diag(D^T W D) for pointwise weights w (w == nullptr means w = 1).
SignalArray difference_normal_diagonal(const Grid& g, const std::vector<double>* w) {
  SignalArray out(g, 0.0);
  const std::size_t m = static_cast<std::size_t>(g.side());
  for (int axis = 0; axis < g.dim(); ++axis) {
    const std::size_t stride = g.stride(axis);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const std::size_t c = (i / stride) % m;
      if (c + 1 < m) out[i] += w ? (*w)[i] : 1.0;
      if (c > 0) out[i] += w ? (*w)[i - stride] : 1.0;
    }
  }
  return out;
}

// D^T (w * Du)
SignalArray weighted_laplacian(const SignalArray& u, const std::vector<double>* w) {
  GradientField du = forward_difference(u);
  if (w) {
    for (SignalArray& comp : du) {
      for (std::size_t i = 0; i < comp.size(); ++i) comp[i] *= (*w)[i];
    }
  }
  return difference_adjoint(du);
}

std::vector<double> lagged_diffusivity(const SignalArray& u, double beta) {
  std::vector<double> w = squared_magnitude(forward_difference(u));
  for (double& x : w) x = 1.0 / std::sqrt(x + beta * beta);
  return w;
}

SignalArray initial_guess(const LinearOperator& k, const SignalArray& z,
                          const SignalArray* start) {
  if (start) {
    require_same_grid(start->grid(), k.domain(), "prox: starting point");
    return *start;
  }
  if (k.kind() == LinearOperator::Kind::Identity) return z;
  return k.adjoint(z);
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw InvalidArgument("lambda must be positive and finite");
  }
}

// Sparse LDL^T factorization of diag(shift) + lambda D^T W D on a fixed
// grid; the fill-reducing ordering is computed once and reused across
// weights.
class DiffusionSolver {
 public:
  explicit DiffusionSolver(const Grid& grid) : grid_(grid) {}

  void factorize(const SignalArray& shift, double lambda, const std::vector<double>& w) {
    const std::size_t n = grid_.size();
    const std::size_t m = static_cast<std::size_t>(grid_.side());
    std::vector<Eigen::Triplet<double>> t;
    t.reserve(n * (1 + 4 * static_cast<std::size_t>(grid_.dim())));
    for (std::size_t i = 0; i < n; ++i) t.emplace_back(i, i, shift[i]);
    for (int axis = 0; axis < grid_.dim(); ++axis) {
      const std::size_t stride = grid_.stride(axis);
      for (std::size_t i = 0; i < n; ++i) {
        if ((i / stride) % m + 1 >= m) continue;
        const std::size_t j = i + stride;
        const double c = lambda * w[i];
        t.emplace_back(i, i, c);
        t.emplace_back(j, j, c);
        t.emplace_back(i, j, -c);
        t.emplace_back(j, i, -c);
      }
    }
    Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    a.setFromTriplets(t.begin(), t.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(a);
      analyzed_ = true;
    }
    ldlt_.factorize(a);
    if (ldlt_.info() != Eigen::Success) {
      throw SolverError("diffusion system factorization failed", INFINITY);
    }
  }

  SignalArray solve(const SignalArray& z) const {
    const std::size_t n = grid_.size();
    const Eigen::Map<const Eigen::VectorXd> rhs(z.values().data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd x = ldlt_.solve(rhs);
    return SignalArray(grid_, std::vector<double>(x.data(), x.data() + n));
  }

 private:
  Grid grid_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

// Tridiagonal solve of (I + lambda D^T W D) u = z in one dimension.
SignalArray thomas_tv(const SignalArray& z, double lambda, const std::vector<double>& w) {
  const std::size_t n = z.size();
  SignalArray u(z.grid(), 0.0);
  if (n == 1) {
    u[0] = z[0];
    return u;
  }
  std::vector<double> diag(n), upper(n, 0.0), rhs(z.vector());
  for (std::size_t i = 0; i < n; ++i) {
    diag[i] = 1.0 + lambda * ((i + 1 < n ? w[i] : 0.0) + (i > 0 ? w[i - 1] : 0.0));
    if (i + 1 < n) upper[i] = -lambda * w[i];
  }
  // forward elimination; the matrix is diagonally dominant
  for (std::size_t i = 1; i < n; ++i) {
    const double f = upper[i - 1] / diag[i - 1];
    diag[i] -= f * upper[i - 1];
    rhs[i] -= f * rhs[i - 1];
  }
  u[n - 1] = rhs[n - 1] / diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    u[i] = (rhs[i] - upper[i] * u[i + 1]) / diag[i];
  }
  return u;
}

double soft(double x, double t) {
  if (x > t) return x - t;
  if (x < -t) return x + t;
  return 0.0;
}

}  // namespace

Regularizer Regularizer::tv1beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw InvalidArgument("TV1Beta needs beta > 0");
  }
  return {Kind::TV1Beta, beta};
}

std::string to_string(const Regularizer& j) {
  switch (j.kind) {
    case Regularizer::Kind::TV2:
      return "tv2";
    case Regularizer::Kind::TV1Beta:
      return "tv1beta";
    case Regularizer::Kind::L1:
      return "l1";
  }
  return "unknown";
}

double value(const Regularizer& j, const SignalArray& u) {
  switch (j.kind) {
    case Regularizer::Kind::TV2: {
      double acc = 0.0;
      for (double x : squared_magnitude(forward_difference(u))) acc += x;
      return 0.5 * acc;
    }
    case Regularizer::Kind::TV1Beta: {
      double acc = 0.0;
      for (double x : squared_magnitude(forward_difference(u))) {
        acc += std::sqrt(x + j.beta * j.beta);
      }
      return acc;
    }
    case Regularizer::Kind::L1: {
      double acc = 0.0;
      for (double x : u.values()) acc += std::abs(x);
      return acc;
    }
  }
  return 0.0;
}

SignalArray gradient(const Regularizer& j, const SignalArray& u) {
  switch (j.kind) {
    case Regularizer::Kind::TV2:
      return weighted_laplacian(u, nullptr);
    case Regularizer::Kind::TV1Beta: {
      const std::vector<double> w = lagged_diffusivity(u, j.beta);
      return weighted_laplacian(u, &w);
    }
    case Regularizer::Kind::L1:
      break;
  }
  throw InvalidArgument("L1 has no gradient");
}

double prox_objective(const Regularizer& j, const LinearOperator& k,
                      const SignalArray& z, double lambda, const SignalArray& u) {
  const double r = distance(k.apply(u), z);
  return 0.5 * r * r + lambda * value(j, u);
}

ProxResult prox_tv2(const LinearOperator& k, const SignalArray& z, double lambda,
                    double inner_tol, const SignalArray* start) {
  check_lambda(lambda);
  require_same_grid(k.range(), z.grid(), "prox_tv2");
  const SignalArray b = k.adjoint(z);
  const Apply a = [&](const SignalArray& u) {
    SignalArray out = k.adjoint(k.apply(u));
    out.axpy(lambda, weighted_laplacian(u, nullptr));
    return out;
  };
  SignalArray diag = k.normal_diagonal();
  diag.axpy(lambda, difference_normal_diagonal(k.domain(), nullptr));

  ProxResult res;
  res.minimizer = initial_guess(k, z, start);
  const double target = std::max(inner_tol, 1e-13 * norm(b));
  const int max_iter = std::max<int>(1000, static_cast<int>(4 * b.size()));
  const CgOutcome cg = conjugate_gradient(a, b, jacobi(std::move(diag)), target, max_iter,
                                          res.minimizer);
  res.iterations = cg.iterations;
  res.residual = cg.residual;
  if (!(res.residual <= target)) {
    throw SolverError("prox_tv2: conjugate gradient did not converge", res.residual);
  }
  return res;
}

ProxResult prox_tv1beta(const LinearOperator& k, const SignalArray& z,
                        double lambda, double beta, double inner_tol,
                        int max_iter, const SignalArray* start) {
  check_lambda(lambda);
  if (!(beta > 0.0)) throw InvalidArgument("prox_tv1beta: beta must be positive");
  require_same_grid(k.range(), z.grid(), "prox_tv1beta");
  const bool identity = k.kind() == LinearOperator::Kind::Identity;
  const bool tridiagonal = identity && k.domain().dim() == 1;
  std::optional<DiffusionSolver> direct;
  if (!tridiagonal) direct.emplace(k.domain());
  const SignalArray b = k.adjoint(z);
  const SignalArray normal_diag = k.normal_diagonal();

  auto el_residual = [&](const SignalArray& u) {
    const std::vector<double> w = lagged_diffusivity(u, beta);
    SignalArray r = k.adjoint(k.apply(u));
    r -= b;
    r.axpy(lambda, weighted_laplacian(u, &w));
    return norm(r);
  };

  ProxResult res;
  res.minimizer = initial_guess(k, z, start);
  res.residual = el_residual(res.minimizer);
  res.converged = res.residual <= inner_tol;
  while (!res.converged && res.iterations < max_iter) {
    ++res.iterations;
    const std::vector<double> w = lagged_diffusivity(res.minimizer, beta);
    if (tridiagonal) {
      res.minimizer = thomas_tv(z, lambda, w);
    } else {
      // exact for the identity; otherwise diag(K^T K) stands in for K^T K
      // and the factorization preconditions CG
      direct->factorize(normal_diag, lambda, w);
      if (identity) {
        res.minimizer = direct->solve(z);
      } else {
        const Apply a = [&](const SignalArray& u) {
          SignalArray out = k.adjoint(k.apply(u));
          out.axpy(lambda, weighted_laplacian(u, &w));
          return out;
        };
        const Apply precond = [&](const SignalArray& r) { return direct->solve(r); };
        const double target =
            std::max({0.1 * inner_tol, 0.1 * res.residual, 1e-10 * norm(b)});
        conjugate_gradient(a, b, precond, target, 2000, res.minimizer);
      }
    }
    res.residual = el_residual(res.minimizer);
    res.converged = res.residual <= inner_tol;
  }
  return res;
}

SignalArray prox_tautstring(const SignalArray& z, double lambda) {
  if (z.grid().dim() != 1) throw InvalidArgument("taut string needs d = 1");
  if (!(lambda >= 0.0)) throw InvalidArgument("lambda must be nonnegative");
  const std::size_t n = z.size();
  // cumulative sums r_0 = 0, ..., r_n; the string runs from (0, 0) to
  // (n, r_n) inside [r_k - lambda, r_k + lambda] at interior knots
  std::vector<double> r(n + 1, 0.0);
  for (std::size_t i = 0; i < n; ++i) r[i + 1] = r[i] + z[i];
  auto lower = [&](std::size_t k) { return (k == 0 || k == n) ? r[k] : r[k] - lambda; };
  auto upper = [&](std::size_t k) { return (k == 0 || k == n) ? r[k] : r[k] + lambda; };

  SignalArray u(z.grid(), 0.0);
  std::size_t x0 = 0;
  double y0 = 0.0;
  while (x0 < n) {
    double umin = INFINITY, lmax = -INFINITY;
    std::size_t ju = x0, jl = x0;
    std::size_t knot = n;
    double knot_y = r[n];
    for (std::size_t k = x0 + 1; k <= n; ++k) {
      const double dx = static_cast<double>(k - x0);
      const double su = (upper(k) - y0) / dx;
      const double sl = (lower(k) - y0) / dx;
      if (sl > umin) {
        // lower bound ahead forces a bend up at the last upper contact
        knot = ju;
        knot_y = upper(ju);
        break;
      }
      if (su < lmax) {
        knot = jl;
        knot_y = lower(jl);
        break;
      }
      // ties count as contacts so that the knot is the latest one
      if (su <= umin) {
        umin = su;
        ju = k;
      }
      if (sl >= lmax) {
        lmax = sl;
        jl = k;
      }
    }
    const double slope = (knot_y - y0) / static_cast<double>(knot - x0);
    for (std::size_t i = x0; i < knot; ++i) u[i] = slope;
    x0 = knot;
    y0 = knot_y;
  }
  return u;
}

ProxResult prox_l1(const LinearOperator& k, const SignalArray& z, double lambda,
                   double inner_tol, int max_iter, const SignalArray* start) {
  check_lambda(lambda);
  require_same_grid(k.range(), z.grid(), "prox_l1");
  ProxResult res;
  if (k.kind() == LinearOperator::Kind::Identity) {
    res.minimizer = z;
    for (double& x : res.minimizer.values()) x = soft(x, lambda);
    return res;
  }
  const double lip = k.norm_squared_bound();
  const double step = 1.0 / lip;
  const SignalArray ktz = k.adjoint(z);
  auto grad = [&](const SignalArray& u) {
    SignalArray g = k.adjoint(k.apply(u));
    g -= ktz;
    return g;
  };
  auto prox_step = [&](const SignalArray& y) {
    SignalArray x = y;
    x.axpy(-step, grad(y));
    for (double& v : x.values()) v = soft(v, lambda * step);
    return x;
  };

  SignalArray x = start ? initial_guess(k, z, start) : SignalArray(k.domain(), 0.0);
  SignalArray y = x;
  double t = 1.0;
  res.converged = false;
  while (res.iterations < max_iter) {
    ++res.iterations;
    SignalArray x_next = prox_step(y);
    // gradient-mapping norm at the new point
    const SignalArray probe = prox_step(x_next);
    res.residual = distance(x_next, probe) * lip;
    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    // adaptive restart when the momentum points uphill
    if (dot(y - x_next, x_next - x) > 0.0) {
      t = 1.0;
      y = x_next;
    } else {
      y = x_next + ((t - 1.0) / t_next) * (x_next - x);
      t = t_next;
    }
    x = std::move(x_next);
    if (res.residual <= inner_tol) {
      res.converged = true;
      break;
    }
  }
  res.minimizer = std::move(x);
  return res;
}

ProxResult prox(const Regularizer& j, const LinearOperator& k,
                const SignalArray& z, double lambda, double inner_tol,
                int max_iter, const SignalArray* start) {
  switch (j.kind) {
    case Regularizer::Kind::TV2:
      return prox_tv2(k, z, lambda, inner_tol, start);
    case Regularizer::Kind::TV1Beta:
      return prox_tv1beta(k, z, lambda, j.beta, inner_tol, max_iter, start);
    case Regularizer::Kind::L1:
      return prox_l1(k, z, lambda, inner_tol, std::max(max_iter, 200000), start);
  }
  throw InvalidArgument("unknown regularizer");
}

}  // namespace smre
