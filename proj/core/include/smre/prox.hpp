#pragma once

#include <string>

#include "smre/core.hpp"
#include "smre/operators.hpp"

namespace smre {

struct Regularizer {
  enum class Kind { TV2, TV1Beta, L1 };

  Kind kind = Kind::TV2;
  double beta = 1e-8;  // TV1Beta only

  static Regularizer tv2() { return {Kind::TV2, 0.0}; }
  // Throws InvalidArgument unless beta > 0.
  static Regularizer tv1beta(double beta = 1e-8);
  static Regularizer l1() { return {Kind::L1, 0.0}; }
};

std::string to_string(const Regularizer& j);

// TV2: (1/2) sum |Du|^2, TV1Beta: sum sqrt(|Du|^2 + beta^2), L1: sum |u|.
double value(const Regularizer& j, const SignalArray& u);
// Gradient of the smooth regularizers; throws InvalidArgument for L1.
SignalArray gradient(const Regularizer& j, const SignalArray& u);

struct ProxResult {
  SignalArray minimizer;
  int iterations = 0;
  // Norm of the stationarity residual of the smooth objective (TV2,
  // TV1Beta) or of the proximal-gradient fixed-point map scaled by the
  // step's inverse (L1).
  double residual = 0.0;
  bool converged = true;
};

// The iterative solvers below start from `start` when given (same grid as
// the operator domain), otherwise from z or K^T z.

// argmin_u 1/2 ||Ku - z||^2 + lambda * TV2(u): one linear solve of
// (K^T K + lambda D^T D) u = K^T z by Jacobi-preconditioned CG. Throws
// SolverError if the residual does not reach inner_tol.
ProxResult prox_tv2(const LinearOperator& k, const SignalArray& z, double lambda,
                    double inner_tol, const SignalArray* start = nullptr);

// argmin_u 1/2 ||Ku - z||^2 + lambda * TV1Beta(u) by lagged diffusivity.
// Stops when the Euler-Lagrange residual is at most inner_tol; after
// max_iter outer steps the result is returned with converged = false.
// Each frozen-diffusivity system is solved to a tenth of the current
// Euler-Lagrange residual (never looser than a tenth of inner_tol).
ProxResult prox_tv1beta(const LinearOperator& k, const SignalArray& z,
                        double lambda, double beta, double inner_tol,
                        int max_iter = 500, const SignalArray* start = nullptr);

// Exact argmin_u 1/2 ||u - z||^2 + lambda * sum |u_{i+1} - u_i| for d = 1.
SignalArray prox_tautstring(const SignalArray& z, double lambda);

// argmin_u 1/2 ||Ku - z||^2 + lambda ||u||_1. Soft thresholding for the
// identity, accelerated proximal gradient with step 1/||K||^2 otherwise.
ProxResult prox_l1(const LinearOperator& k, const SignalArray& z, double lambda,
                   double inner_tol, int max_iter = 200000,
                   const SignalArray* start = nullptr);

// Dispatches on the regularizer kind.
ProxResult prox(const Regularizer& j, const LinearOperator& k,
                const SignalArray& z, double lambda, double inner_tol,
                int max_iter = 500, const SignalArray* start = nullptr);

// 1/2 ||Ku - z||^2 + lambda J(u).
double prox_objective(const Regularizer& j, const LinearOperator& k,
                      const SignalArray& z, double lambda, const SignalArray& u);

}  // namespace smre
