#pragma once

#include "smre/core.hpp"
#include "smre/prox.hpp"

namespace smre {

struct IseIae {
  double ise = 0.0;
  double iae = 0.0;
};

// ise = m^-d sum (est - truth)^2, iae = m^-d sum |est - truth|.
IseIae ise_iae(const SignalArray& est, const SignalArray& truth);

// Symmetric Bregman divergence of the regularizer, normalised by m^-d.
// TV2: sum |D est - D truth|^2; TV1Beta: sum (grad phi(D est) -
// grad phi(D truth)) . (D est - D truth) with phi(g) = sqrt(|g|^2 + beta^2).
// Throws InvalidArgument for L1.
double bregman_sym(const SignalArray& est, const SignalArray& truth,
                   const Regularizer& j);

// Number of maximal constant runs whose existing neighbours are all strictly
// lower. A constant signal counts as one maximum. d = 1 only.
int count_local_maxima(const SignalArray& u);

struct MetricReport {
  double ise = 0.0;
  double iae = 0.0;
  double bregman = 0.0;
  int local_maxima = 0;  // -1 when not defined (d > 1)
};

MetricReport evaluate_metrics(const SignalArray& est, const SignalArray& truth,
                              const Regularizer& j);

}  // namespace smre
