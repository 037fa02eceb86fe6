#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <vector>

#include "smre/core.hpp"
#include "smre/windows.hpp"

namespace smre {

// The feasible set {v : max_S |sum_v w^S_v transform(v_v)| <= q}.
//
// Windowed systems carry w^S = coefficient(side) * modulation * indicator(S),
// where the modulation is an optional pointwise factor shared by all windows.
// Dense systems carry one explicit weight array per constraint and are
// partitioned greedily by disjoint supports.
class ConstraintSystem {
 public:
  // side_coefficients[k] belongs to side min_side + k.
  static ConstraintSystem windowed(const WindowSystem& windows,
                                   Transform transform, double q,
                                   std::vector<double> side_coefficients);
  // Throws InvalidArgument if a weight is identically zero.
  static ConstraintSystem dense(const Grid& grid, std::vector<SignalArray> weights,
                                Transform transform, double q);

  // Copy with a pointwise modulation of all windowed weights. Square
  // systems only admit a constant positive modulation.
  ConstraintSystem with_modulation(SignalArray modulation) const;
  ConstraintSystem with_threshold(double q) const;

  bool is_windowed() const { return windows_ != nullptr; }
  const Grid& grid() const { return grid_; }
  Transform transform() const { return transform_; }
  double q() const { return q_; }
  std::size_t size() const;
  const Partition& partition() const { return *partition_; }

  // Windowed systems only.
  const WindowSystem& windows() const { return *windows_; }
  double coefficient(int side) const;
  const std::vector<double>& side_coefficients() const { return coefficients_; }
  bool modulated() const { return modulation_ != nullptr; }
  const SignalArray& modulation() const { return *modulation_; }

  // Dense systems only.
  const SignalArray& dense_weight(std::size_t index) const;

  // Materialised weight of constraint `index`.
  SignalArray weight(std::size_t index) const;
  // mu_S(v) for constraint `index`.
  double average(std::size_t index, const SignalArray& v) const;

  // Stable text description of everything that defines the set.
  std::string describe() const;

 private:
  Grid grid_;
  Transform transform_ = Transform::Identity;
  double q_ = 1.0;
  std::shared_ptr<const WindowSystem> windows_;
  std::vector<double> coefficients_;
  std::shared_ptr<const SignalArray> modulation_;
  std::shared_ptr<const std::vector<SignalArray>> dense_;
  std::shared_ptr<const Partition> partition_;
};

// Coefficients 1 for every side (w^S = indicator).
std::vector<double> indicator_coefficients(const WindowSystem& windows);
// Coefficients 1/sqrt(#S) for every side.
std::vector<double> normalized_coefficients(const WindowSystem& windows);

// For each side s in the system, max over windows of that side of
// |sum_{v in S} values_v|. Uses summed-area tables, so the cost is
// O(2^d |windows|).
std::vector<double> side_maxima(const WindowSystem& windows,
                                const SignalArray& values);

// T(v) = max_S mu_S(v). Throws InvalidArgument on an empty system.
double mr_statistic(const ConstraintSystem& system, const SignalArray& v);

// Index sets of nonzero entries grouped so that supports within a group
// are pairwise disjoint (first fit in index order).
Partition partition_by_support(const std::vector<SignalArray>& weights);

}  // namespace smre
