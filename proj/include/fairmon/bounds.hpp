#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fairmon/expression.hpp"
#include "fairmon/interval.hpp"

namespace fairmon {

enum class Soundness { pointwise, uniform };

// Half-widths of the confidence intervals. All logarithms are natural.

/// McDiarmid-style bound for an arity-n atom with range [a,b] on a chain whose
/// mixing time is at most tau_mix; holds at each fixed t.
double ci_pomc_pointwise(double delta, std::int64_t t, int n, double a, double b, double tau_mix);

/// Same kernel with delta spread over time as 6*delta/(pi^2 t^2): holds at all t simultaneously.
double ci_pomc_uniform(double delta, std::int64_t t, int n, double a, double b, double tau_mix);

double ci_pomc(Soundness mode, double delta, std::int64_t t, int n, double a, double b, double tau_mix);

/// Hoeffding bound for the mean of t i.i.d. outcomes with range width sqrt(sigma_sq).
double ci_mc_pointwise(std::int64_t t, double delta, double sigma_sq);

/// Stitched time-uniform bound. The inner logarithm is clamped to >= 1 so
/// the bound is defined at every t, and the result is never narrower than
/// ci_mc_pointwise at the same arguments.
double ci_mc_uniform(std::int64_t t, double delta, double sigma_sq);

double ci_mc(Soundness mode, std::int64_t t, double delta, double sigma_sq);

enum class LiftScaling { polynomial, exponential };

/// Per-step confidence delta_t = delta / h(t) of the union-bound lift.
/// Returned in log form, ln(delta_t), so exponential scaling does not underflow.
double naive_lift_log_delta(double delta, std::int64_t t, LiftScaling scaling);

/// Pointwise Hoeffding bound evaluated at the union-bound-lifted delta_t.
double naive_uniform_lift(double delta, std::int64_t t, LiftScaling scaling, double sigma_sq = 1.0);

/// Confidence budget: one share per atom leaf, indexed in pre-order.
struct DeltaBudget {
  double total = 0.0;
  std::vector<double> allocation;

  double allocated() const;
};

/// Equal split of `total` over the atom leaves of `e`.
DeltaBudget split_delta(double total, const Expression& e);

/// Share per part of an a + b / c decomposition.
inline double division_part_delta(double total) { return total / 3.0; }

/// Folds one interval per atom leaf (pre-order) through the arithmetic of
/// `structure` with interval arithmetic.
Interval baseline_union_interval(std::span<const Interval> variable_cis, const Expression& structure);

}  // namespace fairmon
