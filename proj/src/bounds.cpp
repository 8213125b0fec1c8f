#include "fairmon/bounds.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

void check_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError(fmt::format("delta must lie in (0,1), got {}", delta));
}

void check_pomc(double delta, std::int64_t t, int n, double a, double b, double tau_mix) {
  check_delta(delta);
  if (n < 1) throw DomainError("atom arity must be at least 1");
  if (t < n) throw DomainError(fmt::format("t={} is below the window length {}", t, n));
  if (!(b >= a)) throw DomainError("range [a,b] must satisfy b >= a");
  if (!(tau_mix >= 1.0)) throw DomainError(fmt::format("tau_mix must be >= 1, got {}", tau_mix));
}

void check_mc(std::int64_t t, double delta, double sigma_sq) {
  check_delta(delta);
  if (t < 1) throw DomainError("t must be at least 1");
  if (!(sigma_sq >= 0.0)) throw DomainError("sigma^2 must be nonnegative");
}

double pomc_kernel(double log_term, std::int64_t t, int n, double a, double b, double tau_mix) {
  double td = static_cast<double>(t);
  double nd = static_cast<double>(n);
  double span = b - a;
  double eff = td - (nd - 1.0);
  return std::sqrt(log_term * td * nd * nd * span * span * 9.0 * tau_mix / (2.0 * eff * eff));
}

}  // namespace

double ci_pomc_pointwise(double delta, std::int64_t t, int n, double a, double b, double tau_mix) {
  check_pomc(delta, t, n, a, b, tau_mix);
  return pomc_kernel(std::log(2.0 / delta), t, n, a, b, tau_mix);
}

double ci_pomc_uniform(double delta, std::int64_t t, int n, double a, double b, double tau_mix) {
  check_pomc(delta, t, n, a, b, tau_mix);
  double td = static_cast<double>(t);
  double log_term = std::log(std::numbers::pi * std::numbers::pi * td * td / (3.0 * delta));
  return pomc_kernel(log_term, t, n, a, b, tau_mix);
}

double ci_pomc(Soundness mode, double delta, std::int64_t t, int n, double a, double b, double tau_mix) {
  return mode == Soundness::pointwise ? ci_pomc_pointwise(delta, t, n, a, b, tau_mix)
                                      : ci_pomc_uniform(delta, t, n, a, b, tau_mix);
}

double ci_mc_pointwise(std::int64_t t, double delta, double sigma_sq) {
  check_mc(t, delta, sigma_sq);
  return std::sqrt(sigma_sq / (2.0 * static_cast<double>(t)) * std::log(2.0 / delta));
}

double ci_mc_uniform(std::int64_t t, double delta, double sigma_sq) {
  check_mc(t, delta, sigma_sq);
  double td = static_cast<double>(t);
  double x = std::max(1.0, sigma_sq * td);
  double inner = std::max(1.0, std::log(x));
  double arg = 2.0 * std::log(std::numbers::pi * inner / std::sqrt(6.0)) + std::log(2.0 / delta);
  double eps = std::sqrt(1.064 * x * arg) / td;
  return std::max(eps, ci_mc_pointwise(t, delta, sigma_sq));
}

double ci_mc(Soundness mode, std::int64_t t, double delta, double sigma_sq) {
  return mode == Soundness::pointwise ? ci_mc_pointwise(t, delta, sigma_sq) : ci_mc_uniform(t, delta, sigma_sq);
}

double naive_lift_log_delta(double delta, std::int64_t t, LiftScaling scaling) {
  check_delta(delta);
  if (t < 1) throw DomainError("t must be at least 1");
  double td = static_cast<double>(t);
  if (scaling == LiftScaling::polynomial) {
    return std::log(delta) + std::log(6.0 / (std::numbers::pi * std::numbers::pi)) - 2.0 * std::log(td);
  }
  return std::log(delta) - td * std::numbers::ln2;
}

double naive_uniform_lift(double delta, std::int64_t t, LiftScaling scaling, double sigma_sq) {
  if (!(sigma_sq >= 0.0)) throw DomainError("sigma^2 must be nonnegative");
  double log_dt = naive_lift_log_delta(delta, t, scaling);
  // ln(2/delta_t) computed without materialising delta_t.
  double log_term = std::numbers::ln2 - log_dt;
  return std::sqrt(sigma_sq / (2.0 * static_cast<double>(t)) * log_term);
}

double DeltaBudget::allocated() const {
  double s = 0.0;
  for (double d : allocation) s += d;
  return s;
}

DeltaBudget split_delta(double total, const Expression& e) {
  check_delta(total);
  std::size_t k = count_atoms(e);
  if (k == 0) throw DomainError("expression has no atoms; no confidence budget is needed");
  DeltaBudget b;
  b.total = total;
  b.allocation.assign(k, total / static_cast<double>(k));
  return b;
}

namespace {

Interval fold(const Expression& e, std::span<const Interval> cis, std::size_t& next) {
  if (e.kind() == NodeKind::constant) return Interval::point(e.constant_value());
  if (e.is_leaf()) return cis[next++];
  Interval l = fold(e.lhs(), cis, next);
  Interval r = fold(e.rhs(), cis, next);
  return interval_combine(l, r, arith_op(e.kind()));
}

}  // namespace

Interval baseline_union_interval(std::span<const Interval> variable_cis, const Expression& structure) {
  std::size_t k = count_atoms(structure);
  if (variable_cis.size() != k) {
    throw DomainError(fmt::format("expected {} variable intervals, got {}", k, variable_cis.size()));
  }
  std::size_t next = 0;
  return fold(structure, variable_cis, next);
}

}  // namespace fairmon
