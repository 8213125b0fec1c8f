#pragma once

#include <cstdint>
#include <memory>
#include <string_view>
#include <vector>

#include "fairmon/bounds.hpp"
#include "fairmon/expression.hpp"
#include "fairmon/verdict.hpp"

namespace fairmon {

/// Sliding-window monitor for one atom or sequence probability: keeps the
/// last n symbols, the running mean of the window function and the step count.
class AtomicMonitor {
 public:
  AtomicMonitor(const Expression& leaf, const Alphabet& alphabet, double delta, Soundness mode, double tau_mix);

  /// Consumes one symbol (alphabet id). Inconclusive while t < n.
  Verdict next(int symbol);

  int arity() const { return n_; }
  Interval range() const { return range_; }
  std::int64_t t() const { return t_; }
  double mean() const { return mean_; }
  double delta() const { return delta_; }
  /// Half-width of the most recent interval before clipping to the range.
  double last_half_width() const { return half_width_; }

 private:
  double window_value() const;

  int n_;
  Interval range_;
  double delta_;
  Soundness mode_;
  double tau_mix_;
  // Window function: first-match rules (atom) or prefix words (sequence probability).
  bool is_atom_;
  std::vector<std::vector<int>> patterns_;
  std::vector<double> values_;
  double default_value_ = 0.0;

  std::vector<int> window_;
  std::size_t head_ = 0;  // index of the oldest symbol once the window is full
  std::int64_t t_ = 0;
  double mean_ = 0.0;
  double half_width_ = 0.0;
};

struct PomcOptions {
  double delta = 0.05;
  Soundness mode = Soundness::pointwise;
  double tau_mix = 1.0;
  /// Report the running intersection of bounded verdicts (uniform mode only).
  bool intersect_uniform = false;
};

/// Rewrites every T[q->r] into P[q r] / P[q].
Expression expand_transitions(const Expression& e);

/// Compositional monitor: one AtomicMonitor per leaf with an equal share of
/// delta, folded through the expression with interval arithmetic.
class PomcMonitor {
 public:
  PomcMonitor(const Expression& e, Alphabet alphabet, const PomcOptions& options);

  Verdict next(std::string_view symbol);
  Verdict next(int symbol);

  const Alphabet& alphabet() const { return alphabet_; }
  const std::vector<AtomicMonitor>& atoms() const { return atoms_; }
  Interval static_bounds() const { return range_; }
  std::int64_t t() const { return t_; }

 private:
  struct Node {
    NodeKind kind;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
    int atom = -1;
  };
  int compile(const Expression& e);

  Alphabet alphabet_;
  PomcOptions options_;
  std::vector<AtomicMonitor> atoms_;
  std::vector<Node> nodes_;
  Interval range_;
  std::vector<Verdict> leaf_verdicts_;
  std::vector<Interval> iv_;
  std::vector<double> pt_;
  std::int64_t t_ = 0;
  bool have_running_ = false;
  Interval running_;
};

}  // namespace fairmon
