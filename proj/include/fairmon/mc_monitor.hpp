#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string_view>
#include <vector>

#include "fairmon/bounds.hpp"
#include "fairmon/polynomial.hpp"
#include "fairmon/rng.hpp"
#include "fairmon/slots.hpp"
#include "fairmon/verdict.hpp"

namespace fairmon {

/// Recorded successors of one state that have not been handed out yet: c_i
/// visits in total, c_ij of them to relevant successor j. Draws are without
/// replacement, so the order in which outcomes are revealed is uniformly
/// random.
class ReshufflePool {
 public:
  explicit ReshufflePool(std::vector<int> targets = {});

  /// Records one visit whose successor is `symbol` (any alphabet id).
  void record(int symbol);
  /// Removes one recorded outcome uniformly at random: a relevant successor
  /// id or kTop. Empty pool gives nullopt.
  std::optional<int> draw(SplitMix64& rng);

  std::uint64_t total() const { return total_; }
  std::uint64_t count(int symbol) const;
  const std::vector<int>& targets() const { return targets_; }
  bool consistent() const;

 private:
  std::vector<int> targets_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

struct McOptions {
  double delta = 0.05;
  Soundness mode = Soundness::pointwise;
  std::uint64_t seed = 0;
  RangeOptions range;
};

/// Monitor for a division-free PSE over a fully observed chain. Every
/// completed round of slot draws yields one outcome Y with E[Y] equal to the
/// expression's value; the estimate is the running mean of the outcomes.
class DivisionFreeMonitor {
 public:
  DivisionFreeMonitor(const Expression& e, const Alphabet& alphabet, const McOptions& options);

  /// Consumes one state symbol (alphabet id). Returns the latest estimate,
  /// which is Inconclusive until the first outcome.
  Verdict next(int symbol);

  const CompiledPse& compiled() const { return pse_; }
  Interval range() const { return range_; }
  bool range_exhaustive() const { return exhaustive_; }
  double sigma_sq() const { return sigma_sq_; }
  std::int64_t samples() const { return samples_; }
  double mean() const { return mean_; }
  double half_width() const { return eps_; }
  /// Outcome completed by the most recent next(), if any.
  std::optional<double> last_outcome() const { return last_outcome_; }
  std::size_t peak_buffer() const { return peak_buffer_; }
  bool counters_consistent() const;
  const std::vector<ReshufflePool>& pools() const { return pools_; }
  bool is_constant() const { return constant_; }
  Verdict current() const;

 private:
  // NaN encodes the undefined result of an incomplete round.
  double eval(int node);
  void reset_round();

  CompiledPse pse_;
  double delta_;
  Soundness mode_;
  SplitMix64 rng_;
  Interval range_;
  bool exhaustive_ = false;
  double sigma_sq_ = 0.0;
  bool constant_ = false;

  std::vector<ReshufflePool> pools_;
  std::vector<std::vector<int>> z_;
  std::vector<double> memo_;
  std::vector<char> memo_set_;
  int prev_ = -1;

  std::int64_t samples_ = 0;
  double mean_ = 0.0;
  double eps_ = 0.0;
  std::optional<double> last_outcome_;
  std::size_t peak_buffer_ = 0;
};

/// Monitor for a PSE with monomial denominators: phi = a + b / c, one
/// division-free monitor per part with delta / 3 each.
class PseMonitor {
 public:
  PseMonitor(const Expression& e, Alphabet alphabet, const McOptions& options);

  Verdict next(std::string_view symbol);
  Verdict next(int symbol);

  const Alphabet& alphabet() const { return alphabet_; }
  const DivisionDecomposition& decomposition() const { return decomposition_; }
  bool has_division() const { return decomposition_.has_division(); }
  /// Part monitors: just `a` when division-free, else a, b, c.
  const std::vector<DivisionFreeMonitor>& parts() const { return parts_; }
  std::int64_t t() const { return t_; }

 private:
  Alphabet alphabet_;
  DivisionDecomposition decomposition_;
  std::vector<DivisionFreeMonitor> parts_;
  std::int64_t t_ = 0;
};

}  // namespace fairmon
