#pragma once

#include <cstddef>
#include <vector>

#include "fairmon/expression.hpp"
#include "fairmon/interval.hpp"

namespace fairmon {

/// Marks a drawn outcome that is not a relevant successor.
inline constexpr int kTop = -1;

/// Division-free PSE flattened for the MC monitor. Nodes are in post-order,
/// so the root is last and children always precede their parent.
///
/// Each transition-variable leaf reads one draw slot z_source[slot]. Factors
/// of a product that share a source state read disjoint slots (the right
/// factor is shifted past every slot the left factor uses), which makes them
/// independent; summands share slots.
class CompiledPse {
 public:
  struct Node {
    NodeKind kind = NodeKind::constant;
    double value = 0.0;
    int lhs = -1;
    int rhs = -1;
    int source = -1;  // index into sources()
    int target = -1;  // alphabet id
    int slot = -1;
  };

  struct Source {
    int symbol = -1;              // alphabet id
    std::vector<int> targets;     // relevant successors (alphabet ids), ascending
    int slots = 0;                // draws needed per outcome
  };

  CompiledPse(const Expression& e, const Alphabet& alphabet);

  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<Source>& sources() const { return sources_; }
  /// Source index for an alphabet id, or -1 when the state is irrelevant.
  int source_of(int symbol) const { return source_index_[static_cast<std::size_t>(symbol)]; }
  std::size_t slot_count() const;
  std::size_t leaf_count() const;
  const Expression& expression() const { return expr_; }

  /// Value of the expression when slot (s, k) holds draws[s][k] (kTop allowed).
  double evaluate(const std::vector<std::vector<int>>& draws) const;

 private:
  Expression expr_;
  std::vector<Node> nodes_;
  std::vector<Source> sources_;
  std::vector<int> source_index_;
};

struct RangeOptions {
  std::size_t max_slots = 16;
  /// Upper limit on the number of joint assignments enumerated.
  std::size_t max_assignments = std::size_t{1} << 22;
};

struct RangeResult {
  Interval range;
  bool exhaustive = false;
};

/// Exact range of the per-round outcome over every joint assignment of the
/// draw slots, or the interval-arithmetic range when enumeration is capped.
RangeResult expr_range(const CompiledPse& pse, const RangeOptions& options = {});

/// Calls `fn` with every joint slot assignment (same layout as evaluate()).
void for_each_assignment(const CompiledPse& pse, const std::function<void(const std::vector<std::vector<int>>&)>& fn);

}  // namespace fairmon
