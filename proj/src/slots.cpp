#include "fairmon/slots.hpp"

#include <algorithm>
#include <limits>
#include <map>
#include <set>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

using SlotMap = std::map<int, int>;  // source index -> slot

struct Builder {
  std::vector<CompiledPse::Node>& nodes;
  const Alphabet& alphabet;
  const std::map<Symbol, int>& source_ids;

  // Returns the node index; `used` receives the highest slot read per source.
  int build(const Expression& e, const SlotMap& base, SlotMap& used) {
    CompiledPse::Node n;
    n.kind = e.kind();
    switch (e.kind()) {
      case NodeKind::constant:
        n.value = e.constant_value();
        break;
      case NodeKind::transition: {
        const auto& v = e.transition_var();
        n.source = source_ids.at(v.source);
        n.target = alphabet.id(v.target);
        auto it = base.find(n.source);
        n.slot = it == base.end() ? 0 : it->second;
        int& u = used.try_emplace(n.source, n.slot).first->second;
        u = std::max(u, n.slot);
        break;
      }
      case NodeKind::add:
      case NodeKind::sub: {
        n.lhs = build(e.lhs(), base, used);
        n.rhs = build(e.rhs(), base, used);
        break;
      }
      case NodeKind::mul: {
        SlotMap left_used;
        n.lhs = build(e.lhs(), base, left_used);
        SlotMap shifted = base;
        for (const auto& [src, top] : left_used) shifted[src] = top + 1;
        SlotMap right_used;
        n.rhs = build(e.rhs(), shifted, right_used);
        for (const auto* m : {&left_used, &right_used}) {
          for (const auto& [src, top] : *m) {
            int& u = used.try_emplace(src, top).first->second;
            u = std::max(u, top);
          }
        }
        break;
      }
      default:
        throw NormalFormError("the MC monitor needs a division-free PSE; found " + to_string(e));
    }
    nodes.push_back(n);
    return static_cast<int>(nodes.size()) - 1;
  }
};

}  // namespace

CompiledPse::CompiledPse(const Expression& e, const Alphabet& alphabet) : expr_(e) {
  if (!is_pse(e)) throw NormalFormError("the MC monitor needs a PSE over transition variables: " + to_string(e));
  if (!is_division_free(e)) throw NormalFormError("expression must be division-free: " + to_string(e));

  std::map<Symbol, std::set<int>> targets;
  for_each_leaf(e, [&](const Expression& leaf) {
    if (leaf.kind() != NodeKind::transition) return;
    const auto& v = leaf.transition_var();
    alphabet.id(v.source);
    targets[v.source].insert(alphabet.id(v.target));
  });
  std::map<Symbol, int> source_ids;
  source_index_.assign(alphabet.size(), -1);
  for (const auto& [sym, tg] : targets) {
    Source s;
    s.symbol = alphabet.id(sym);
    s.targets.assign(tg.begin(), tg.end());
    source_ids[sym] = static_cast<int>(sources_.size());
    source_index_[static_cast<std::size_t>(s.symbol)] = static_cast<int>(sources_.size());
    sources_.push_back(std::move(s));
  }

  Builder b{nodes_, alphabet, source_ids};
  SlotMap used;
  b.build(e, {}, used);
  for (const auto& n : nodes_) {
    if (n.kind == NodeKind::transition) {
      auto& s = sources_[static_cast<std::size_t>(n.source)];
      s.slots = std::max(s.slots, n.slot + 1);
    }
  }
}

std::size_t CompiledPse::slot_count() const {
  std::size_t n = 0;
  for (const auto& s : sources_) n += static_cast<std::size_t>(s.slots);
  return n;
}

std::size_t CompiledPse::leaf_count() const {
  return static_cast<std::size_t>(
      std::count_if(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.kind == NodeKind::transition; }));
}

double CompiledPse::evaluate(const std::vector<std::vector<int>>& draws) const {
  std::vector<double> val(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::constant: val[i] = n.value; break;
      case NodeKind::transition:
        val[i] = draws[static_cast<std::size_t>(n.source)][static_cast<std::size_t>(n.slot)] == n.target ? 1.0 : 0.0;
        break;
      case NodeKind::add: val[i] = val[n.lhs] + val[n.rhs]; break;
      case NodeKind::sub: val[i] = val[n.lhs] - val[n.rhs]; break;
      case NodeKind::mul: val[i] = val[n.lhs] * val[n.rhs]; break;
      default: break;
    }
  }
  return val.back();
}

void for_each_assignment(const CompiledPse& pse,
                         const std::function<void(const std::vector<std::vector<int>>&)>& fn) {
  const auto& sources = pse.sources();
  std::vector<std::vector<int>> draws(sources.size());
  // Odometer over flattened slots; digit 0 of each slot means kTop.
  std::vector<std::pair<std::size_t, std::size_t>> flat;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    draws[s].assign(static_cast<std::size_t>(sources[s].slots), kTop);
    for (int k = 0; k < sources[s].slots; ++k) flat.emplace_back(s, static_cast<std::size_t>(k));
  }
  std::vector<std::size_t> digit(flat.size(), 0);
  for (;;) {
    fn(draws);
    std::size_t i = 0;
    for (; i < flat.size(); ++i) {
      auto [s, k] = flat[i];
      const auto& tg = sources[s].targets;
      if (++digit[i] <= tg.size()) {
        draws[s][k] = tg[digit[i] - 1];
        break;
      }
      digit[i] = 0;
      draws[s][k] = kTop;
    }
    if (i == flat.size()) return;
  }
}

RangeResult expr_range(const CompiledPse& pse, const RangeOptions& options) {
  bool enumerate = pse.slot_count() <= options.max_slots;
  if (enumerate) {
    std::size_t combos = 1;
    for (const auto& s : pse.sources()) {
      for (int k = 0; k < s.slots && enumerate; ++k) {
        combos *= s.targets.size() + 1;
        enumerate = combos <= options.max_assignments;
      }
    }
  }
  if (!enumerate) return {static_range(pse.expression()), false};
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for_each_assignment(pse, [&](const std::vector<std::vector<int>>& d) {
    double v = pse.evaluate(d);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  });
  return {{lo, hi}, true};
}

}  // namespace fairmon
