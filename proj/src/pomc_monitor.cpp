#include "fairmon/pomc_monitor.hpp"

#include <algorithm>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

constexpr int kNoMatch = -2;
constexpr int kAny = -1;

int pattern_id(const Symbol& s, const Alphabet& alphabet) {
  if (s == kWildcard) return kAny;
  auto id = alphabet.find(s);
  return id ? *id : kNoMatch;
}

}  // namespace

AtomicMonitor::AtomicMonitor(const Expression& leaf, const Alphabet& alphabet, double delta, Soundness mode,
                             double tau_mix)
    : delta_(delta), mode_(mode), tau_mix_(tau_mix) {
  if (leaf.kind() == NodeKind::atom) {
    const AtomDef& def = leaf.atom_def();
    def.validate();
    is_atom_ = true;
    n_ = def.arity;
    range_ = def.range();
    for (const auto& rule : def.rules) {
      std::vector<int> p;
      for (const auto& s : rule.pattern) p.push_back(pattern_id(s, alphabet));
      patterns_.push_back(std::move(p));
      values_.push_back(rule.value);
    }
    default_value_ = def.default_value;
  } else if (leaf.kind() == NodeKind::seq_prob) {
    is_atom_ = false;
    n_ = leaf.seq_arity();
    range_ = {0.0, 1.0};
    for (const auto& w : leaf.words()) {
      std::vector<int> p;
      for (const auto& s : w) p.push_back(s == kWildcard ? kNoMatch : pattern_id(s, alphabet));
      patterns_.push_back(std::move(p));
    }
  } else {
    throw NormalFormError("atomic monitor needs an atom or sequence probability, got " + to_string(leaf));
  }
  if (!(delta > 0.0 && delta < 1.0)) throw DomainError("delta must lie in (0,1)");
  if (!(tau_mix >= 1.0)) throw DomainError("tau_mix must be >= 1");
  window_.assign(static_cast<std::size_t>(n_), 0);
}

double AtomicMonitor::window_value() const {
  auto n = static_cast<std::size_t>(n_);
  for (std::size_t r = 0; r < patterns_.size(); ++r) {
    const auto& p = patterns_[r];
    bool match = true;
    for (std::size_t k = 0; k < p.size() && match; ++k) {
      int sym = window_[(head_ + k) % n];
      match = p[k] == kAny || p[k] == sym;
    }
    if (match) return is_atom_ ? values_[r] : 1.0;
  }
  return is_atom_ ? default_value_ : 0.0;
}

Verdict AtomicMonitor::next(int symbol) {
  ++t_;
  auto n = static_cast<std::size_t>(n_);
  if (t_ <= n_) {
    window_[static_cast<std::size_t>(t_ - 1)] = symbol;
    head_ = 0;
  } else {
    window_[head_] = symbol;
    head_ = (head_ + 1) % n;
  }
  if (t_ < n_) return Verdict::inconclusive();
  double x = window_value();
  mean_ = (mean_ * static_cast<double>(t_ - n_) + x) / static_cast<double>(t_ - (n_ - 1));
  half_width_ = ci_pomc(mode_, delta_, t_, n_, range_.lo, range_.hi, tau_mix_);
  return Verdict::bounded(clip({mean_ - half_width_, mean_ + half_width_}, range_), mean_);
}

Expression expand_transitions(const Expression& e) {
  if (e.kind() == NodeKind::transition) {
    const auto& v = e.transition_var();
    return Expression::seq_prob({{v.source, v.target}}) / Expression::seq_prob({{v.source}});
  }
  if (e.is_leaf()) return e;
  return Expression::binary(e.kind(), expand_transitions(e.lhs()), expand_transitions(e.rhs()));
}

PomcMonitor::PomcMonitor(const Expression& e, Alphabet alphabet, const PomcOptions& options)
    : alphabet_(std::move(alphabet)), options_(options) {
  Expression expanded = expand_transitions(e);
  range_ = static_range(expanded);
  std::size_t k = count_atoms(expanded);
  double share = k > 0 ? split_delta(options.delta, expanded).allocation.front() : options.delta;
  for_each_leaf(expanded, [&](const Expression& leaf) {
    if (leaf.kind() != NodeKind::constant) atoms_.emplace_back(leaf, alphabet_, share, options.mode, options.tau_mix);
  });
  compile(expanded);
  leaf_verdicts_.resize(atoms_.size());
  iv_.resize(nodes_.size());
  pt_.resize(nodes_.size());
}

int PomcMonitor::compile(const Expression& e) {
  Node n{e.kind()};
  if (e.kind() == NodeKind::constant) {
    n.value = e.constant_value();
  } else if (e.is_leaf()) {
    // Leaves are numbered in pre-order, matching the construction of atoms_.
    n.atom = static_cast<int>(std::count_if(nodes_.begin(), nodes_.end(), [](const Node& x) { return x.atom >= 0; }));
  } else {
    n.lhs = compile(e.lhs());
    n.rhs = compile(e.rhs());
  }
  nodes_.push_back(n);
  return static_cast<int>(nodes_.size()) - 1;
}

Verdict PomcMonitor::next(std::string_view symbol) { return next(alphabet_.id(symbol)); }

Verdict PomcMonitor::next(int symbol) {
  if (symbol < 0 || static_cast<std::size_t>(symbol) >= alphabet_.size()) throw SymbolError("symbol id out of range");
  ++t_;
  bool inconclusive = false;
  for (std::size_t i = 0; i < atoms_.size(); ++i) {
    leaf_verdicts_[i] = atoms_[i].next(symbol);
    inconclusive = inconclusive || leaf_verdicts_[i].is_inconclusive();
  }
  if (inconclusive) return Verdict::inconclusive();
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const Node& n = nodes_[i];
    switch (n.kind) {
      case NodeKind::constant:
        iv_[i] = Interval::point(n.value);
        pt_[i] = n.value;
        break;
      case NodeKind::atom:
      case NodeKind::seq_prob:
      case NodeKind::transition: {
        const Verdict& v = leaf_verdicts_[static_cast<std::size_t>(n.atom)];
        iv_[i] = v.interval;
        pt_[i] = v.point;
        break;
      }
      default: {
        auto l = static_cast<std::size_t>(n.lhs);
        auto r = static_cast<std::size_t>(n.rhs);
        iv_[i] = interval_combine(iv_[l], iv_[r], arith_op(n.kind));
        switch (n.kind) {
          case NodeKind::add: pt_[i] = pt_[l] + pt_[r]; break;
          case NodeKind::sub: pt_[i] = pt_[l] - pt_[r]; break;
          case NodeKind::mul: pt_[i] = pt_[l] * pt_[r]; break;
          default: pt_[i] = pt_[l] / pt_[r]; break;
        }
      }
    }
  }
  Interval out = iv_.back();
  double point = pt_.back();
  if (!out.is_bounded()) return Verdict::unbounded(point);
  out = clip(out, range_);
  if (options_.intersect_uniform && options_.mode == Soundness::uniform) {
    if (have_running_) {
      Interval meet{std::max(out.lo, running_.lo), std::min(out.hi, running_.hi)};
      if (meet.lo <= meet.hi) out = meet;
    }
    running_ = out;
    have_running_ = true;
  }
  return Verdict::bounded(out, point);
}

}  // namespace fairmon
