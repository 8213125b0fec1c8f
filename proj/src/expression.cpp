#include "fairmon/expression.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <map>

#include "fairmon/error.hpp"

namespace fairmon {

// --- Alphabet ---------------------------------------------------------------

Alphabet::Alphabet(std::vector<Symbol> symbols) : symbols_(std::move(symbols)) {
  for (std::size_t i = 0; i < symbols_.size(); ++i) {
    if (symbols_[i].empty()) throw Error("empty observation symbol");
    if (symbols_[i] == kWildcard) throw Error("'_' is reserved for atom patterns");
    for (std::size_t j = 0; j < i; ++j) {
      if (symbols_[j] == symbols_[i]) throw Error("duplicate symbol '" + symbols_[i] + "' in alphabet");
    }
  }
}

std::optional<int> Alphabet::find(std::string_view s) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), s);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<int>(it - symbols_.begin());
}

int Alphabet::id(std::string_view s) const {
  if (auto i = find(s)) return *i;
  throw SymbolError("symbol '" + std::string(s) + "' is not in the alphabet");
}

// --- AtomDef ----------------------------------------------------------------

double AtomDef::evaluate(std::span<const Symbol> window) const {
  for (const auto& rule : rules) {
    bool match = true;
    for (std::size_t k = 0; k < rule.pattern.size() && match; ++k) {
      match = rule.pattern[k] == kWildcard || rule.pattern[k] == window[k];
    }
    if (match) return rule.value;
  }
  return default_value;
}

void AtomDef::validate() const {
  if (arity < 1) throw Error("atom '" + name + "': arity must be positive");
  if (!(lo <= hi)) throw Error("atom '" + name + "': empty range");
  auto check = [&](double v) {
    if (v < lo || v > hi) throw Error(fmt::format("atom '{}': value {} outside range [{},{}]", name, v, lo, hi));
  };
  for (const auto& r : rules) {
    if (static_cast<int>(r.pattern.size()) != arity) {
      throw Error(fmt::format("atom '{}': pattern of length {} for arity {}", name, r.pattern.size(), arity));
    }
    check(r.value);
  }
  check(default_value);
}

// --- Expression -------------------------------------------------------------

Expression::Expression(double value) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value;
  node_ = std::move(n);
}

Expression Expression::atom(std::shared_ptr<const AtomDef> def) {
  if (!def) throw Error("null atom definition");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::atom;
  n->atom = std::move(def);
  return Expression(std::shared_ptr<const Node>(std::move(n)));
}

Expression Expression::seq_prob(std::vector<Word> words) {
  if (words.empty()) throw Error("empty word set in sequence probability");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::seq_prob;
  for (const auto& w : words) {
    if (w.empty()) throw Error("empty word in sequence probability");
    n->seq_arity = std::max(n->seq_arity, static_cast<int>(w.size()));
  }
  n->words = std::move(words);
  return Expression(std::shared_ptr<const Node>(std::move(n)));
}

Expression Expression::transition(Symbol source, Symbol target, int label) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::transition;
  n->var = TransitionVar{std::move(source), std::move(target), label};
  return Expression(std::shared_ptr<const Node>(std::move(n)));
}

Expression Expression::binary(NodeKind op, Expression lhs, Expression rhs) {
  if (!is_binary(op)) throw Error("not a binary operator");
  auto n = std::make_shared<Node>();
  n->kind = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return Expression(std::shared_ptr<const Node>(std::move(n)));
}

NodeKind Expression::kind() const { return node_->kind; }
bool Expression::is_leaf() const { return !is_binary(node_->kind); }
double Expression::constant_value() const { return node_->value; }
const AtomDef& Expression::atom_def() const { return *node_->atom; }
const std::shared_ptr<const AtomDef>& Expression::atom_ptr() const { return node_->atom; }
const std::vector<Word>& Expression::words() const { return node_->words; }
int Expression::seq_arity() const { return node_->seq_arity; }
const TransitionVar& Expression::transition_var() const { return node_->var; }
const Expression& Expression::lhs() const { return *node_->lhs; }
const Expression& Expression::rhs() const { return *node_->rhs; }

Expression operator+(Expression a, Expression b) { return Expression::binary(NodeKind::add, std::move(a), std::move(b)); }
Expression operator-(Expression a, Expression b) { return Expression::binary(NodeKind::sub, std::move(a), std::move(b)); }
Expression operator*(Expression a, Expression b) { return Expression::binary(NodeKind::mul, std::move(a), std::move(b)); }
Expression operator/(Expression a, Expression b) { return Expression::binary(NodeKind::div, std::move(a), std::move(b)); }

bool is_binary(NodeKind k) {
  return k == NodeKind::add || k == NodeKind::sub || k == NodeKind::mul || k == NodeKind::div;
}

char op_char(NodeKind k) {
  switch (k) {
    case NodeKind::add: return '+';
    case NodeKind::sub: return '-';
    case NodeKind::mul: return '*';
    case NodeKind::div: return '/';
    default: return '?';
  }
}

ArithOp arith_op(NodeKind k) {
  switch (k) {
    case NodeKind::add: return ArithOp::add;
    case NodeKind::sub: return ArithOp::sub;
    case NodeKind::mul: return ArithOp::mul;
    case NodeKind::div: return ArithOp::div;
    default: throw Error("not an arithmetic node");
  }
}

bool structurally_equal(const Expression& a, const Expression& b) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case NodeKind::constant:
      return a.constant_value() == b.constant_value();
    case NodeKind::atom:
      return a.atom_def().name == b.atom_def().name;
    case NodeKind::seq_prob:
      return a.words() == b.words();
    case NodeKind::transition:
      return a.transition_var() == b.transition_var();
    default:
      return structurally_equal(a.lhs(), b.lhs()) && structurally_equal(a.rhs(), b.rhs());
  }
}

namespace {

std::string join_word(const Word& w) {
  std::string out;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (i) out += ' ';
    out += w[i];
  }
  return out;
}

}  // namespace

std::string to_string(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant: {
      double v = e.constant_value();
      if (v < 0 || std::signbit(v)) return fmt::format("(-{})", -v);
      return fmt::format("{}", v);
    }
    case NodeKind::atom:
      return "F[" + e.atom_def().name + "]";
    case NodeKind::seq_prob: {
      std::string out = "P[";
      for (std::size_t i = 0; i < e.words().size(); ++i) {
        if (i) out += ", ";
        out += join_word(e.words()[i]);
      }
      return out + "]";
    }
    case NodeKind::transition: {
      const auto& v = e.transition_var();
      std::string out = "T[" + v.source + "->" + v.target + "]";
      if (v.label > 0) out += fmt::format("^{}", v.label);
      return out;
    }
    default:
      return "(" + to_string(e.lhs()) + " " + op_char(e.kind()) + " " + to_string(e.rhs()) + ")";
  }
}

void for_each_leaf(const Expression& e, const std::function<void(const Expression&)>& fn) {
  if (e.is_leaf()) {
    fn(e);
    return;
  }
  for_each_leaf(e.lhs(), fn);
  for_each_leaf(e.rhs(), fn);
}

std::size_t count_atoms(const Expression& e) {
  std::size_t n = 0;
  for_each_leaf(e, [&](const Expression& leaf) {
    if (leaf.kind() != NodeKind::constant) ++n;
  });
  return n;
}

std::size_t expression_size(const Expression& e) {
  if (e.is_leaf()) return 0;
  return 1 + expression_size(e.lhs()) + expression_size(e.rhs());
}

bool is_division_free(const Expression& e) {
  if (e.is_leaf()) return true;
  return e.kind() != NodeKind::div && is_division_free(e.lhs()) && is_division_free(e.rhs());
}

bool is_pse(const Expression& e) {
  bool ok = true;
  for_each_leaf(e, [&](const Expression& leaf) {
    ok = ok && (leaf.kind() == NodeKind::constant || leaf.kind() == NodeKind::transition);
  });
  return ok;
}

namespace {

Expression relabel(const Expression& e, std::map<std::pair<Symbol, Symbol>, int>* counters) {
  if (e.kind() == NodeKind::transition) {
    const auto& v = e.transition_var();
    int label = counters ? ++(*counters)[{v.source, v.target}] : 0;
    return Expression::transition(v.source, v.target, label);
  }
  if (e.is_leaf()) return e;
  Expression l = relabel(e.lhs(), counters);
  Expression r = relabel(e.rhs(), counters);
  return Expression::binary(e.kind(), std::move(l), std::move(r));
}

}  // namespace

Expression assign_labels(const Expression& e) {
  std::map<std::pair<Symbol, Symbol>, int> counters;
  return relabel(e, &counters);
}

Expression erase_labels(const Expression& e) { return relabel(e, nullptr); }

std::set<Symbol> dependency_sources(const Expression& e) {
  std::set<Symbol> out;
  for_each_leaf(e, [&](const Expression& leaf) {
    if (leaf.kind() == NodeKind::transition) out.insert(leaf.transition_var().source);
  });
  return out;
}

Expression lower_conditionals(const Expression& e) {
  if (e.is_leaf()) return e;
  if (e.kind() == NodeKind::div && e.lhs().kind() == NodeKind::seq_prob && e.rhs().kind() == NodeKind::seq_prob) {
    const auto& num = e.lhs().words();
    const auto& den = e.rhs().words();
    if (num.size() == 1 && den.size() == 1 && num[0].size() == 2 && den[0].size() == 1 && num[0][0] == den[0][0]) {
      return Expression::transition(num[0][0], num[0][1]);
    }
  }
  return Expression::binary(e.kind(), lower_conditionals(e.lhs()), lower_conditionals(e.rhs()));
}

double evaluate(const Expression& e, const std::function<double(const Expression&)>& leaf) {
  switch (e.kind()) {
    case NodeKind::constant: return e.constant_value();
    case NodeKind::add: return evaluate(e.lhs(), leaf) + evaluate(e.rhs(), leaf);
    case NodeKind::sub: return evaluate(e.lhs(), leaf) - evaluate(e.rhs(), leaf);
    case NodeKind::mul: return evaluate(e.lhs(), leaf) * evaluate(e.rhs(), leaf);
    case NodeKind::div: return evaluate(e.lhs(), leaf) / evaluate(e.rhs(), leaf);
    default: return leaf(e);
  }
}

Interval static_range(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant: return Interval::point(e.constant_value());
    case NodeKind::atom: return e.atom_def().range();
    case NodeKind::seq_prob:
    case NodeKind::transition: return {0.0, 1.0};
    default: return interval_combine(static_range(e.lhs()), static_range(e.rhs()), arith_op(e.kind()));
  }
}

}  // namespace fairmon
