#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fairmon/interval.hpp"

namespace fairmon {

/// Observation symbols are plain strings in the AST; monitors resolve them
/// against an Alphabet once, at construction.
using Symbol = std::string;
using Word = std::vector<Symbol>;

/// Token that matches any symbol inside an atom pattern.
inline constexpr std::string_view kWildcard = "_";

/// Finite, ordered observation alphabet with dense ids.
class Alphabet {
 public:
  Alphabet() = default;
  explicit Alphabet(std::vector<Symbol> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::vector<Symbol>& symbols() const { return symbols_; }
  const Symbol& symbol(int id) const { return symbols_.at(static_cast<std::size_t>(id)); }
  std::optional<int> find(std::string_view s) const;
  /// Throws SymbolError when `s` is not a member.
  int id(std::string_view s) const;
  bool contains(std::string_view s) const { return find(s).has_value(); }

 private:
  std::vector<Symbol> symbols_;
};

struct AtomRule {
  std::vector<Symbol> pattern;  // length == arity; kWildcard matches anything
  double value = 0.0;
};

/// Window function nu: O^n -> [lo, hi] given as a first-match-wins table.
struct AtomDef {
  std::string name;
  int arity = 1;
  double lo = 0.0;
  double hi = 1.0;
  std::vector<AtomRule> rules;
  double default_value = 0.0;

  Interval range() const { return {lo, hi}; }
  double evaluate(std::span<const Symbol> window) const;
  /// Throws Error if a value leaves [lo, hi], a pattern has the wrong length,
  /// or the arity is not positive.
  void validate() const;
};

enum class NodeKind { constant, atom, seq_prob, transition, add, sub, mul, div };

/// Transition variable rho(target | source). `label` is 0 until assign_labels.
struct TransitionVar {
  Symbol source;
  Symbol target;
  int label = 0;

  auto operator<=>(const TransitionVar&) const = default;
};

/// Immutable expression tree with value semantics (nodes are shared).
class Expression {
 public:
  struct Node;

  /// Constant expression; implicit so `2.0 * x` reads naturally.
  Expression(double value);  // NOLINT(google-explicit-constructor)

  static Expression atom(std::shared_ptr<const AtomDef> def);
  /// Probability that the window starting at a given position begins with a
  /// word of `words`. Arity is the maximum word length.
  static Expression seq_prob(std::vector<Word> words);
  static Expression transition(Symbol source, Symbol target, int label = 0);
  static Expression binary(NodeKind op, Expression lhs, Expression rhs);

  NodeKind kind() const;
  bool is_leaf() const;
  double constant_value() const;
  const AtomDef& atom_def() const;
  const std::shared_ptr<const AtomDef>& atom_ptr() const;
  const std::vector<Word>& words() const;
  int seq_arity() const;
  const TransitionVar& transition_var() const;
  const Expression& lhs() const;
  const Expression& rhs() const;

  /// Stable node identity, used as a memo key.
  const Node* node() const { return node_.get(); }

  friend Expression operator+(Expression a, Expression b);
  friend Expression operator-(Expression a, Expression b);
  friend Expression operator*(Expression a, Expression b);
  friend Expression operator/(Expression a, Expression b);

 private:
  explicit Expression(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

struct Expression::Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  std::shared_ptr<const AtomDef> atom;
  std::vector<Word> words;
  int seq_arity = 0;
  TransitionVar var;
  std::optional<Expression> lhs;
  std::optional<Expression> rhs;
};

bool is_binary(NodeKind k);
char op_char(NodeKind k);
ArithOp arith_op(NodeKind k);

/// Structural equality; atoms compare by name, transition labels included.
bool structurally_equal(const Expression& a, const Expression& b);

/// Fully parenthesised concrete syntax that parse() maps back to the same tree.
std::string to_string(const Expression& e);

/// Number of atom, sequence-probability and transition-variable leaves.
std::size_t count_atoms(const Expression& e);

/// Number of arithmetic operators.
std::size_t expression_size(const Expression& e);

bool is_division_free(const Expression& e);

/// True when every leaf is a constant or a transition variable.
bool is_pse(const Expression& e);

/// Leaves in pre-order (left to right).
void for_each_leaf(const Expression& e, const std::function<void(const Expression&)>& fn);

/// Gives every transition-variable occurrence a distinct label: the k-th
/// occurrence of rho(r|q) in pre-order gets label k.
Expression assign_labels(const Expression& e);

/// Resets every label to 0.
Expression erase_labels(const Expression& e);

/// Source states of the transition variables in `e`.
std::set<Symbol> dependency_sources(const Expression& e);

/// Rewrites conditional probabilities P[v | u] over single symbols, i.e.
/// P[u v] / P[u], into transition variables T[u->v]. Other nodes are kept.
Expression lower_conditionals(const Expression& e);

/// Evaluates `e` with `leaf` supplying the value of every non-constant leaf.
/// Division by zero yields +-inf or NaN following IEEE rules.
double evaluate(const Expression& e, const std::function<double(const Expression&)>& leaf);

/// Interval-arithmetic range: atoms over [lo,hi], probabilities over [0,1].
Interval static_range(const Expression& e);

}  // namespace fairmon
