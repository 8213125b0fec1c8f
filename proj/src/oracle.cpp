#include "fairmon/oracle.hpp"

#include <fmt/format.h>

#include <cmath>
#include <limits>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

bool has_prefix_in(std::span<const Symbol> window, const std::vector<Word>& words) {
  for (const auto& w : words) {
    if (w.size() <= window.size() && std::equal(w.begin(), w.end(), window.begin())) return true;
  }
  return false;
}

double leaf_window_value(const Expression& leaf, std::span<const Symbol> window) {
  if (leaf.kind() == NodeKind::atom) return leaf.atom_def().evaluate(window);
  return has_prefix_in(window, leaf.words()) ? 1.0 : 0.0;
}

int leaf_arity(const Expression& leaf) {
  return leaf.kind() == NodeKind::atom ? leaf.atom_def().arity : leaf.seq_arity();
}

// Depth-first walk over label words of length n, carrying the joint mass of
// the word and the current state.
struct WordWalker {
  const ObservationModel& model;
  const Alphabet alphabet;
  std::vector<Eigen::ArrayXd> masks;  // per label: 1 on states with that label
  const Expression& leaf;
  int n;
  Word word;
  double total = 0.0;

  WordWalker(const ObservationModel& m, const Expression& l, int arity)
      : model(m), alphabet(m.alphabet()), leaf(l), n(arity) {
    const auto s = static_cast<Eigen::Index>(m.size());
    for (const auto& sym : alphabet.symbols()) {
      Eigen::ArrayXd mask = Eigen::ArrayXd::Zero(s);
      for (Eigen::Index i = 0; i < s; ++i) mask(i) = m.labels[static_cast<std::size_t>(i)] == sym ? 1.0 : 0.0;
      masks.push_back(std::move(mask));
    }
  }

  void walk(const Eigen::VectorXd& alpha) {
    if (static_cast<int>(word.size()) == n) {
      double mass = alpha.sum();
      if (mass > 0.0) total += mass * leaf_window_value(leaf, word);
      return;
    }
    Eigen::VectorXd step = word.empty() ? alpha : Eigen::VectorXd(model.transition.transpose() * alpha);
    for (std::size_t o = 0; o < masks.size(); ++o) {
      Eigen::VectorXd next = (step.array() * masks[o]).matrix();
      if (next.sum() <= 0.0) continue;
      word.push_back(alphabet.symbols()[o]);
      walk(next);
      word.pop_back();
    }
  }
};

double divide_checked(double num, double den, const Expression& e) {
  if (den == 0.0) throw DomainError("zero denominator in " + to_string(e));
  return num / den;
}

double eval_with(const Expression& e, const std::function<double(const Expression&)>& leaf) {
  switch (e.kind()) {
    case NodeKind::constant: return e.constant_value();
    case NodeKind::add: return eval_with(e.lhs(), leaf) + eval_with(e.rhs(), leaf);
    case NodeKind::sub: return eval_with(e.lhs(), leaf) - eval_with(e.rhs(), leaf);
    case NodeKind::mul: return eval_with(e.lhs(), leaf) * eval_with(e.rhs(), leaf);
    case NodeKind::div: return divide_checked(eval_with(e.lhs(), leaf), eval_with(e.rhs(), leaf), e.rhs());
    default: return leaf(e);
  }
}

}  // namespace

double window_expectation(const ObservationModel& model, const Eigen::VectorXd& pi, const Expression& leaf,
                          const OracleOptions& options) {
  if (leaf.kind() != NodeKind::atom && leaf.kind() != NodeKind::seq_prob) {
    throw NormalFormError("window expectation needs an atom or sequence probability");
  }
  int n = leaf_arity(leaf);
  if (n > options.window_cap) {
    throw DomainError(fmt::format("window length {} exceeds the oracle cap {}", n, options.window_cap));
  }
  WordWalker w(model, leaf, n);
  w.walk(pi);
  return w.total;
}

double truth_value_pse(const ObservationModel& model, const Expression& e) {
  if (!is_pse(e)) throw NormalFormError("not a PSE: " + to_string(e));
  if (!model.fully_observed()) throw ModelError("PSE semantics need a fully observed model");
  if (!is_irreducible(model)) throw ModelError("chain is reducible");
  return eval_with(e, [&](const Expression& leaf) {
    const auto& v = leaf.transition_var();
    return model.transition(model.state_of_label(v.source), model.state_of_label(v.target));
  });
}

double truth_value_bse(const ObservationModel& model, const Expression& e, const OracleOptions& options) {
  Eigen::VectorXd pi = stationary_distribution(model).pi;
  return eval_with(e, [&](const Expression& leaf) {
    if (leaf.kind() == NodeKind::transition) {
      const auto& v = leaf.transition_var();
      double joint = window_expectation(model, pi, Expression::seq_prob({{v.source, v.target}}), options);
      double marginal = window_expectation(model, pi, Expression::seq_prob({{v.source}}), options);
      return divide_checked(joint, marginal, leaf);
    }
    return window_expectation(model, pi, leaf, options);
  });
}

double truth_value(const ObservationModel& model, const Expression& e, const OracleOptions& options) {
  if (is_pse(e) && model.fully_observed()) return truth_value_pse(model, e);
  return truth_value_bse(model, e, options);
}

double finitary_value(const Expression& e, std::span<const Symbol> word) {
  auto average = [&](const Expression& leaf) {
    auto n = static_cast<std::size_t>(leaf_arity(leaf));
    if (word.size() < n) return std::numeric_limits<double>::quiet_NaN();
    double s = 0.0;
    for (std::size_t i = 0; i + n <= word.size(); ++i) s += leaf_window_value(leaf, word.subspan(i, n));
    return s / static_cast<double>(word.size() - n + 1);
  };
  return evaluate(e, [&](const Expression& leaf) {
    if (leaf.kind() == NodeKind::transition) {
      const auto& v = leaf.transition_var();
      return average(Expression::seq_prob({{v.source, v.target}})) / average(Expression::seq_prob({{v.source}}));
    }
    return average(leaf);
  });
}

}  // namespace fairmon
