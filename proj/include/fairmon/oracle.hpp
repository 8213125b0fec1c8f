#pragma once

#include <span>

#include "fairmon/expression.hpp"
#include "fairmon/markov.hpp"

namespace fairmon {

struct OracleOptions {
  /// Largest window length enumerated exactly (cost |O|^n |S|^2).
  int window_cap = 6;
};

/// Stationary expectation of one atom or sequence-probability leaf.
double window_expectation(const ObservationModel& model, const Eigen::VectorXd& pi, const Expression& leaf,
                          const OracleOptions& options = {});

/// Model-based value of a PSE on a fully observed chain: every T[q->r]
/// becomes M(q, r). Throws DomainError on a zero denominator and
/// NormalFormError on non-PSE leaves.
double truth_value_pse(const ObservationModel& model, const Expression& e);

/// Model-based value of a BSE: atoms and sequence probabilities are
/// stationary window expectations; T[q->r] is read as P[q r] / P[q].
double truth_value_bse(const ObservationModel& model, const Expression& e, const OracleOptions& options = {});

/// Dispatches to truth_value_pse for PSEs on fully observed models.
double truth_value(const ObservationModel& model, const Expression& e, const OracleOptions& options = {});

/// Finitary semantics on a finite word: every leaf is the average of its
/// window function over all complete windows. NaN when a window does not fit.
double finitary_value(const Expression& e, std::span<const Symbol> word);

}  // namespace fairmon
