#pragma once

#include <memory>
#include <span>
#include <string_view>
#include <vector>

#include "fairmon/expression.hpp"

namespace fairmon {

/// Which leaves a specification may use. `pomc` forbids transition variables.
enum class SpecMode { any, pomc, mc };

struct Specification {
  Alphabet alphabet;
  std::vector<std::shared_ptr<const AtomDef>> atoms;
  Expression property = 0.0;

  const AtomDef* find_atom(std::string_view name) const;
};

/// Parses a whole specification file:
///
///   alphabet: a b c
///   atom name arity 2 range [0,1] { a b -> 1; _ c -> 0.5; default -> 0 }
///   property: F[name] - P[a | b]
///
/// `#` starts a comment that runs to the end of the line.
Specification parse_specification(std::string_view text, SpecMode mode = SpecMode::any);

/// Parses a bare expression. Symbols are checked against `alphabet` unless it
/// is empty; atoms are resolved by name against `atoms`.
Expression parse_expression(std::string_view text, const Alphabet& alphabet,
                            std::span<const std::shared_ptr<const AtomDef>> atoms, SpecMode mode = SpecMode::any);

/// Convenience overload without alphabet or atoms.
Expression parse_expression(std::string_view text, SpecMode mode = SpecMode::any);

}  // namespace fairmon
