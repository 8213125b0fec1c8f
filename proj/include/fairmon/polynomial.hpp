#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "fairmon/expression.hpp"

namespace fairmon {

/// Transition variable rho(target | source) without its occurrence label.
using PolyVar = std::pair<Symbol, Symbol>;

/// Variable -> exponent; negative exponents are denominators. Never stores 0.
using ExponentMap = std::map<PolyVar, int>;

struct Monomial {
  double coefficient = 1.0;
  ExponentMap exponents;

  bool operator==(const Monomial&) const = default;
};

/// Sum of monomials with pairwise distinct exponent maps and nonzero
/// coefficients, ordered lexicographically by exponent map.
struct PolynomialForm {
  std::vector<Monomial> terms;

  bool is_zero() const { return terms.empty(); }
  bool is_division_free() const;
  bool operator==(const PolynomialForm&) const = default;
};

/// Expands a PSE into polynomial form. Every denominator must normalise to a
/// single monomial; anything else raises NormalFormError.
PolynomialForm to_polynomial(const Expression& e);

/// Sum-of-products expression for `p` (0 for the zero polynomial).
Expression to_expression(const PolynomialForm& p);

double evaluate(const PolynomialForm& p, const std::function<double(const PolyVar&)>& value);

/// Symbol count of the flat sum-of-products rendering: every variable
/// occurrence (repeated per unit of exponent), every coefficient other than 1,
/// and every operator joining them.
std::size_t symbol_size(const PolynomialForm& p);

std::string to_string(const PolynomialForm& p);

/// phi = a + b / c with a, b division-free and c a single monomial.
struct DivisionDecomposition {
  PolynomialForm a;
  PolynomialForm b;
  PolynomialForm c;

  Expression phi_a() const { return to_expression(a); }
  Expression phi_b() const { return to_expression(b); }
  Expression phi_c() const { return to_expression(c); }
  bool has_division() const { return !b.is_zero(); }
};

/// `a` collects the division-free monomials, `c` is the least common
/// denominator monomial and `b` is (p - a) * c expanded.
DivisionDecomposition decompose_division(const PolynomialForm& p);

}  // namespace fairmon
