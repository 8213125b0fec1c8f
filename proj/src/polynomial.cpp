#include "fairmon/polynomial.hpp"

#include <algorithm>
#include <optional>

#include <fmt/format.h>

#include <cmath>
#include <cstdlib>

#include "fairmon/error.hpp"

namespace fairmon {

namespace {

using TermMap = std::map<ExponentMap, double>;

PolynomialForm from_terms(const TermMap& terms) {
  PolynomialForm p;
  for (const auto& [exps, coef] : terms) {
    if (coef != 0.0) p.terms.push_back({coef, exps});
  }
  return p;
}

TermMap to_terms(const PolynomialForm& p) {
  TermMap out;
  for (const auto& m : p.terms) out[m.exponents] += m.coefficient;
  return out;
}

ExponentMap multiply_exponents(const ExponentMap& x, const ExponentMap& y) {
  ExponentMap out = x;
  for (const auto& [v, e] : y) {
    int s = (out[v] += e);
    if (s == 0) out.erase(v);
  }
  return out;
}

PolynomialForm add(const PolynomialForm& x, const PolynomialForm& y, double sign) {
  TermMap t = to_terms(x);
  for (const auto& m : y.terms) t[m.exponents] += sign * m.coefficient;
  return from_terms(t);
}

PolynomialForm multiply(const PolynomialForm& x, const PolynomialForm& y) {
  TermMap t;
  for (const auto& a : x.terms) {
    for (const auto& b : y.terms) t[multiply_exponents(a.exponents, b.exponents)] += a.coefficient * b.coefficient;
  }
  return from_terms(t);
}

PolynomialForm constant(double c) {
  PolynomialForm p;
  if (c != 0.0) p.terms.push_back({c, {}});
  return p;
}

}  // namespace

bool PolynomialForm::is_division_free() const {
  for (const auto& m : terms) {
    for (const auto& [v, e] : m.exponents) {
      if (e < 0) return false;
    }
  }
  return true;
}

PolynomialForm to_polynomial(const Expression& e) {
  switch (e.kind()) {
    case NodeKind::constant:
      return constant(e.constant_value());
    case NodeKind::transition: {
      const auto& v = e.transition_var();
      PolynomialForm p;
      p.terms.push_back({1.0, {{{v.source, v.target}, 1}}});
      return p;
    }
    case NodeKind::atom:
    case NodeKind::seq_prob:
      throw NormalFormError("polynomial form needs a PSE; found " + to_string(e));
    case NodeKind::add:
      return add(to_polynomial(e.lhs()), to_polynomial(e.rhs()), 1.0);
    case NodeKind::sub:
      return add(to_polynomial(e.lhs()), to_polynomial(e.rhs()), -1.0);
    case NodeKind::mul:
      return multiply(to_polynomial(e.lhs()), to_polynomial(e.rhs()));
    case NodeKind::div: {
      PolynomialForm den = to_polynomial(e.rhs());
      if (den.terms.size() != 1) {
        throw NormalFormError("unsupported nested division: denominator " + to_string(e.rhs()) +
                              " is not a single monomial");
      }
      Monomial inv{1.0 / den.terms[0].coefficient, {}};
      for (const auto& [v, x] : den.terms[0].exponents) inv.exponents[v] = -x;
      PolynomialForm ip;
      ip.terms.push_back(std::move(inv));
      return multiply(to_polynomial(e.lhs()), ip);
    }
  }
  throw NormalFormError("unknown node");
}

Expression to_expression(const PolynomialForm& p) {
  if (p.terms.empty()) return Expression(0.0);
  std::optional<Expression> sum;
  for (const auto& m : p.terms) {
    std::optional<Expression> num;
    std::optional<Expression> den;
    auto mul_into = [](std::optional<Expression>& acc, const Expression& x) { acc = acc ? *acc * x : x; };
    for (const auto& [v, e] : m.exponents) {
      for (int k = 0; k < std::abs(e); ++k) mul_into(e > 0 ? num : den, Expression::transition(v.first, v.second));
    }
    Expression term = num ? *num : Expression(m.coefficient);
    if (num && m.coefficient != 1.0) term = Expression(m.coefficient) * term;
    if (den) term = term / *den;
    sum = sum ? *sum + term : term;
  }
  return *sum;
}

double evaluate(const PolynomialForm& p, const std::function<double(const PolyVar&)>& value) {
  double s = 0.0;
  for (const auto& m : p.terms) {
    double t = m.coefficient;
    for (const auto& [v, e] : m.exponents) t *= std::pow(value(v), e);
    s += t;
  }
  return s;
}

std::size_t symbol_size(const PolynomialForm& p) {
  if (p.terms.empty()) return 1;
  std::size_t size = p.terms.size() - 1;
  for (const auto& m : p.terms) {
    std::size_t leaves = 0;
    for (const auto& [v, e] : m.exponents) leaves += static_cast<std::size_t>(std::abs(e));
    if (m.coefficient != 1.0 || leaves == 0) ++leaves;
    size += 2 * leaves - 1;
  }
  return size;
}

std::string to_string(const PolynomialForm& p) {
  if (p.terms.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < p.terms.size(); ++i) {
    const auto& m = p.terms[i];
    if (i) out += " + ";
    out += fmt::format("{}", m.coefficient);
    for (const auto& [v, e] : m.exponents) out += fmt::format("*T[{}->{}]^{}", v.first, v.second, e);
  }
  return out;
}

DivisionDecomposition decompose_division(const PolynomialForm& p) {
  DivisionDecomposition d;
  ExponentMap lcd;
  PolynomialForm rest;
  for (const auto& m : p.terms) {
    bool has_den = false;
    for (const auto& [v, e] : m.exponents) {
      if (e < 0) {
        has_den = true;
        int& slot = lcd[v];
        slot = std::max(slot, -e);
      }
    }
    (has_den ? rest : d.a).terms.push_back(m);
  }
  PolynomialForm c;
  c.terms.push_back({1.0, lcd});
  d.c = c;
  d.b = multiply(rest, c);
  if (!d.b.is_division_free()) throw NormalFormError("denominator is not a monomial of transition variables");
  return d;
}

}  // namespace fairmon
