#include "fairmon/parser.hpp"

#include <fmt/format.h>

#include <cctype>
#include <charconv>
#include <optional>
#include <string>

#include "fairmon/error.hpp"

namespace fairmon {

const AtomDef* Specification::find_atom(std::string_view name) const {
  for (const auto& a : atoms) {
    if (a->name == name) return a.get();
  }
  return nullptr;
}

namespace {

bool is_symbol_char(char c) {
  if (std::isalnum(static_cast<unsigned char>(c))) return true;
  switch (c) {
    case '_': case '.': case '\'': case '~': case '!': case '@': case '$': case '%': case '&': case '?':
      return true;
    default:
      return false;
  }
}

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  bool eof() {
    skip_space();
    return pos_ >= text_.size();
  }

  /// Skips blanks and comments; stops at newlines when `stop_at_newline`.
  void skip_space(bool stop_at_newline = false) {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (c == '\n' && stop_at_newline) {
        return;
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  char peek() {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool at_line_end() {
    skip_space(true);
    return pos_ >= text_.size() || text_[pos_] == '\n';
  }

  bool accept(std::string_view s) {
    skip_space();
    if (text_.substr(pos_, s.size()) == s) {
      for (std::size_t i = 0; i < s.size(); ++i) advance();
      return true;
    }
    return false;
  }

  void expect(std::string_view s) {
    if (!accept(s)) fail(fmt::format("expected '{}'", s));
  }

  /// Accepts `kw` only as a whole word.
  bool accept_keyword(std::string_view kw) {
    skip_space();
    if (text_.substr(pos_, kw.size()) != kw) return false;
    std::size_t end = pos_ + kw.size();
    if (end < text_.size() && is_symbol_char(text_[end])) return false;
    for (std::size_t i = 0; i < kw.size(); ++i) advance();
    return true;
  }

  std::optional<std::string> try_symbol() {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_symbol_char(text_[pos_])) advance();
    if (pos_ == start) return std::nullopt;
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string symbol(std::string_view what) {
    auto s = try_symbol();
    if (!s) fail(fmt::format("expected {}", what));
    return *s;
  }

  std::optional<double> try_number() {
    skip_space();
    std::size_t start = pos_;
    std::size_t p = pos_;
    auto digits = [&] {
      std::size_t s = p;
      while (p < text_.size() && std::isdigit(static_cast<unsigned char>(text_[p]))) ++p;
      return p > s;
    };
    if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
    bool int_part = digits();
    bool frac_part = false;
    if (p < text_.size() && text_[p] == '.') {
      ++p;
      frac_part = digits();
    }
    if (!int_part && !frac_part) return std::nullopt;
    if (p < text_.size() && (text_[p] == 'e' || text_[p] == 'E')) {
      std::size_t save = p;
      ++p;
      if (p < text_.size() && (text_[p] == '+' || text_[p] == '-')) ++p;
      if (!digits()) p = save;
    }
    double v = 0.0;
    const char* first = text_.data() + start;
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, text_.data() + p, v);
    if (ec != std::errc() || ptr != text_.data() + p) fail("malformed number");
    while (pos_ < p) advance();
    return v;
  }

  double number(std::string_view what) {
    auto v = try_number();
    if (!v) fail(fmt::format("expected {}", what));
    return *v;
  }

  int integer(std::string_view what) {
    skip_space();
    std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    int v = 0;
    auto [ptr, ec] = std::from_chars(text_.data() + start, text_.data() + pos_, v);
    if (pos_ == start || ec != std::errc() || ptr != text_.data() + pos_) {
      pos_ = start;
      fail(fmt::format("expected {}", what));
    }
    col_ += pos_ - start;
    return v;
  }

  [[noreturn]] void fail(const std::string& msg) const { throw ParseError(msg, line_, col_); }

  std::size_t line() const { return line_; }
  std::size_t column() const { return col_; }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class ExpressionParser {
 public:
  ExpressionParser(Scanner& s, const Alphabet& alphabet, std::span<const std::shared_ptr<const AtomDef>> atoms,
                   SpecMode mode)
      : s_(s), alphabet_(alphabet), atoms_(atoms), mode_(mode) {}

  Expression expression() {
    Expression e = term();
    for (;;) {
      if (s_.accept("+")) {
        e = e + term();
      } else if (peek_minus()) {
        s_.expect("-");
        e = e - term();
      } else {
        return e;
      }
    }
  }

 private:
  // '-' followed by '>' belongs to a transition arrow, never to subtraction.
  bool peek_minus() { return s_.peek() == '-'; }

  Expression term() {
    Expression e = unary();
    for (;;) {
      if (s_.accept("*")) {
        e = e * unary();
      } else if (s_.accept("/")) {
        e = e / unary();
      } else {
        return e;
      }
    }
  }

  Expression unary() {
    if (s_.accept("-")) {
      char c = s_.peek();
      if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
        return Expression(-s_.number("number"));
      }
      return Expression(-1.0) * unary();
    }
    return primary();
  }

  Expression primary() {
    if (s_.accept("(")) {
      Expression e = expression();
      s_.expect(")");
      return e;
    }
    if (auto v = s_.try_number()) return Expression(*v);
    std::size_t line = s_.line();
    std::size_t col = s_.column();
    auto head = s_.try_symbol();
    if (!head) s_.fail("expected an expression");
    if (*head == "F") return atom_ref();
    if (*head == "P") return seq_prob();
    if (*head == "T") {
      if (mode_ == SpecMode::pomc) throw ParseError("transition variables T[...] need a fully observed model", line, col);
      return transition();
    }
    throw ParseError(fmt::format("unexpected '{}'", *head), line, col);
  }

  Expression atom_ref() {
    s_.expect("[");
    std::size_t line = s_.line();
    std::size_t col = s_.column();
    std::string name = s_.symbol("atom name");
    s_.expect("]");
    for (const auto& a : atoms_) {
      if (a->name == name) return Expression::atom(a);
    }
    throw ParseError(fmt::format("unknown atom '{}'", name), line, col);
  }

  Symbol checked_symbol() {
    std::size_t line = s_.line();
    std::size_t col = s_.column();
    std::string sym = s_.symbol("observation symbol");
    if (sym == kWildcard) throw ParseError("wildcard '_' is only allowed in atom patterns", line, col);
    if (alphabet_.size() > 0 && !alphabet_.contains(sym)) {
      throw ParseError(fmt::format("symbol '{}' is not in the alphabet", sym), line, col);
    }
    return sym;
  }

  std::vector<Word> word_list() {
    std::vector<Word> words;
    do {
      Word w;
      w.push_back(checked_symbol());
      for (;;) {
        char c = s_.peek();
        if (c == ',' || c == '|' || c == ']' || c == '\0') break;
        w.push_back(checked_symbol());
      }
      words.push_back(std::move(w));
    } while (s_.accept(","));
    return words;
  }

  Expression seq_prob() {
    s_.expect("[");
    std::vector<Word> first = word_list();
    if (s_.accept("|")) {
      std::vector<Word> given = word_list();
      s_.expect("]");
      std::vector<Word> joint;
      for (const auto& u : given) {
        for (const auto& v : first) {
          Word w = u;
          w.insert(w.end(), v.begin(), v.end());
          joint.push_back(std::move(w));
        }
      }
      return Expression::seq_prob(std::move(joint)) / Expression::seq_prob(std::move(given));
    }
    s_.expect("]");
    return Expression::seq_prob(std::move(first));
  }

  Expression transition() {
    s_.expect("[");
    Symbol q = checked_symbol();
    s_.expect("->");
    Symbol r = checked_symbol();
    s_.expect("]");
    int label = 0;
    if (s_.accept("^")) label = s_.integer("label index");
    return Expression::transition(std::move(q), std::move(r), label);
  }

  Scanner& s_;
  const Alphabet& alphabet_;
  std::span<const std::shared_ptr<const AtomDef>> atoms_;
  SpecMode mode_;
};

std::shared_ptr<const AtomDef> parse_atom(Scanner& s, const Alphabet& alphabet) {
  auto def = std::make_shared<AtomDef>();
  def->name = s.symbol("atom name");
  if (!s.accept_keyword("arity")) s.fail("expected 'arity'");
  std::size_t arity_line = s.line();
  std::size_t arity_col = s.column();
  def->arity = s.integer("arity");
  if (def->arity < 1) throw ParseError("arity must be positive", arity_line, arity_col);
  if (!s.accept_keyword("range")) s.fail("expected 'range'");
  s.expect("[");
  def->lo = s.number("lower bound");
  s.expect(",");
  def->hi = s.number("upper bound");
  s.expect("]");
  if (!(def->lo <= def->hi)) s.fail("empty range");
  s.expect("{");
  bool have_default = false;
  auto check_value = [&](double v, std::size_t line, std::size_t col) {
    if (v < def->lo || v > def->hi) {
      throw ParseError(fmt::format("value {} outside range [{},{}]", v, def->lo, def->hi), line, col);
    }
  };
  while (!s.accept("}")) {
    if (s.peek() == '\0') s.fail("unterminated atom block");
    std::size_t line = s.line();
    std::size_t col = s.column();
    if (s.accept_keyword("default")) {
      s.expect("->");
      std::size_t vl = s.line(), vc = s.column();
      def->default_value = s.number("value");
      check_value(def->default_value, vl, vc);
      have_default = true;
    } else {
      AtomRule rule;
      while (s.peek() != '-') {
        std::size_t sl = s.line(), sc = s.column();
        std::string sym = s.symbol("pattern symbol");
        if (sym != kWildcard && alphabet.size() > 0 && !alphabet.contains(sym)) {
          throw ParseError(fmt::format("symbol '{}' is not in the alphabet", sym), sl, sc);
        }
        rule.pattern.push_back(std::move(sym));
      }
      if (static_cast<int>(rule.pattern.size()) != def->arity) {
        throw ParseError(fmt::format("pattern has {} symbols but atom '{}' has arity {}", rule.pattern.size(),
                                     def->name, def->arity),
                         line, col);
      }
      s.expect("->");
      std::size_t vl = s.line(), vc = s.column();
      rule.value = s.number("value");
      check_value(rule.value, vl, vc);
      def->rules.push_back(std::move(rule));
    }
    if (!s.accept(";") && s.peek() != '}') s.fail("expected ';' or '}'");
  }
  if (!have_default) s.fail(fmt::format("atom '{}' has no default rule", def->name));
  return def;
}

}  // namespace

Specification parse_specification(std::string_view text, SpecMode mode) {
  Scanner s(text);
  Specification spec;
  bool have_alphabet = false;
  bool have_property = false;
  while (!s.eof()) {
    std::size_t line = s.line();
    std::size_t col = s.column();
    if (s.accept_keyword("alphabet")) {
      if (have_alphabet) throw ParseError("duplicate alphabet section", line, col);
      s.expect(":");
      std::vector<Symbol> syms;
      while (!s.at_line_end()) {
        std::size_t sl = s.line(), sc = s.column();
        std::string sym = s.symbol("observation symbol");
        if (sym == kWildcard) throw ParseError("'_' is reserved for atom patterns", sl, sc);
        for (const auto& prev : syms) {
          if (prev == sym) throw ParseError(fmt::format("duplicate symbol '{}'", sym), sl, sc);
        }
        syms.push_back(std::move(sym));
      }
      if (syms.empty()) throw ParseError("empty alphabet", line, col);
      spec.alphabet = Alphabet(std::move(syms));
      have_alphabet = true;
    } else if (s.accept_keyword("atom")) {
      if (have_property) throw ParseError("atoms must be declared before the property", line, col);
      std::size_t nl = s.line(), nc = s.column();
      auto def = parse_atom(s, spec.alphabet);
      if (spec.find_atom(def->name)) throw ParseError(fmt::format("duplicate atom '{}'", def->name), nl, nc);
      spec.atoms.push_back(std::move(def));
    } else if (s.accept_keyword("property")) {
      if (have_property) throw ParseError("duplicate property section", line, col);
      s.expect(":");
      ExpressionParser p(s, spec.alphabet, spec.atoms, mode);
      spec.property = p.expression();
      have_property = true;
    } else {
      s.fail("expected 'alphabet:', 'atom' or 'property:'");
    }
  }
  if (!have_property) throw ParseError("missing 'property:' section", s.line(), s.column());
  return spec;
}

Expression parse_expression(std::string_view text, const Alphabet& alphabet,
                            std::span<const std::shared_ptr<const AtomDef>> atoms, SpecMode mode) {
  Scanner s(text);
  ExpressionParser p(s, alphabet, atoms, mode);
  Expression e = p.expression();
  if (!s.eof()) s.fail("unexpected trailing input");
  return e;
}

Expression parse_expression(std::string_view text, SpecMode mode) {
  static const Alphabet empty;
  return parse_expression(text, empty, {}, mode);
}

}  // namespace fairmon
