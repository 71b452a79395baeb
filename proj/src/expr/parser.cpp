#include "nlv/expr/parser.hpp"

#include <cctype>
#include <functional>
#include <map>
#include <optional>

namespace nlv::expr {

ParseError::ParseError(const std::string& message, std::size_t position)
    : std::runtime_error("parse error at position " + std::to_string(position) + ": " + message),
      position_(position) {}

namespace {

enum class Tok { number, ident, plus, minus, star, slash, caret, lparen, rparen, comma, semicolon, turnstile,
                 less, less_eq, greater, greater_eq, end };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> tokenize(std::string_view s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    const std::size_t start = i;
    if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && i + 1 < s.size() && std::isdigit(static_cast<unsigned char>(s[i + 1])))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i < s.size() && s[i] == '.') {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      }
      if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
        std::size_t j = i + 1;
        if (j < s.size() && (s[j] == '+' || s[j] == '-')) ++j;
        if (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) {
          i = j;
          while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        }
      }
      out.push_back({Tok::number, std::string(s.substr(start, i - start)), start});
      continue;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_')) ++i;
      out.push_back({Tok::ident, std::string(s.substr(start, i - start)), start});
      continue;
    }
    auto two = [&](char a, char b) { return c == a && i + 1 < s.size() && s[i + 1] == b; };
    if (two('|', '-')) { out.push_back({Tok::turnstile, "|-", start}); i += 2; continue; }
    if (two('<', '=')) { out.push_back({Tok::less_eq, "<=", start}); i += 2; continue; }
    if (two('>', '=')) { out.push_back({Tok::greater_eq, ">=", start}); i += 2; continue; }
    if (two('*', '*')) { out.push_back({Tok::caret, "**", start}); i += 2; continue; }
    Tok k;
    switch (c) {
      case '+': k = Tok::plus; break;
      case '-': k = Tok::minus; break;
      case '*': k = Tok::star; break;
      case '/': k = Tok::slash; break;
      case '^': k = Tok::caret; break;
      case '(': k = Tok::lparen; break;
      case ')': k = Tok::rparen; break;
      case ',': k = Tok::comma; break;
      case ';': k = Tok::semicolon; break;
      case '<': k = Tok::less; break;
      case '>': k = Tok::greater; break;
      default: throw ParseError(std::string("unexpected character '") + c + "'", start);
    }
    out.push_back({k, std::string(1, c), start});
    ++i;
  }
  out.push_back({Tok::end, "", s.size()});
  return out;
}

mpq_class decimal_literal(const std::string& text, std::size_t pos) {
  std::string mant = text;
  long exp10 = 0;
  if (auto e = mant.find_first_of("eE"); e != std::string::npos) {
    exp10 = std::stol(mant.substr(e + 1));
    mant = mant.substr(0, e);
  }
  if (auto dot = mant.find('.'); dot != std::string::npos) {
    exp10 -= static_cast<long>(mant.size() - dot - 1);
    mant.erase(dot, 1);
  }
  if (mant.empty()) throw ParseError("malformed number", pos);
  mpz_class num(mant, 10);
  mpz_class scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exp10 < 0 ? -exp10 : exp10));
  mpq_class q = exp10 < 0 ? mpq_class(num, scale) : mpq_class(num * scale);
  q.canonicalize();
  return q;
}

bool is_reserved(const std::string& name) {
  static const char* const words[] = {"pi", "sqrt", "atan", "acos", "atn", "acs", "pow"};
  for (const char* w : words)
    if (name == w) return true;
  return false;
}

class Parser {
 public:
  using Resolver = std::function<Expr(const Token&)>;

  Parser(const std::vector<Token>& toks, std::size_t begin, std::size_t end, Resolver resolve)
      : toks_(toks), i_(begin), end_(end), resolve_(std::move(resolve)) {}

  Expr parse_all() {
    Expr e = expression();
    if (i_ != end_) throw ParseError("unexpected '" + toks_[i_].text + "'", toks_[i_].pos);
    return e;
  }

 private:
  const Token& peek() const { return i_ < end_ ? toks_[i_] : end_token(); }
  const Token& end_token() const { return toks_[end_]; }
  bool accept(Tok k) {
    if (peek().kind != k || i_ >= end_) return false;
    ++i_;
    return true;
  }
  void expect(Tok k, const char* what) {
    if (!accept(k)) throw ParseError(std::string("expected ") + what, peek().pos);
  }

  Expr expression() {
    Expr e = term();
    for (;;) {
      if (accept(Tok::plus)) e = e + term();
      else if (accept(Tok::minus)) e = e - term();
      else return e;
    }
  }

  Expr term() {
    Expr e = unary();
    for (;;) {
      if (accept(Tok::star)) e = e * unary();
      else if (accept(Tok::slash)) e = e / unary();
      else return e;
    }
  }

  Expr unary() {
    if (accept(Tok::minus)) return -unary();
    if (accept(Tok::plus)) return unary();
    return power();
  }

  unsigned exponent_literal() {
    const Token& t = peek();
    if (t.kind != Tok::number || t.text.find_first_not_of("0123456789") != std::string::npos)
      throw ParseError("exponent must be a non-negative integer literal", t.pos);
    ++i_;
    return static_cast<unsigned>(std::stoul(t.text));
  }

  Expr power() {
    Expr e = primary();
    while (accept(Tok::caret)) e = pow(e, exponent_literal());
    return e;
  }

  Expr call_argument() {
    expect(Tok::lparen, "'('");
    Expr e = expression();
    expect(Tok::rparen, "')'");
    return e;
  }

  Expr primary() {
    const Token t = peek();
    if (t.kind == Tok::number) {
      ++i_;
      return constant(decimal_literal(t.text, t.pos));
    }
    if (t.kind == Tok::lparen) {
      ++i_;
      Expr e = expression();
      expect(Tok::rparen, "')'");
      return e;
    }
    if (t.kind == Tok::ident) {
      ++i_;
      if (t.text == "pi") return pi();
      if (t.text == "sqrt") return sqrt(call_argument());
      if (t.text == "atan" || t.text == "atn") return atan(call_argument());
      if (t.text == "acos" || t.text == "acs") return acos(call_argument());
      if (t.text == "pow") {
        expect(Tok::lparen, "'('");
        Expr base = expression();
        expect(Tok::comma, "','");
        const unsigned k = exponent_literal();
        expect(Tok::rparen, "')'");
        return pow(base, k);
      }
      return resolve_(t);
    }
    if (t.kind == Tok::end || i_ >= end_) throw ParseError("unexpected end of input", t.pos);
    throw ParseError("unexpected '" + t.text + "'", t.pos);
  }

  const std::vector<Token>& toks_;
  std::size_t i_;
  std::size_t end_;
  Resolver resolve_;
};

Expr constant_only(const Token& t) {
  throw ParseError("bound expression must be constant, found '" + t.text + "'", t.pos);
}

bool is_constant_tree(const Expr& e) { return e.num_vars() == 0; }

struct BoundSlot {
  std::optional<Expr> lower;
  std::optional<Expr> upper;
  std::size_t pos = 0;
};

}  // namespace

Problem parse_problem(std::string_view text) {
  const std::vector<Token> toks = tokenize(text);
  std::size_t turnstile = toks.size() - 1;
  for (std::size_t i = 0; i < toks.size(); ++i)
    if (toks[i].kind == Tok::turnstile) {
      turnstile = i;
      break;
    }

  std::vector<std::string> names;
  std::map<std::string, BoundSlot> slots;

  // Bounds: segments separated by ';', each a chain of '<='.
  std::size_t seg_begin = 0;
  while (seg_begin < turnstile) {
    std::size_t seg_end = seg_begin;
    while (seg_end < turnstile && toks[seg_end].kind != Tok::semicolon) ++seg_end;
    std::vector<std::pair<std::size_t, std::size_t>> parts;
    std::size_t part_begin = seg_begin;
    int depth = 0;
    for (std::size_t i = seg_begin; i < seg_end; ++i) {
      const Tok k = toks[i].kind;
      if (k == Tok::lparen) ++depth;
      if (k == Tok::rparen) --depth;
      if (depth == 0 && (k == Tok::less || k == Tok::greater || k == Tok::greater_eq))
        throw ParseError("bounds must use '<='", toks[i].pos);
      if (depth == 0 && k == Tok::less_eq) {
        parts.emplace_back(part_begin, i);
        part_begin = i + 1;
      }
    }
    parts.emplace_back(part_begin, seg_end);
    if (parts.size() < 2 || parts.size() > 3) throw ParseError("malformed bound", toks[seg_begin].pos);
    for (auto [b, e] : parts)
      if (b == e) throw ParseError("empty bound term", toks[b].pos);

    auto as_variable = [&](std::pair<std::size_t, std::size_t> part) -> std::optional<std::string> {
      if (part.second - part.first == 1 && toks[part.first].kind == Tok::ident && !is_reserved(toks[part.first].text))
        return toks[part.first].text;
      return std::nullopt;
    };
    auto constant_part = [&](std::pair<std::size_t, std::size_t> part) {
      return Parser(toks, part.first, part.second, constant_only).parse_all();
    };
    auto slot_for = [&](const std::string& name, std::size_t pos) -> BoundSlot& {
      auto [it, fresh] = slots.try_emplace(name);
      if (fresh) {
        names.push_back(name);
        it->second.pos = pos;
      }
      return it->second;
    };
    auto set = [&](std::optional<Expr>& where, Expr value, std::size_t pos) {
      if (where) throw ParseError("duplicate bound", pos);
      where = std::move(value);
    };

    if (parts.size() == 3) {
      auto var = as_variable(parts[1]);
      if (!var) throw ParseError("expected a variable between bounds", toks[parts[1].first].pos);
      BoundSlot& slot = slot_for(*var, toks[parts[1].first].pos);
      set(slot.lower, constant_part(parts[0]), toks[parts[0].first].pos);
      set(slot.upper, constant_part(parts[2]), toks[parts[2].first].pos);
    } else if (auto var = as_variable(parts[0])) {
      BoundSlot& slot = slot_for(*var, toks[parts[0].first].pos);
      set(slot.upper, constant_part(parts[1]), toks[parts[1].first].pos);
    } else if (auto var2 = as_variable(parts[1])) {
      BoundSlot& slot = slot_for(*var2, toks[parts[1].first].pos);
      set(slot.lower, constant_part(parts[0]), toks[parts[0].first].pos);
    } else {
      throw ParseError("bound does not name a variable", toks[seg_begin].pos);
    }
    seg_begin = seg_end + 1;
  }

  Problem p;
  p.names = names;
  for (const std::string& name : names) {
    const BoundSlot& slot = slots.at(name);
    if (!slot.lower) throw ParseError("missing lower bound for '" + name + "'", slot.pos);
    if (!slot.upper) throw ParseError("missing upper bound for '" + name + "'", slot.pos);
    p.lower.push_back(*slot.lower);
    p.upper.push_back(*slot.upper);
  }
  if (toks[turnstile].kind != Tok::turnstile) throw ParseError("expected '|-'", toks.back().pos);

  // Comparison.
  const std::size_t goal_begin = turnstile + 1;
  const std::size_t goal_end = toks.size() - 1;
  std::size_t cmp = goal_end;
  int depth = 0;
  for (std::size_t i = goal_begin; i < goal_end; ++i) {
    const Tok k = toks[i].kind;
    if (k == Tok::lparen) ++depth;
    if (k == Tok::rparen) --depth;
    if (depth != 0) continue;
    if (k == Tok::less_eq || k == Tok::greater_eq)
      throw ParseError("comparison must be strict ('<' or '>')", toks[i].pos);
    if (k == Tok::less || k == Tok::greater) {
      if (cmp != goal_end) throw ParseError("more than one comparison", toks[i].pos);
      cmp = i;
    }
  }
  if (cmp == goal_end) throw ParseError("expected '<' or '>'", toks[goal_end].pos);

  auto resolve = [&](const Token& t) -> Expr {
    for (std::size_t i = 0; i < p.names.size(); ++i)
      if (p.names[i] == t.text) return variable(static_cast<int>(i));
    throw ParseError("missing bounds for variable '" + t.text + "'", t.pos);
  };
  const Expr lhs = Parser(toks, goal_begin, cmp, resolve).parse_all();
  const Expr rhs = Parser(toks, cmp + 1, goal_end, resolve).parse_all();
  p.goal = toks[cmp].kind == Tok::less ? lhs - rhs : rhs - lhs;
  for (std::size_t i = 0; i < p.lower.size(); ++i)
    if (!is_constant_tree(p.lower[i]) || !is_constant_tree(p.upper[i]))
      throw ParseError("bound expression must be constant", 0);
  return p;
}

Expr parse_expression(std::string_view text, const std::vector<std::string>& names) {
  const std::vector<Token> toks = tokenize(text);
  auto resolve = [&](const Token& t) -> Expr {
    for (std::size_t i = 0; i < names.size(); ++i)
      if (names[i] == t.text) return variable(static_cast<int>(i));
    throw ParseError("unknown variable '" + t.text + "'", t.pos);
  };
  return Parser(toks, 0, toks.size() - 1, resolve).parse_all();
}

}  // namespace nlv::expr
