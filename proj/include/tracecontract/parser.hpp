#pragma once

#include <charconv>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "tracecontract/formula.hpp"
#include "tracecontract/lexer.hpp"

namespace tracecontract {

class ParseError : public std::runtime_error {
 public:
  ParseError(SourceSpan span, std::string expected, std::string found)
      : std::runtime_error("expected " + expected + ", found " + (found.empty() ? "end of input" : "'" + found + "'")),
        span_(span),
        expected_(std::move(expected)),
        found_(std::move(found)) {}

  const SourceSpan& span() const { return span_; }
  const std::string& expected() const { return expected_; }
  const std::string& found() const { return found_; }

 private:
  SourceSpan span_;
  std::string expected_;
  std::string found_;
};

/// Shortest fixed-notation decimal that reads back to the same double.
inline std::string format_decimal(double value) {
  char buf[512];
  auto res = std::to_chars(buf, buf + sizeof buf, value, std::chars_format::fixed);
  return std::string(buf, res.ptr);
}

namespace detail {

// Recursive descent over the fixed precedence ladder:
//   implication (right) < disjunction < conjunction < until (right) < unary < primary
class FormulaParser {
 public:
  explicit FormulaParser(std::span<const Token> tokens) : tokens_(tokens) {
    if (tokens_.empty() || tokens_.back().kind != TokenKind::end_marker)
      throw std::invalid_argument("token stream must end with an end marker");
  }

  Formula parse_all() {
    Formula f = parse_implication();
    if (peek().kind != TokenKind::end_marker) fail("end of formula");
    return f;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& advance() { return tokens_[pos_ < tokens_.size() - 1 ? pos_++ : pos_]; }

  bool at_operator(std::string_view op) const { return peek().kind == TokenKind::op && peek().value == op; }
  bool at_temporal(std::string_view name) const { return peek().kind == TokenKind::temporal && peek().name == name; }

  [[noreturn]] void fail(const std::string& expected) const {
    const Token& t = peek();
    SourceSpan span = t.span;
    if (t.kind == TokenKind::end_marker) span = {t.span.start, t.span.start + 1};
    throw ParseError(span, expected, t.value);
  }

  double take_radius(const Token& t) const {
    if (!t.radius) throw ParseError(t.span, "bracketed radius after '" + t.name + "'", t.value);
    if (!(*t.radius > 0.0) || !std::isfinite(*t.radius))
      throw ParseError(t.span, "strictly positive radius", t.value);
    return *t.radius;
  }

  Formula parse_implication() {
    Formula lhs = parse_disjunction();
    if (at_operator("->")) {
      advance();
      Formula rhs = parse_implication();
      return Formula::binary(Op::implication, lhs, rhs, 0.0, cover(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_disjunction() {
    Formula lhs = parse_conjunction();
    while (at_operator("|")) {
      advance();
      Formula rhs = parse_conjunction();
      lhs = Formula::binary(Op::disjunction, lhs, rhs, 0.0, cover(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_conjunction() {
    Formula lhs = parse_until();
    while (at_operator("&")) {
      advance();
      Formula rhs = parse_until();
      lhs = Formula::binary(Op::conjunction, lhs, rhs, 0.0, cover(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_until() {
    Formula lhs = parse_unary();
    if (at_temporal("U")) {
      const double r = take_radius(advance());
      Formula rhs = parse_until();
      return Formula::binary(Op::until, lhs, rhs, r, cover(lhs.span(), rhs.span()));
    }
    return lhs;
  }

  Formula parse_unary() {
    const Token& t = peek();
    if (at_operator("!")) {
      advance();
      Formula child = parse_unary();
      return Formula::unary(Op::negation, child, 0.0, cover(t.span, child.span()));
    }
    if (t.kind == TokenKind::temporal && t.name != "U") {
      advance();
      const double r = take_radius(t);
      Formula child = parse_unary();
      const Op op = t.name == "N" ? Op::near : t.name == "F" ? Op::future : Op::always;
      return Formula::unary(op, child, r, cover(t.span, child.span()));
    }
    return parse_primary();
  }

  Formula parse_primary() {
    const Token& t = peek();
    if (t.kind == TokenKind::identifier) {
      advance();
      return Formula::atom(t.value, t.span);
    }
    if (t.kind == TokenKind::left_paren) {
      advance();
      Formula inner = parse_implication();
      if (peek().kind != TokenKind::right_paren) fail("')' closing '(' at offset " + std::to_string(t.span.start));
      advance();
      return inner;
    }
    fail("atom, '(', '!' or temporal operator");
  }

  std::span<const Token> tokens_;
  std::size_t pos_ = 0;
};

// Binding strength used by the printer; larger binds tighter.
inline int precedence(Op op) {
  switch (op) {
    case Op::implication: return 1;
    case Op::disjunction: return 2;
    case Op::conjunction: return 3;
    case Op::until: return 4;
    case Op::negation:
    case Op::near:
    case Op::future:
    case Op::always: return 5;
    case Op::atom: return 6;
  }
  return 0;
}

inline void format_into(const Formula& f, std::string& out);

inline void format_operand(const Formula& f, bool parenthesize, std::string& out) {
  if (parenthesize) out += '(';
  format_into(f, out);
  if (parenthesize) out += ')';
}

inline void format_into(const Formula& f, std::string& out) {
  const Op op = f.op();
  const int prec = precedence(op);
  switch (op) {
    case Op::atom:
      out += f.name();
      return;
    case Op::negation:
      out += '!';
      format_operand(f.child(), precedence(f.child().op()) < prec, out);
      return;
    case Op::near:
    case Op::future:
    case Op::always:
      out += op == Op::near ? "N[" : op == Op::future ? "F[" : "G[";
      out += format_decimal(f.radius());
      out += "] ";
      format_operand(f.child(), precedence(f.child().op()) < prec, out);
      return;
    default:
      break;
  }
  // Left-associative levels need parens on an equal-precedence right operand;
  // right-associative levels on an equal-precedence left operand.
  const bool right_assoc = op == Op::implication || op == Op::until;
  const int lp = precedence(f.left().op());
  const int rp = precedence(f.right().op());
  format_operand(f.left(), right_assoc ? lp <= prec : lp < prec, out);
  switch (op) {
    case Op::implication: out += " -> "; break;
    case Op::disjunction: out += " | "; break;
    case Op::conjunction: out += " & "; break;
    case Op::until:
      out += " U[";
      out += format_decimal(f.radius());
      out += "] ";
      break;
    default: break;
  }
  format_operand(f.right(), right_assoc ? rp < prec : rp <= prec, out);
}

}  // namespace detail

/// Builds the unique syntax tree for a token stream ending in an end marker.
inline Formula parse(std::span<const Token> tokens) { return detail::FormulaParser(tokens).parse_all(); }

inline Formula parse_formula(std::string_view source) {
  const auto tokens = tokenize(source);
  return parse(tokens);
}

/// Canonical text with the minimum parentheses needed to reparse to the
/// same tree.
inline std::string format(const Formula& f) {
  std::string out;
  detail::format_into(f, out);
  return out;
}

}  // namespace tracecontract
