#include <gtest/gtest.h>

#include <random>
#include <unordered_set>

#include "enumerate.hpp"
#include "oracles.hpp"
#include "tracecontract/parser.hpp"

using namespace tracecontract;

namespace {

std::string canon(const std::string& s) { return format(parse_formula(s)); }

ParseError parse_error(const std::string& s) {
  try {
    parse_formula(s);
  } catch (const ParseError& e) {
    return e;
  }
  throw std::runtime_error("no parse error for " + s);
}

}  // namespace

TEST(Parser, ImplicationOfNear) {
  const auto f = parse_formula("a -> N[0.04] b");
  EXPECT_EQ(f, implies(atom("a"), near(atom("b"), 0.04)));
  EXPECT_EQ(format(f), "a -> N[0.04] b");
}

TEST(Parser, Precedence) {
  EXPECT_EQ(parse_formula("a | b & c"), disj(atom("a"), conj(atom("b"), atom("c"))));
  EXPECT_EQ(parse_formula("a & b | c"), disj(conj(atom("a"), atom("b")), atom("c")));
  EXPECT_EQ(parse_formula("a & b U[0.1] c"), conj(atom("a"), until(atom("b"), atom("c"), 0.1)));
  EXPECT_EQ(parse_formula("!a U[0.1] b"), until(negate(atom("a")), atom("b"), 0.1));
  EXPECT_EQ(parse_formula("a | b -> c"), implies(disj(atom("a"), atom("b")), atom("c")));
}

TEST(Parser, Associativity) {
  EXPECT_EQ(parse_formula("a -> b -> c"), implies(atom("a"), implies(atom("b"), atom("c"))));
  EXPECT_EQ(parse_formula("a & b & c"), conj(conj(atom("a"), atom("b")), atom("c")));
  EXPECT_EQ(parse_formula("a | b | c"), disj(disj(atom("a"), atom("b")), atom("c")));
  EXPECT_EQ(parse_formula("a U[1] b U[2] c"), until(atom("a"), until(atom("b"), atom("c"), 2), 1));
}

TEST(Parser, CanonicalParentheses) {
  EXPECT_EQ(canon("(a -> b) -> c"), "(a -> b) -> c");
  EXPECT_EQ(canon("a -> (b -> c)"), "a -> b -> c");
  EXPECT_EQ(canon("a & (b & c)"), "a & (b & c)");
  EXPECT_EQ(canon("((a))"), "a");
  EXPECT_EQ(canon("!(a & b)"), "!(a & b)");
  EXPECT_EQ(canon("N[0.04] !F[0.1] G[2] a"), "N[0.04] !F[0.1] G[2] a");
  EXPECT_EQ(canon("(a U[1] b) U[1] c"), "(a U[1] b) U[1] c");
}

TEST(Parser, Spans) {
  const std::string src = "a -> N[0.04] b";
  const auto f = parse_formula(src);
  EXPECT_EQ(f.span(), (SourceSpan{0, src.size()}));
  EXPECT_EQ(f.left().span(), (SourceSpan{0, 1}));
  EXPECT_EQ(f.right().span(), (SourceSpan{5, 14}));
  EXPECT_EQ(f.right().child().span(), (SourceSpan{13, 14}));
}

TEST(Parser, ErrorsCarrySpans) {
  EXPECT_EQ(parse_error("a ->").span(), (SourceSpan{4, 5}));
  EXPECT_EQ(parse_error("a b").span(), (SourceSpan{2, 3}));
  EXPECT_EQ(parse_error("(a & b").span(), (SourceSpan{6, 7}));
  EXPECT_EQ(parse_error("N a").span(), (SourceSpan{0, 1}));  // missing radius
  EXPECT_EQ(parse_error("a U b").span(), (SourceSpan{2, 3}));
  EXPECT_EQ(parse_error("N[0] a").span(), (SourceSpan{0, 4}));
  EXPECT_EQ(parse_error("U[1] a").span(), (SourceSpan{0, 4}));
  EXPECT_EQ(parse_error("").span(), (SourceSpan{0, 1}));
  EXPECT_EQ(parse_error("a )").span(), (SourceSpan{2, 3}));
  EXPECT_THROW(parse_formula("3"), ParseError);
}

TEST(Parser, LexErrorsPropagate) { EXPECT_THROW(parse_formula("a - > b"), LexError); }

TEST(Parser, UnknownAtomsParse) { EXPECT_NO_THROW(parse_formula("nonexistent_atom -> N[0.04] x")); }

TEST(Parser, FormatDecimal) {
  EXPECT_EQ(format_decimal(0.04), "0.04");
  EXPECT_EQ(format_decimal(2), "2");
  EXPECT_EQ(format_decimal(0.1 + 0.2), "0.30000000000000004");
  EXPECT_EQ(format_decimal(1e-7), "0.0000001");
}

TEST(Parser, RandomRoundTrip) {
  std::mt19937_64 rng(7);
  const std::vector<std::string> atoms{"a", "b", "ref_onset", "x9"};
  for (int k = 0; k < 2000; ++k) {
    const auto f = oracle::random_formula(rng, 5, atoms);
    const auto text = format(f);
    ASSERT_EQ(parse_formula(text), f) << text;
    ASSERT_EQ(format(parse_formula(text)), text);
  }
}

TEST(Parser, FormatIsInjectiveOnSmallFormulas) {
  oracle::Alphabet a;
  a.atoms = {"a", "b"};
  a.unary = {Op::negation, Op::near, Op::future, Op::always};
  a.binary = {Op::conjunction, Op::disjunction, Op::implication, Op::until};
  const auto all = oracle::enumerate_formulas(a, 2);
  // 26 trees of height <= 1; height 2 adds 4 * 24 unary and 4 * (26^2 - 2^2) binary.
  EXPECT_EQ(all.size(), 26u + 96u + 2688u);
  std::unordered_set<std::string> seen;
  for (const auto& f : all) {
    const auto s = format(f);
    EXPECT_TRUE(seen.insert(s).second) << "two trees print as " << s;
    EXPECT_EQ(parse_formula(s), f) << s;
  }
}
