#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>

#include "tracecontract/lexer.hpp"

namespace tracecontract {

enum class Op { atom, negation, conjunction, disjunction, implication, until, near, future, always };

inline bool is_binary(Op op) {
  return op == Op::conjunction || op == Op::disjunction || op == Op::implication || op == Op::until;
}
inline bool is_unary(Op op) {
  return op == Op::negation || op == Op::near || op == Op::future || op == Op::always;
}
inline bool is_bounded(Op op) {
  return op == Op::until || op == Op::near || op == Op::future || op == Op::always;
}

/// Immutable formula tree. Nodes are shared, so copies are cheap and
/// structurally equal subtrees may alias. Equality ignores source spans.
class Formula {
 public:
  struct Node {
    Op op = Op::atom;
    std::string name;  // atoms only
    double radius = 0.0;  // bounded operators only, seconds
    std::shared_ptr<const Node> left;
    std::shared_ptr<const Node> right;
    SourceSpan span;
  };

  Formula() = default;

  static Formula atom(std::string name, SourceSpan span = {}) {
    auto node = std::make_shared<Node>();
    node->op = Op::atom;
    node->name = std::move(name);
    node->span = span;
    return Formula(std::move(node));
  }

  static Formula unary(Op op, const Formula& child, double radius = 0.0, SourceSpan span = {}) {
    if (!is_unary(op)) throw std::invalid_argument("not a unary operator");
    auto node = std::make_shared<Node>();
    node->op = op;
    node->radius = radius;
    node->left = child.node_;
    node->span = span;
    return Formula(std::move(node));
  }

  static Formula binary(Op op, const Formula& lhs, const Formula& rhs, double radius = 0.0,
                        SourceSpan span = {}) {
    if (!is_binary(op)) throw std::invalid_argument("not a binary operator");
    auto node = std::make_shared<Node>();
    node->op = op;
    node->radius = radius;
    node->left = lhs.node_;
    node->right = rhs.node_;
    node->span = span;
    return Formula(std::move(node));
  }

  bool empty() const { return node_ == nullptr; }
  Op op() const { return node_->op; }
  const std::string& name() const { return node_->name; }
  double radius() const { return node_->radius; }
  const SourceSpan& span() const { return node_->span; }
  Formula child() const { return Formula(node_->left); }
  Formula left() const { return Formula(node_->left); }
  Formula right() const { return Formula(node_->right); }
  const Node* node() const { return node_.get(); }

  friend bool operator==(const Formula& a, const Formula& b) { return same_tree(a.node_.get(), b.node_.get()); }

 private:
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  static bool same_tree(const Node* a, const Node* b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->op != b->op || a->name != b->name || a->radius != b->radius) return false;
    return same_tree(a->left.get(), b->left.get()) && same_tree(a->right.get(), b->right.get());
  }

  std::shared_ptr<const Node> node_;
};

// Shorthand constructors used heavily by tests and the default contract.
inline Formula atom(std::string name) { return Formula::atom(std::move(name)); }
inline Formula negate(const Formula& f) { return Formula::unary(Op::negation, f); }
inline Formula near(const Formula& f, double r) { return Formula::unary(Op::near, f, r); }
inline Formula future(const Formula& f, double r) { return Formula::unary(Op::future, f, r); }
inline Formula always(const Formula& f, double r) { return Formula::unary(Op::always, f, r); }
inline Formula conj(const Formula& a, const Formula& b) { return Formula::binary(Op::conjunction, a, b); }
inline Formula disj(const Formula& a, const Formula& b) { return Formula::binary(Op::disjunction, a, b); }
inline Formula implies(const Formula& a, const Formula& b) { return Formula::binary(Op::implication, a, b); }
inline Formula until(const Formula& a, const Formula& b, double r) {
  return Formula::binary(Op::until, a, b, r);
}

inline std::size_t node_count(const Formula& f) {
  if (f.op() == Op::atom) return 1;
  if (is_unary(f.op())) return 1 + node_count(f.child());
  return 1 + node_count(f.left()) + node_count(f.right());
}

/// Nesting depth of bounded temporal operators.
inline std::size_t temporal_depth(const Formula& f) {
  if (f.op() == Op::atom) return 0;
  const std::size_t self = is_bounded(f.op()) ? 1 : 0;
  if (is_unary(f.op())) return self + temporal_depth(f.child());
  return self + std::max(temporal_depth(f.left()), temporal_depth(f.right()));
}

/// Height of the tree; an atom has height 0.
inline std::size_t tree_height(const Formula& f) {
  if (f.op() == Op::atom) return 0;
  if (is_unary(f.op())) return 1 + tree_height(f.child());
  return 1 + std::max(tree_height(f.left()), tree_height(f.right()));
}

inline double radius_sum(const Formula& f) {
  if (f.op() == Op::atom) return 0.0;
  const double self = is_bounded(f.op()) ? f.radius() : 0.0;
  if (is_unary(f.op())) return self + radius_sum(f.child());
  return self + radius_sum(f.left()) + radius_sum(f.right());
}

inline void collect_atoms(const Formula& f, std::set<std::string>& out) {
  if (f.op() == Op::atom) {
    out.insert(f.name());
  } else if (is_unary(f.op())) {
    collect_atoms(f.child(), out);
  } else {
    collect_atoms(f.left(), out);
    collect_atoms(f.right(), out);
  }
}

inline std::set<std::string> atoms_of(const Formula& f) {
  std::set<std::string> out;
  collect_atoms(f, out);
  return out;
}

}  // namespace tracecontract
