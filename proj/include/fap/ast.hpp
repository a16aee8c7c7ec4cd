#pragma once

// Sorted abstract syntax of programs.
//
// A Formula is a conjunction list: an ordered sequence of head formulas,
// read right-associatively and terminated by the empty conjunction.  Every
// subformula that has a conjunctive reading (disjuncts, negands, quantifier
// bodies, ...) is itself a Formula.  All nodes are immutable and shared.

#include <cstddef>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "fap/integer.hpp"

namespace fap {

enum class Scalar { Int, Bool };

std::string_view to_string(Scalar sort);

// INT | BOOL | ARRAY(index-arity, element).
struct Sort {
  enum class Kind { Int, Bool, Array };

  Kind kind = Kind::Int;
  int arity = 0;
  Scalar element = Scalar::Int;

  static Sort scalar(Scalar s);
  // Throws std::invalid_argument when arity < 1.
  static Sort array(int arity, Scalar element);

  bool operator==(const Sort&) const = default;
};

struct IndexRange {
  Integer lo;
  Integer hi;
  bool operator==(const IndexRange&) const = default;
};

struct ArrayDecl {
  std::string name;
  std::vector<IndexRange> ranges;
  Scalar element = Scalar::Int;

  int arity() const { return static_cast<int>(ranges.size()); }
  bool contains(std::span<const Integer> index) const;
  Sort sort() const { return Sort::array(arity(), element); }
};

using ArrayDeclPtr = std::shared_ptr<const ArrayDecl>;

// ---------------------------------------------------------------------------
// Terms

enum class FuncOp { Add, Sub, Mul, Div, Mod };

struct Term;
using TermPtr = std::shared_ptr<const Term>;

struct Term {
  struct IntConst {
    Integer value;
  };
  struct BoolConst {
    bool value;
  };
  struct Var {
    std::string name;
    Scalar sort;
  };
  struct App {
    FuncOp op;
    TermPtr lhs;
    TermPtr rhs;
  };
  // a[t1,...,tn] behaves like a variable once its indices are known.
  struct ArrayRef {
    ArrayDeclPtr array;
    std::vector<TermPtr> indices;
  };

  std::variant<IntConst, BoolConst, Var, App, ArrayRef> node;

  Scalar sort() const;
};

TermPtr make_int(Integer value);
TermPtr make_bool(bool value);
TermPtr make_var(std::string name, Scalar sort = Scalar::Int);
TermPtr make_app(FuncOp op, TermPtr lhs, TermPtr rhs);
TermPtr make_array_ref(ArrayDeclPtr array, std::vector<TermPtr> indices);

bool operator==(const Term& a, const Term& b);

// ---------------------------------------------------------------------------
// Atoms

enum class Relation { Eq, Ne, Lt, Le, Gt, Ge };

std::string_view to_string(Relation rel);
std::string_view to_string(FuncOp op);

struct Atom {
  struct Compare {
    Relation rel;
    TermPtr lhs;
    TermPtr rhs;
  };
  struct Call {
    std::string procedure;
    std::vector<TermPtr> args;
  };
  struct Constant {
    bool value;
  };

  std::variant<Compare, Call, Constant> node;
};

bool operator==(const Atom& a, const Atom& b);

// ---------------------------------------------------------------------------
// Formulas

struct Node;
using NodePtr = std::shared_ptr<const Node>;

class Formula {
 public:
  Formula() = default;
  explicit Formula(std::vector<NodePtr> items);
  Formula(std::initializer_list<NodePtr> items);

  bool empty() const { return size() == 0; }
  std::size_t size() const { return items_ ? items_->size() : 0; }
  const NodePtr& operator[](std::size_t i) const { return (*items_)[i]; }
  std::span<const NodePtr> items() const;

  auto begin() const { return items().begin(); }
  auto end() const { return items().end(); }

 private:
  std::shared_ptr<const std::vector<NodePtr>> items_;
};

bool operator==(const Formula& a, const Formula& b);

// Conjunction of two lists, preserving order.
Formula concat(const Formula& a, const Formula& b);

enum class Quantifier { Exists, Forall };

struct Node {
  struct Or {
    Formula left;
    Formula right;
  };
  // Only present before normalization (or in hand-built formulas).
  struct And {
    Formula left;
    Formula right;
  };
  struct Implies {
    Formula antecedent;
    Formula consequent;
  };
  struct Not {
    Formula body;
  };
  // Unbounded quantifier.  Forall is rewritten away by normalization.
  struct Quantified {
    Quantifier quantifier;
    std::string var;
    Scalar sort;
    Formula body;
  };
  // x in [lo..hi], integer-valued.
  struct Bounded {
    Quantifier quantifier;
    std::string var;
    TermPtr lo;
    TermPtr hi;
    Formula body;
  };

  std::variant<Atom, Or, And, Implies, Not, Quantified, Bounded> node;
};

bool operator==(const Node& a, const Node& b);

NodePtr make_atom(Atom atom);
NodePtr make_compare(Relation rel, TermPtr lhs, TermPtr rhs);
NodePtr make_eq(TermPtr lhs, TermPtr rhs);
NodePtr make_truth(bool value);
NodePtr make_call(std::string procedure, std::vector<TermPtr> args);
NodePtr make_or(Formula left, Formula right);
NodePtr make_and(Formula left, Formula right);
NodePtr make_implies(Formula antecedent, Formula consequent);
NodePtr make_not(Formula body);
NodePtr make_exists(std::string var, Scalar sort, Formula body);
NodePtr make_forall(std::string var, Scalar sort, Formula body);
NodePtr make_bounded(Quantifier q, std::string var, TermPtr lo, TermPtr hi, Formula body);

// ---------------------------------------------------------------------------
// Programs

struct Param {
  std::string name;
  Scalar sort = Scalar::Int;
  bool operator==(const Param&) const = default;
};

struct ProcedureDef {
  std::string name;
  std::vector<Param> params;
  Formula body;
};

struct ProgramUnit {
  std::vector<ArrayDeclPtr> arrays;
  std::vector<ProcedureDef> procedures;
  Formula query;
  // Declared variables followed by the query's implicitly declared free
  // variables, in first-occurrence order.
  std::vector<Param> query_free_vars;

  const ProcedureDef* find_procedure(std::string_view name) const;
  const ArrayDecl* find_array(std::string_view name) const;
  std::optional<Scalar> variable_sort(std::string_view name) const;
};

}  // namespace fap
