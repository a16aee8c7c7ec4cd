#pragma once

// Valuations, term evaluation and atom classification.

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fap/ast.hpp"

namespace fap {

using Value = std::variant<Integer, bool>;

std::string to_string(const Value& v);

// One array cell: a[i1,...,in].
struct CellRef {
  std::string array;
  std::vector<Integer> index;

  bool operator==(const CellRef&) const = default;
};

bool operator<(const CellRef& a, const CellRef& b);

std::string to_string(const CellRef& cell);

// Read access to whatever holds the current bindings.  The engine uses a
// mutable store with undo; everything else uses Valuation.
class Bindings {
 public:
  virtual ~Bindings() = default;
  virtual const Value* scalar(std::string_view name) const = 0;
  virtual const Value* cell(const CellRef& cell) const = 0;
};

class Valuation final : public Bindings {
 public:
  using ScalarMap = std::map<std::string, Value, std::less<>>;
  using CellMap = std::map<CellRef, Value>;

  Valuation() = default;
  Valuation(ScalarMap scalars, CellMap cells) : scalars_(std::move(scalars)), cells_(std::move(cells)) {}

  const Value* scalar(std::string_view name) const override;
  const Value* cell(const CellRef& cell) const override;

  // Both throw std::logic_error if the key is already bound.
  Valuation extended(const std::string& name, Value value) const;
  Valuation extended(const CellRef& cell, Value value) const;

  // True when every binding of `base` is present here with the same value.
  bool extends(const Valuation& base) const;

  const ScalarMap& scalars() const { return scalars_; }
  const CellMap& cells() const { return cells_; }
  bool empty() const { return scalars_.empty() && cells_.empty(); }
  std::size_t size() const { return scalars_.size() + cells_.size(); }

  friend bool operator==(const Valuation& a, const Valuation& b) {
    return a.scalars_ == b.scalars_ && a.cells_ == b.cells_;
  }
  friend bool operator<(const Valuation& a, const Valuation& b) {
    return a.scalars_ != b.scalars_ ? a.scalars_ < b.scalars_ : a.cells_ < b.cells_;
  }

 private:
  ScalarMap scalars_;
  CellMap cells_;
};

// `{x/3, y/2, a[1,2]/5}`: scalars sorted by name, then cells.
std::string to_string(const Valuation& v);

// Division or modulo by zero, or an array index outside its declared range.
class EvalFault : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

bool is_closed(const Term& t, const Bindings& env);

// Requires is_closed(t, env).  Throws EvalFault; throws std::logic_error if
// the term is not closed.
Value eval_term(const Term& t, const Bindings& env);

struct AtomClass {
  enum class Kind { ClosedTrue, ClosedFalse, Assignment, NotEvaluable };
  using Target = std::variant<std::string, CellRef>;

  Kind kind = Kind::NotEvaluable;
  // Set for Assignment.
  std::optional<Target> target;
  Value value = Integer(0);
  // Set when NotEvaluable was caused by an evaluation fault.
  std::optional<std::string> fault;
};

// Call atoms must be unfolded before classification (std::logic_error).
AtomClass classify_atom(const Atom& atom, const Bindings& env);

bool compare(Relation rel, const Value& lhs, const Value& rhs);

}  // namespace fap
