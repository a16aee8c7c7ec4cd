#include "fap/semantics.hpp"

#include <algorithm>

namespace fap {

std::string to_string(const Value& v) {
  if (const auto* b = std::get_if<bool>(&v)) return *b ? "TRUE" : "FALSE";
  return to_string(std::get<Integer>(v));
}

bool operator<(const CellRef& a, const CellRef& b) {
  if (a.array != b.array) return a.array < b.array;
  return std::lexicographical_compare(a.index.begin(), a.index.end(), b.index.begin(), b.index.end());
}

std::string to_string(const CellRef& cell) {
  std::string out = cell.array + "[";
  for (std::size_t i = 0; i < cell.index.size(); ++i) {
    if (i) out += ",";
    out += to_string(cell.index[i]);
  }
  return out + "]";
}

// ---------------------------------------------------------------------------

const Value* Valuation::scalar(std::string_view name) const {
  auto it = scalars_.find(name);
  return it == scalars_.end() ? nullptr : &it->second;
}

const Value* Valuation::cell(const CellRef& cell) const {
  auto it = cells_.find(cell);
  return it == cells_.end() ? nullptr : &it->second;
}

Valuation Valuation::extended(const std::string& name, Value value) const {
  Valuation out = *this;
  if (!out.scalars_.emplace(name, std::move(value)).second) {
    throw std::logic_error("variable '" + name + "' is already bound");
  }
  return out;
}

Valuation Valuation::extended(const CellRef& cell, Value value) const {
  Valuation out = *this;
  if (!out.cells_.emplace(cell, std::move(value)).second) {
    throw std::logic_error("cell " + to_string(cell) + " is already bound");
  }
  return out;
}

bool Valuation::extends(const Valuation& base) const {
  for (const auto& [k, v] : base.scalars_) {
    const Value* mine = scalar(k);
    if (!mine || *mine != v) return false;
  }
  for (const auto& [k, v] : base.cells_) {
    const Value* mine = cell(k);
    if (!mine || *mine != v) return false;
  }
  return true;
}

std::string to_string(const Valuation& v) {
  std::string out = "{";
  bool first = true;
  auto sep = [&] {
    if (!first) out += ", ";
    first = false;
  };
  for (const auto& [k, val] : v.scalars()) {
    sep();
    out += k + "/" + to_string(val);
  }
  for (const auto& [k, val] : v.cells()) {
    sep();
    out += to_string(k) + "/" + to_string(val);
  }
  return out + "}";
}

// ---------------------------------------------------------------------------

namespace {

struct Open {};
struct Fault {
  std::string message;
};
// What a term evaluates to under a possibly partial valuation.
using Partial = std::variant<Value, Open, Fault>;

Partial eval_cell(const Term::ArrayRef& ref, const Bindings& env, CellRef* out_cell);

Partial partial(const Term& t, const Bindings& env) {
  return std::visit(
      [&](const auto& n) -> Partial {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::IntConst>) {
          return Value{n.value};
        } else if constexpr (std::is_same_v<T, Term::BoolConst>) {
          return Value{n.value};
        } else if constexpr (std::is_same_v<T, Term::Var>) {
          const Value* v = env.scalar(n.name);
          if (!v) return Open{};
          return *v;
        } else if constexpr (std::is_same_v<T, Term::ArrayRef>) {
          return eval_cell(n, env, nullptr);
        } else {
          Partial l = partial(*n.lhs, env);
          Partial r = partial(*n.rhs, env);
          if (auto* f = std::get_if<Fault>(&l)) return *f;
          if (auto* f = std::get_if<Fault>(&r)) return *f;
          if (std::holds_alternative<Open>(l) || std::holds_alternative<Open>(r)) return Open{};
          const Integer& a = std::get<Integer>(std::get<Value>(l));
          const Integer& b = std::get<Integer>(std::get<Value>(r));
          switch (n.op) {
            case FuncOp::Add: return Value{Integer(a + b)};
            case FuncOp::Sub: return Value{Integer(a - b)};
            case FuncOp::Mul: return Value{Integer(a * b)};
            case FuncOp::Div:
            case FuncOp::Mod: {
              if (b == 0) return Fault{n.op == FuncOp::Div ? "division by zero" : "modulo by zero"};
              // Floored division: the remainder takes the sign of the divisor.
              Integer q = a / b;
              Integer m = a % b;
              if (m != 0 && ((m < 0) != (b < 0))) {
                q -= 1;
                m += b;
              }
              return Value{n.op == FuncOp::Div ? q : m};
            }
          }
          return Open{};
        }
      },
      t.node);
}

// Evaluates the indices; on success stores the cell in `out_cell` (if given)
// and returns the bound value or Open.
Partial eval_cell(const Term::ArrayRef& ref, const Bindings& env, CellRef* out_cell) {
  CellRef cell{ref.array->name, {}};
  bool open = false;
  for (const auto& i : ref.indices) {
    Partial p = partial(*i, env);
    if (auto* f = std::get_if<Fault>(&p)) return *f;
    if (std::holds_alternative<Open>(p)) {
      open = true;
      continue;
    }
    cell.index.push_back(std::get<Integer>(std::get<Value>(p)));
  }
  if (open) return Open{};
  if (!ref.array->contains(cell.index)) return Fault{"index " + to_string(cell) + " out of range"};
  if (out_cell) *out_cell = cell;
  const Value* v = env.cell(cell);
  if (!v) return Open{};
  return *v;
}

// If `t` is an unbound variable, or a cell whose indices are closed but which
// is itself unbound, returns the corresponding assignment target.
std::optional<AtomClass::Target> slot(const Term& t, const Bindings& env) {
  if (const auto* v = std::get_if<Term::Var>(&t.node)) {
    if (!env.scalar(v->name)) return AtomClass::Target{v->name};
    return std::nullopt;
  }
  if (const auto* ref = std::get_if<Term::ArrayRef>(&t.node)) {
    CellRef cell;
    cell.array.clear();
    Partial p = eval_cell(*ref, env, &cell);
    if (std::holds_alternative<Open>(p) && !cell.array.empty()) return AtomClass::Target{cell};
  }
  return std::nullopt;
}

}  // namespace

bool compare(Relation rel, const Value& lhs, const Value& rhs) {
  switch (rel) {
    case Relation::Eq: return lhs == rhs;
    case Relation::Ne: return lhs != rhs;
    default: break;
  }
  const Integer& a = std::get<Integer>(lhs);
  const Integer& b = std::get<Integer>(rhs);
  switch (rel) {
    case Relation::Lt: return a < b;
    case Relation::Le: return a <= b;
    case Relation::Gt: return a > b;
    case Relation::Ge: return a >= b;
    default: return false;
  }
}

bool is_closed(const Term& t, const Bindings& env) {
  return std::visit(
      [&](const auto& n) -> bool {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::IntConst> || std::is_same_v<T, Term::BoolConst>) {
          return true;
        } else if constexpr (std::is_same_v<T, Term::Var>) {
          return env.scalar(n.name) != nullptr;
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return is_closed(*n.lhs, env) && is_closed(*n.rhs, env);
        } else {
          // A faulting index counts as closed: evaluation will report it.
          Partial p = eval_cell(n, env, nullptr);
          return !std::holds_alternative<Open>(p);
        }
      },
      t.node);
}

Value eval_term(const Term& t, const Bindings& env) {
  Partial p = partial(t, env);
  if (auto* f = std::get_if<Fault>(&p)) throw EvalFault(f->message);
  if (std::holds_alternative<Open>(p)) throw std::logic_error("eval_term: term is not closed");
  return std::get<Value>(p);
}

AtomClass classify_atom(const Atom& atom, const Bindings& env) {
  AtomClass out;
  if (const auto* c = std::get_if<Atom::Constant>(&atom.node)) {
    out.kind = c->value ? AtomClass::Kind::ClosedTrue : AtomClass::Kind::ClosedFalse;
    return out;
  }
  if (std::holds_alternative<Atom::Call>(atom.node)) {
    throw std::logic_error("classify_atom: procedure calls must be unfolded first");
  }
  const auto& cmp = std::get<Atom::Compare>(atom.node);
  Partial l = partial(*cmp.lhs, env);
  Partial r = partial(*cmp.rhs, env);
  if (auto* f = std::get_if<Fault>(&l)) {
    out.fault = f->message;
    return out;
  }
  if (auto* f = std::get_if<Fault>(&r)) {
    out.fault = f->message;
    return out;
  }
  bool lc = std::holds_alternative<Value>(l);
  bool rc = std::holds_alternative<Value>(r);
  if (lc && rc) {
    out.kind = compare(cmp.rel, std::get<Value>(l), std::get<Value>(r)) ? AtomClass::Kind::ClosedTrue
                                                                          : AtomClass::Kind::ClosedFalse;
    return out;
  }
  if (cmp.rel != Relation::Eq || (!lc && !rc)) return out;
  const Term& open_side = lc ? *cmp.rhs : *cmp.lhs;
  if (auto target = slot(open_side, env)) {
    out.kind = AtomClass::Kind::Assignment;
    out.target = std::move(target);
    out.value = std::get<Value>(lc ? l : r);
  }
  return out;
}

}  // namespace fap
