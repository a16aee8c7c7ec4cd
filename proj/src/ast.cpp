#include "fap/ast.hpp"

#include <algorithm>
#include <stdexcept>

namespace fap {

std::string_view to_string(Scalar sort) { return sort == Scalar::Int ? "int" : "bool"; }

std::string_view to_string(Relation rel) {
  switch (rel) {
    case Relation::Eq: return "=";
    case Relation::Ne: return "<>";
    case Relation::Lt: return "<";
    case Relation::Le: return "<=";
    case Relation::Gt: return ">";
    case Relation::Ge: return ">=";
  }
  return "?";
}

std::string_view to_string(FuncOp op) {
  switch (op) {
    case FuncOp::Add: return "+";
    case FuncOp::Sub: return "-";
    case FuncOp::Mul: return "*";
    case FuncOp::Div: return "DIV";
    case FuncOp::Mod: return "MOD";
  }
  return "?";
}

Sort Sort::scalar(Scalar s) {
  Sort sort;
  sort.kind = s == Scalar::Int ? Kind::Int : Kind::Bool;
  sort.element = s;
  return sort;
}

Sort Sort::array(int arity, Scalar element) {
  if (arity < 1) throw std::invalid_argument("array index arity must be at least 1");
  Sort sort;
  sort.kind = Kind::Array;
  sort.arity = arity;
  sort.element = element;
  return sort;
}

bool ArrayDecl::contains(std::span<const Integer> index) const {
  if (index.size() != ranges.size()) return false;
  for (std::size_t i = 0; i < index.size(); ++i) {
    if (index[i] < ranges[i].lo || index[i] > ranges[i].hi) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

Scalar Term::sort() const {
  return std::visit(
      [](const auto& n) -> Scalar {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntConst> || std::is_same_v<T, App>) {
          return Scalar::Int;
        } else if constexpr (std::is_same_v<T, BoolConst>) {
          return Scalar::Bool;
        } else if constexpr (std::is_same_v<T, Var>) {
          return n.sort;
        } else {
          return n.array->element;
        }
      },
      node);
}

TermPtr make_int(Integer value) { return std::make_shared<Term>(Term{Term::IntConst{std::move(value)}}); }
TermPtr make_bool(bool value) { return std::make_shared<Term>(Term{Term::BoolConst{value}}); }
TermPtr make_var(std::string name, Scalar sort) {
  return std::make_shared<Term>(Term{Term::Var{std::move(name), sort}});
}
TermPtr make_app(FuncOp op, TermPtr lhs, TermPtr rhs) {
  return std::make_shared<Term>(Term{Term::App{op, std::move(lhs), std::move(rhs)}});
}
TermPtr make_array_ref(ArrayDeclPtr array, std::vector<TermPtr> indices) {
  return std::make_shared<Term>(Term{Term::ArrayRef{std::move(array), std::move(indices)}});
}

namespace {

bool same(const TermPtr& a, const TermPtr& b) { return a == b || (a && b && *a == *b); }

bool same(const std::vector<TermPtr>& a, const std::vector<TermPtr>& b) {
  return std::equal(a.begin(), a.end(), b.begin(), b.end(),
                    [](const TermPtr& x, const TermPtr& y) { return same(x, y); });
}

}  // namespace

bool operator==(const Term& a, const Term& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Term::IntConst> || std::is_same_v<T, Term::BoolConst>) {
          return x.value == y.value;
        } else if constexpr (std::is_same_v<T, Term::Var>) {
          return x.name == y.name && x.sort == y.sort;
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return x.op == y.op && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        } else {
          return x.array->name == y.array->name && same(x.indices, y.indices);
        }
      },
      a.node);
}

bool operator==(const Atom& a, const Atom& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Atom::Compare>) {
          return x.rel == y.rel && same(x.lhs, y.lhs) && same(x.rhs, y.rhs);
        } else if constexpr (std::is_same_v<T, Atom::Call>) {
          return x.procedure == y.procedure && same(x.args, y.args);
        } else {
          return x.value == y.value;
        }
      },
      a.node);
}

// ---------------------------------------------------------------------------

Formula::Formula(std::vector<NodePtr> items)
    : items_(items.empty() ? nullptr : std::make_shared<const std::vector<NodePtr>>(std::move(items))) {}

Formula::Formula(std::initializer_list<NodePtr> items) : Formula(std::vector<NodePtr>(items)) {}

std::span<const NodePtr> Formula::items() const {
  if (!items_) return {};
  return {items_->data(), items_->size()};
}

bool operator==(const Formula& a, const Formula& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] != b[i] && !(*a[i] == *b[i])) return false;
  }
  return true;
}

Formula concat(const Formula& a, const Formula& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  std::vector<NodePtr> items(a.begin(), a.end());
  items.insert(items.end(), b.begin(), b.end());
  return Formula(std::move(items));
}

bool operator==(const Node& a, const Node& b) {
  if (a.node.index() != b.node.index()) return false;
  return std::visit(
      [&](const auto& x) -> bool {
        using T = std::decay_t<decltype(x)>;
        const auto& y = std::get<T>(b.node);
        if constexpr (std::is_same_v<T, Atom>) {
          return x == y;
        } else if constexpr (std::is_same_v<T, Node::Or> || std::is_same_v<T, Node::And>) {
          return x.left == y.left && x.right == y.right;
        } else if constexpr (std::is_same_v<T, Node::Implies>) {
          return x.antecedent == y.antecedent && x.consequent == y.consequent;
        } else if constexpr (std::is_same_v<T, Node::Not>) {
          return x.body == y.body;
        } else if constexpr (std::is_same_v<T, Node::Quantified>) {
          return x.quantifier == y.quantifier && x.var == y.var && x.sort == y.sort && x.body == y.body;
        } else {
          return x.quantifier == y.quantifier && x.var == y.var && same(x.lo, y.lo) && same(x.hi, y.hi) &&
                 x.body == y.body;
        }
      },
      a.node);
}

NodePtr make_atom(Atom atom) { return std::make_shared<Node>(Node{std::move(atom)}); }
NodePtr make_compare(Relation rel, TermPtr lhs, TermPtr rhs) {
  return make_atom(Atom{Atom::Compare{rel, std::move(lhs), std::move(rhs)}});
}
NodePtr make_eq(TermPtr lhs, TermPtr rhs) { return make_compare(Relation::Eq, std::move(lhs), std::move(rhs)); }
NodePtr make_truth(bool value) { return make_atom(Atom{Atom::Constant{value}}); }
NodePtr make_call(std::string procedure, std::vector<TermPtr> args) {
  return make_atom(Atom{Atom::Call{std::move(procedure), std::move(args)}});
}
NodePtr make_or(Formula left, Formula right) {
  return std::make_shared<Node>(Node{Node::Or{std::move(left), std::move(right)}});
}
NodePtr make_and(Formula left, Formula right) {
  return std::make_shared<Node>(Node{Node::And{std::move(left), std::move(right)}});
}
NodePtr make_implies(Formula antecedent, Formula consequent) {
  return std::make_shared<Node>(Node{Node::Implies{std::move(antecedent), std::move(consequent)}});
}
NodePtr make_not(Formula body) { return std::make_shared<Node>(Node{Node::Not{std::move(body)}}); }
NodePtr make_exists(std::string var, Scalar sort, Formula body) {
  return std::make_shared<Node>(Node{Node::Quantified{Quantifier::Exists, std::move(var), sort, std::move(body)}});
}
NodePtr make_forall(std::string var, Scalar sort, Formula body) {
  return std::make_shared<Node>(Node{Node::Quantified{Quantifier::Forall, std::move(var), sort, std::move(body)}});
}
NodePtr make_bounded(Quantifier q, std::string var, TermPtr lo, TermPtr hi, Formula body) {
  return std::make_shared<Node>(
      Node{Node::Bounded{q, std::move(var), std::move(lo), std::move(hi), std::move(body)}});
}

// ---------------------------------------------------------------------------

const ProcedureDef* ProgramUnit::find_procedure(std::string_view name) const {
  for (const auto& def : procedures) {
    if (def.name == name) return &def;
  }
  return nullptr;
}

const ArrayDecl* ProgramUnit::find_array(std::string_view name) const {
  for (const auto& decl : arrays) {
    if (decl->name == name) return decl.get();
  }
  return nullptr;
}

std::optional<Scalar> ProgramUnit::variable_sort(std::string_view name) const {
  for (const auto& p : query_free_vars) {
    if (p.name == name) return p.sort;
  }
  return std::nullopt;
}

}  // namespace fap
