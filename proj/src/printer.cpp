#include <sstream>

#include "fap/syntax.hpp"

namespace fap {

namespace {

// Term precedences: 1 additive, 2 multiplicative, 3 atomic.
void print_term(std::ostream& os, const Term& t, int min_prec) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::IntConst>) {
          os << n.value;
        } else if constexpr (std::is_same_v<T, Term::BoolConst>) {
          os << (n.value ? "TRUE" : "FALSE");
        } else if constexpr (std::is_same_v<T, Term::Var>) {
          os << n.name;
        } else if constexpr (std::is_same_v<T, Term::ArrayRef>) {
          os << n.array->name << '[';
          for (std::size_t i = 0; i < n.indices.size(); ++i) {
            if (i) os << ", ";
            print_term(os, *n.indices[i], 1);
          }
          os << ']';
        } else {
          int prec = n.op == FuncOp::Add || n.op == FuncOp::Sub ? 1 : 2;
          bool parens = prec < min_prec;
          if (parens) os << '(';
          print_term(os, *n.lhs, prec);
          os << ' ' << to_string(n.op) << ' ';
          print_term(os, *n.rhs, prec + 1);
          if (parens) os << ')';
        }
      },
      t.node);
}

void print_formula(std::ostream& os, const Formula& f, int min_prec);

void print_block(std::ostream& os, const Formula& f) {
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << "; ";
    print_formula(os, Formula{f[i]}, 1);
  }
  if (f.empty()) os << "TRUE";
}

// Formula precedences: 1 implication, 2 disjunction, 3 conjunction list,
// 4 unary and atomic.
void print_node(std::ostream& os, const Node& node, int min_prec) {
  auto wrap = [&](int prec, auto&& body) {
    bool parens = prec < min_prec;
    if (parens) os << '(';
    body();
    if (parens) os << ')';
  };
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          os << to_string(n);
        } else if constexpr (std::is_same_v<T, Node::Or>) {
          wrap(2, [&] {
            print_formula(os, n.left, 3);
            os << " OR ";
            print_formula(os, n.right, 2);
          });
        } else if constexpr (std::is_same_v<T, Node::And>) {
          wrap(3, [&] {
            print_formula(os, n.left, 4);
            os << " AND ";
            print_formula(os, n.right, 3);
          });
        } else if constexpr (std::is_same_v<T, Node::Implies>) {
          wrap(1, [&] {
            print_formula(os, n.antecedent, 2);
            os << " -> ";
            print_formula(os, n.consequent, 1);
          });
        } else if constexpr (std::is_same_v<T, Node::Not>) {
          os << "NOT ";
          print_formula(os, n.body, 4);
        } else if constexpr (std::is_same_v<T, Node::Quantified>) {
          os << (n.quantifier == Quantifier::Exists ? "EXISTS " : "FORALL ") << n.var << ':' << to_string(n.sort)
             << ". ";
          print_formula(os, n.body, 4);
        } else {
          os << (n.quantifier == Quantifier::Exists ? "SOME " : "FOR ") << n.var << " := ";
          print_term(os, *n.lo, 1);
          os << " TO ";
          print_term(os, *n.hi, 1);
          os << " DO ";
          print_block(os, n.body);
          os << " END";
        }
      },
      node.node);
}

void print_formula(std::ostream& os, const Formula& f, int min_prec) {
  if (f.empty()) {
    os << "TRUE";
    return;
  }
  if (f.size() == 1) {
    print_node(os, *f[0], min_prec);
    return;
  }
  bool parens = min_prec > 3;
  if (parens) os << '(';
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (i) os << " AND ";
    print_node(os, *f[i], 4);
  }
  if (parens) os << ')';
}

}  // namespace

std::string to_string(const Term& term) {
  std::ostringstream os;
  print_term(os, term, 1);
  return os.str();
}

std::string to_string(const Atom& atom) {
  return std::visit(
      [](const auto& a) -> std::string {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Atom::Compare>) {
          return to_string(*a.lhs) + " " + std::string(to_string(a.rel)) + " " + to_string(*a.rhs);
        } else if constexpr (std::is_same_v<T, Atom::Call>) {
          std::string out = a.procedure + "(";
          for (std::size_t i = 0; i < a.args.size(); ++i) {
            if (i) out += ", ";
            out += to_string(*a.args[i]);
          }
          return out + ")";
        } else {
          return a.value ? "TRUE" : "FALSE";
        }
      },
      atom.node);
}

std::string to_string(const Formula& formula) {
  std::ostringstream os;
  print_formula(os, formula, 1);
  return os.str();
}

std::string to_string(const ProgramUnit& unit) {
  std::ostringstream os;
  for (const auto& p : unit.query_free_vars) os << "var " << p.name << " : " << to_string(p.sort) << ";\n";
  for (const auto& a : unit.arrays) {
    os << "array " << a->name << '[';
    for (std::size_t i = 0; i < a->ranges.size(); ++i) {
      if (i) os << ", ";
      os << a->ranges[i].lo << ".." << a->ranges[i].hi;
    }
    os << "] : " << to_string(a->element) << ";\n";
  }
  for (const auto& def : unit.procedures) {
    os << "def " << def.name << '(';
    for (std::size_t i = 0; i < def.params.size(); ++i) {
      if (i) os << ", ";
      os << def.params[i].name << " : " << to_string(def.params[i].sort);
    }
    os << ") := ";
    print_formula(os, def.body, 1);
    os << ";\n";
  }
  os << "query";
  if (!unit.query.empty()) os << ' ' << to_string(unit.query);
  os << ";\n";
  return os.str();
}

}  // namespace fap
