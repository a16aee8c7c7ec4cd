#include "fap/oracle.hpp"

#include <algorithm>
#include <map>

namespace fap {

namespace {

// Deliberately separate from the engine's evaluator.
class Evaluator {
 public:
  Evaluator(const ProgramUnit& unit, const FiniteDomain& domain) : unit_(unit), domain_(domain) {}

  using Env = std::map<std::string, Value, std::less<>>;

  bool formula(const Formula& f, Env& env, const Valuation::CellMap& cells) {
    for (const auto& node : f) {
      if (!holds(*node, env, cells)) return false;
    }
    return true;
  }

 private:
  Value term(const Term& t, const Env& env, const Valuation::CellMap& cells) {
    if (const auto* c = std::get_if<Term::IntConst>(&t.node)) return c->value;
    if (const auto* c = std::get_if<Term::BoolConst>(&t.node)) return c->value;
    if (const auto* v = std::get_if<Term::Var>(&t.node)) {
      auto it = env.find(v->name);
      if (it == env.end()) throw OracleError("unbound variable '" + v->name + "'");
      return it->second;
    }
    if (const auto* a = std::get_if<Term::App>(&t.node)) {
      Integer l = std::get<Integer>(term(*a->lhs, env, cells));
      Integer r = std::get<Integer>(term(*a->rhs, env, cells));
      switch (a->op) {
        case FuncOp::Add: return Integer(l + r);
        case FuncOp::Sub: return Integer(l - r);
        case FuncOp::Mul: return Integer(l * r);
        default: throw OracleError("division is outside the oracle's fragment");
      }
    }
    const auto& ref = std::get<Term::ArrayRef>(t.node);
    CellRef cell{ref.array->name, {}};
    for (const auto& i : ref.indices) cell.index.push_back(std::get<Integer>(term(*i, env, cells)));
    auto it = cells.find(cell);
    if (it == cells.end()) throw OracleError("unbound cell " + to_string(cell));
    return it->second;
  }

  bool atom(const Atom& a, Env& env, const Valuation::CellMap& cells) {
    if (const auto* c = std::get_if<Atom::Constant>(&a.node)) return c->value;
    if (const auto* call = std::get_if<Atom::Call>(&a.node)) {
      const ProcedureDef* def = unit_.find_procedure(call->procedure);
      if (!def) throw OracleError("unknown procedure '" + call->procedure + "'");
      Env local;
      for (std::size_t i = 0; i < def->params.size(); ++i) {
        local.emplace(def->params[i].name, term(*call->args[i], env, cells));
      }
      return formula(def->body, local, cells);
    }
    const auto& c = std::get<Atom::Compare>(a.node);
    Value l = term(*c.lhs, env, cells);
    Value r = term(*c.rhs, env, cells);
    if (c.rel == Relation::Eq) return l == r;
    if (c.rel == Relation::Ne) return l != r;
    const Integer& x = std::get<Integer>(l);
    const Integer& y = std::get<Integer>(r);
    switch (c.rel) {
      case Relation::Lt: return x < y;
      case Relation::Le: return x <= y;
      case Relation::Gt: return x > y;
      default: return x >= y;
    }
  }

  template <class Body>
  bool quantify(Quantifier q, const std::string& var, const std::vector<Value>& values, Env& env, Body&& body) {
    auto saved = env.find(var) == env.end() ? std::nullopt : std::optional<Value>(env.at(var));
    bool result = q == Quantifier::Forall;
    for (const auto& v : values) {
      env.insert_or_assign(var, v);
      bool b = body();
      if (q == Quantifier::Exists && b) {
        result = true;
        break;
      }
      if (q == Quantifier::Forall && !b) {
        result = false;
        break;
      }
    }
    if (saved) {
      env.insert_or_assign(var, *saved);
    } else {
      env.erase(var);
    }
    return result;
  }

  bool holds(const Node& node, Env& env, const Valuation::CellMap& cells) {
    if (const auto* a = std::get_if<Atom>(&node.node)) return atom(*a, env, cells);
    if (const auto* o = std::get_if<Node::Or>(&node.node)) {
      return formula(o->left, env, cells) || formula(o->right, env, cells);
    }
    if (const auto* a = std::get_if<Node::And>(&node.node)) {
      return formula(a->left, env, cells) && formula(a->right, env, cells);
    }
    if (const auto* i = std::get_if<Node::Implies>(&node.node)) {
      return !formula(i->antecedent, env, cells) || formula(i->consequent, env, cells);
    }
    if (const auto* n = std::get_if<Node::Not>(&node.node)) return !formula(n->body, env, cells);
    if (const auto* q = std::get_if<Node::Quantified>(&node.node)) {
      if (q->sort == Scalar::Int) throw OracleError("unbounded integer quantifier");
      return quantify(q->quantifier, q->var, {Value{false}, Value{true}}, env,
                      [&] { return formula(q->body, env, cells); });
    }
    const auto& b = std::get<Node::Bounded>(node.node);
    Integer lo = std::get<Integer>(term(*b.lo, env, cells));
    Integer hi = std::get<Integer>(term(*b.hi, env, cells));
    std::vector<Value> range;
    for (Integer v = lo; v <= hi; ++v) range.emplace_back(v);
    return quantify(b.quantifier, b.var, range, env, [&] { return formula(b.body, env, cells); });
  }

  const ProgramUnit& unit_;
  const FiniteDomain& domain_;
};

// Free variables with their sorts, in first-occurrence order.
void collect_term(const Term& t, const std::vector<std::string>& bound,
                  std::vector<std::pair<std::string, Scalar>>& out) {
  if (const auto* v = std::get_if<Term::Var>(&t.node)) {
    if (std::find(bound.begin(), bound.end(), v->name) != bound.end()) return;
    for (const auto& [n, s] : out) {
      if (n == v->name) return;
    }
    out.emplace_back(v->name, v->sort);
  } else if (const auto* a = std::get_if<Term::App>(&t.node)) {
    collect_term(*a->lhs, bound, out);
    collect_term(*a->rhs, bound, out);
  } else if (const auto* r = std::get_if<Term::ArrayRef>(&t.node)) {
    for (const auto& i : r->indices) collect_term(*i, bound, out);
  }
}

void collect(const Formula& f, std::vector<std::string>& bound, std::vector<std::pair<std::string, Scalar>>& out) {
  for (const auto& node : f) {
    const Node& n = *node;
    if (const auto* a = std::get_if<Atom>(&n.node)) {
      if (const auto* c = std::get_if<Atom::Compare>(&a->node)) {
        collect_term(*c->lhs, bound, out);
        collect_term(*c->rhs, bound, out);
      } else if (const auto* c = std::get_if<Atom::Call>(&a->node)) {
        for (const auto& t : c->args) collect_term(*t, bound, out);
      }
    } else if (const auto* o = std::get_if<Node::Or>(&n.node)) {
      collect(o->left, bound, out);
      collect(o->right, bound, out);
    } else if (const auto* o = std::get_if<Node::And>(&n.node)) {
      collect(o->left, bound, out);
      collect(o->right, bound, out);
    } else if (const auto* i = std::get_if<Node::Implies>(&n.node)) {
      collect(i->antecedent, bound, out);
      collect(i->consequent, bound, out);
    } else if (const auto* x = std::get_if<Node::Not>(&n.node)) {
      collect(x->body, bound, out);
    } else if (const auto* q = std::get_if<Node::Quantified>(&n.node)) {
      bound.push_back(q->var);
      collect(q->body, bound, out);
      bound.pop_back();
    } else {
      const auto& b = std::get<Node::Bounded>(n.node);
      collect_term(*b.lo, bound, out);
      collect_term(*b.hi, bound, out);
      bound.push_back(b.var);
      collect(b.body, bound, out);
      bound.pop_back();
    }
  }
}

}  // namespace

bool oracle_truth(const ProgramUnit& unit, const Formula& f, const Valuation& alpha, const FiniteDomain& domain) {
  Evaluator ev(unit, domain);
  Evaluator::Env env(alpha.scalars().begin(), alpha.scalars().end());
  return ev.formula(f, env, alpha.cells());
}

Satisfiability oracle_satisfiable(const ProgramUnit& unit, const Formula& f, const Valuation& alpha,
                                  const FiniteDomain& domain) {
  if (domain.lo > domain.hi) throw OracleError("empty domain");
  std::vector<std::string> bound;
  std::vector<std::pair<std::string, Scalar>> vars;
  collect(f, bound, vars);
  std::erase_if(vars, [&](const auto& v) { return alpha.scalar(v.first) != nullptr; });

  std::vector<std::vector<Value>> choices;
  for (const auto& [name, sort] : vars) {
    std::vector<Value> values;
    if (sort == Scalar::Bool) {
      values = {Value{false}, Value{true}};
    } else {
      for (Integer v = domain.lo; v <= domain.hi; ++v) values.emplace_back(v);
    }
    choices.push_back(std::move(values));
  }

  Evaluator ev(unit, domain);
  Satisfiability out;
  std::vector<std::size_t> pos(vars.size(), 0);
  while (true) {
    Evaluator::Env env(alpha.scalars().begin(), alpha.scalars().end());
    Valuation::ScalarMap grounding;
    for (std::size_t i = 0; i < vars.size(); ++i) {
      env.insert_or_assign(vars[i].first, choices[i][pos[i]]);
      grounding.emplace(vars[i].first, choices[i][pos[i]]);
    }
    if (ev.formula(f, env, alpha.cells())) out.witnesses.emplace_back(std::move(grounding), Valuation::CellMap{});
    // Odometer increment, last variable fastest.
    std::size_t k = vars.size();
    while (k > 0) {
      --k;
      if (++pos[k] < choices[k].size()) break;
      pos[k] = 0;
      if (k == 0) {
        k = vars.size() + 1;
        break;
      }
    }
    if (vars.empty() || k == vars.size() + 1) break;
  }
  out.satisfiable = !out.witnesses.empty();
  return out;
}

}  // namespace fap
