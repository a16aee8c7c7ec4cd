#include <algorithm>
#include <set>

#include "fap/syntax.hpp"

namespace fap {

bool is_reserved_name(std::string_view name) {
  if (name.size() < 4 || name[0] != '%') return false;
  std::size_t dot = name.find('.');
  return dot != std::string_view::npos && dot > 1 &&
         std::all_of(name.begin() + 1, name.begin() + static_cast<std::ptrdiff_t>(dot),
                     [](char c) { return c >= '0' && c <= '9'; });
}

namespace {

std::string base_name(const std::string& name) {
  return is_reserved_name(name) ? name.substr(name.find('.') + 1) : name;
}

unsigned long reserved_index(const std::string& name) {
  return std::stoul(name.substr(1, name.find('.') - 1));
}

// ---- traversal helpers ----------------------------------------------------

template <class F>
void for_each_term(const Atom& atom, F&& f) {
  std::visit(
      [&](const auto& a) {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, Atom::Compare>) {
          f(a.lhs);
          f(a.rhs);
        } else if constexpr (std::is_same_v<T, Atom::Call>) {
          for (const auto& t : a.args) f(t);
        }
      },
      atom.node);
}

void term_vars(const TermPtr& t, const std::vector<std::string>& bound, std::vector<std::string>& out) {
  std::visit(
      [&](const auto& n) {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          if (std::find(bound.begin(), bound.end(), n.name) == bound.end() &&
              std::find(out.begin(), out.end(), n.name) == out.end()) {
            out.push_back(n.name);
          }
        } else if constexpr (std::is_same_v<T, Term::App>) {
          term_vars(n.lhs, bound, out);
          term_vars(n.rhs, bound, out);
        } else if constexpr (std::is_same_v<T, Term::ArrayRef>) {
          for (const auto& i : n.indices) term_vars(i, bound, out);
        }
      },
      t->node);
}

void formula_vars(const Formula& f, std::vector<std::string>& bound, std::vector<std::string>& out,
                  std::vector<std::string>* binders) {
  for (const auto& node : f) {
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Atom>) {
            for_each_term(n, [&](const TermPtr& t) { term_vars(t, bound, out); });
          } else if constexpr (std::is_same_v<T, Node::Or> || std::is_same_v<T, Node::And>) {
            formula_vars(n.left, bound, out, binders);
            formula_vars(n.right, bound, out, binders);
          } else if constexpr (std::is_same_v<T, Node::Implies>) {
            formula_vars(n.antecedent, bound, out, binders);
            formula_vars(n.consequent, bound, out, binders);
          } else if constexpr (std::is_same_v<T, Node::Not>) {
            formula_vars(n.body, bound, out, binders);
          } else {
            if constexpr (std::is_same_v<T, Node::Bounded>) {
              term_vars(n.lo, bound, out);
              term_vars(n.hi, bound, out);
            }
            if (binders && std::find(binders->begin(), binders->end(), n.var) == binders->end()) {
              binders->push_back(n.var);
            }
            bound.push_back(n.var);
            formula_vars(n.body, bound, out, binders);
            bound.pop_back();
          }
        },
        node->node);
  }
}

// ---- normalization --------------------------------------------------------

class Normalizer {
 public:
  explicit Normalizer(unsigned long next) : next_(next) {}

  void reserve_free(const std::vector<std::string>& names) { free_.insert(names.begin(), names.end()); }

  Formula formula(const Formula& f) {
    std::vector<NodePtr> items;
    for (const auto& node : f) append(*node, items);
    return Formula(std::move(items));
  }

 private:
  static Formula negate(Formula body) {
    if (body.size() == 1) {
      if (const auto* inner = std::get_if<Node::Not>(&body[0]->node)) return inner->body;
    }
    return Formula{make_not(std::move(body))};
  }

  std::string bind(const std::string& var) {
    std::string name;
    if (is_reserved_name(var) && !used_.count(var) && !free_.count(var)) {
      name = var;
    } else {
      name = "%" + std::to_string(next_++) + "." + base_name(var);
    }
    used_.insert(name);
    return name;
  }

  TermPtr term(const TermPtr& t) {
    return std::visit(
        [&](const auto& n) -> TermPtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Term::Var>) {
            for (auto it = env_.rbegin(); it != env_.rend(); ++it) {
              if (it->first == n.name) return it->second == n.name ? t : make_var(it->second, n.sort);
            }
            return t;
          } else if constexpr (std::is_same_v<T, Term::App>) {
            return make_app(n.op, term(n.lhs), term(n.rhs));
          } else if constexpr (std::is_same_v<T, Term::ArrayRef>) {
            std::vector<TermPtr> idx;
            for (const auto& i : n.indices) idx.push_back(term(i));
            return make_array_ref(n.array, std::move(idx));
          } else {
            return t;
          }
        },
        t->node);
  }

  Atom atom(const Atom& a) {
    return std::visit(
        [&](const auto& n) -> Atom {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Atom::Compare>) {
            return Atom{Atom::Compare{n.rel, term(n.lhs), term(n.rhs)}};
          } else if constexpr (std::is_same_v<T, Atom::Call>) {
            std::vector<TermPtr> args;
            for (const auto& t : n.args) args.push_back(term(t));
            return Atom{Atom::Call{n.procedure, std::move(args)}};
          } else {
            return a;
          }
        },
        a.node);
  }

  Formula scoped(const std::string& from, const std::string& to, const Formula& body) {
    env_.emplace_back(from, to);
    Formula out = formula(body);
    env_.pop_back();
    return out;
  }

  void append(const Node& node, std::vector<NodePtr>& items) {
    auto splice = [&](const Formula& f) { items.insert(items.end(), f.begin(), f.end()); };
    std::visit(
        [&](const auto& n) {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Atom>) {
            items.push_back(make_atom(atom(n)));
          } else if constexpr (std::is_same_v<T, Node::Or>) {
            items.push_back(make_or(formula(n.left), formula(n.right)));
          } else if constexpr (std::is_same_v<T, Node::And>) {
            splice(formula(n.left));
            splice(formula(n.right));
          } else if constexpr (std::is_same_v<T, Node::Implies>) {
            items.push_back(make_implies(formula(n.antecedent), formula(n.consequent)));
          } else if constexpr (std::is_same_v<T, Node::Not>) {
            splice(negate(formula(n.body)));
          } else if constexpr (std::is_same_v<T, Node::Quantified>) {
            std::string var = bind(n.var);
            Formula body = scoped(n.var, var, n.body);
            if (n.quantifier == Quantifier::Exists) {
              items.push_back(make_exists(var, n.sort, std::move(body)));
            } else {
              splice(negate(Formula{make_exists(var, n.sort, negate(std::move(body)))}));
            }
          } else {
            TermPtr lo = term(n.lo);
            TermPtr hi = term(n.hi);
            std::string var = bind(n.var);
            items.push_back(make_bounded(n.quantifier, var, lo, hi, scoped(n.var, var, n.body)));
          }
        },
        node.node);
  }

  unsigned long next_;
  std::set<std::string> used_;
  std::set<std::string> free_;
  std::vector<std::pair<std::string, std::string>> env_;
};

unsigned long first_unused_index(const std::vector<Formula>& formulas) {
  unsigned long next = 1;
  for (const auto& f : formulas) {
    std::vector<std::string> names = free_vars(f);
    for (const auto& b : bound_vars(f)) names.push_back(b);
    for (const auto& n : names) {
      if (is_reserved_name(n)) next = std::max(next, reserved_index(n) + 1);
    }
  }
  return next;
}

}  // namespace

std::vector<std::string> free_vars(const Formula& formula) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  formula_vars(formula, bound, out, nullptr);
  return out;
}

std::vector<std::string> bound_vars(const Formula& formula) {
  std::vector<std::string> bound;
  std::vector<std::string> out;
  std::vector<std::string> binders;
  formula_vars(formula, bound, out, &binders);
  return binders;
}

Formula normalize(const Formula& formula) {
  Normalizer n(first_unused_index({formula}));
  n.reserve_free(free_vars(formula));
  return n.formula(formula);
}

ProgramUnit normalize(const ProgramUnit& unit) {
  std::vector<Formula> all{unit.query};
  for (const auto& def : unit.procedures) all.push_back(def.body);
  Normalizer n(first_unused_index(all));
  for (const auto& f : all) n.reserve_free(free_vars(f));
  ProgramUnit out = unit;
  for (auto& def : out.procedures) def.body = n.formula(def.body);
  out.query = n.formula(unit.query);
  return out;
}

// ---- substitution ---------------------------------------------------------

TermPtr substitute(const TermPtr& t, const Substitution& subst) {
  if (subst.empty()) return t;
  return std::visit(
      [&](const auto& n) -> TermPtr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Term::Var>) {
          auto it = subst.find(n.name);
          return it == subst.end() ? t : it->second;
        } else if constexpr (std::is_same_v<T, Term::App>) {
          return make_app(n.op, substitute(n.lhs, subst), substitute(n.rhs, subst));
        } else if constexpr (std::is_same_v<T, Term::ArrayRef>) {
          std::vector<TermPtr> idx;
          for (const auto& i : n.indices) idx.push_back(substitute(i, subst));
          return make_array_ref(n.array, std::move(idx));
        } else {
          return t;
        }
      },
      t->node);
}

Formula instantiate(const Formula& formula, const Substitution& subst,
                    const std::function<std::string(const std::string&)>& rename_binder) {
  std::vector<NodePtr> items;
  items.reserve(formula.size());
  auto sub = [&](const Formula& f) { return instantiate(f, subst, rename_binder); };
  for (const auto& node : formula) {
    items.push_back(std::visit(
        [&](const auto& n) -> NodePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, Atom>) {
            if (const auto* c = std::get_if<Atom::Compare>(&n.node)) {
              return make_compare(c->rel, substitute(c->lhs, subst), substitute(c->rhs, subst));
            }
            if (const auto* c = std::get_if<Atom::Call>(&n.node)) {
              std::vector<TermPtr> args;
              for (const auto& a : c->args) args.push_back(substitute(a, subst));
              return make_call(c->procedure, std::move(args));
            }
            return node;
          } else if constexpr (std::is_same_v<T, Node::Or>) {
            return make_or(sub(n.left), sub(n.right));
          } else if constexpr (std::is_same_v<T, Node::And>) {
            return make_and(sub(n.left), sub(n.right));
          } else if constexpr (std::is_same_v<T, Node::Implies>) {
            return make_implies(sub(n.antecedent), sub(n.consequent));
          } else if constexpr (std::is_same_v<T, Node::Not>) {
            return make_not(sub(n.body));
          } else {
            std::string var = rename_binder(n.var);
            Substitution inner = subst;
            Scalar sort = Scalar::Int;
            if constexpr (std::is_same_v<T, Node::Quantified>) sort = n.sort;
            inner[n.var] = make_var(var, sort);
            Formula body = instantiate(n.body, inner, rename_binder);
            if constexpr (std::is_same_v<T, Node::Quantified>) {
              return std::make_shared<Node>(Node{Node::Quantified{n.quantifier, var, n.sort, std::move(body)}});
            } else {
              return make_bounded(n.quantifier, var, substitute(n.lo, subst), substitute(n.hi, subst),
                                  std::move(body));
            }
          }
        },
        node->node));
  }
  return Formula(std::move(items));
}

}  // namespace fap
