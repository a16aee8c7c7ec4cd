#include "fap/engine.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "fap/syntax.hpp"

namespace fap {

std::string_view to_string(NegationMode m) { return m == NegationMode::Strict ? "strict" : "liberal"; }

std::string_view to_string(ImplicationMode m) {
  switch (m) {
    case ImplicationMode::Strict: return "strict";
    case ImplicationMode::NegOr: return "negor";
    case ImplicationMode::Guarded: return "guarded";
    case ImplicationMode::Combined: return "combined";
  }
  return "?";
}

std::string_view to_string(ErrorCause c) {
  switch (c) {
    case ErrorCause::AtomNotEvaluable: return "atom-not-evaluable";
    case ErrorCause::NegandUndetermined: return "negand-undetermined";
    case ErrorCause::AntecedentUndetermined: return "antecedent-undetermined";
    case ErrorCause::UnboundedRange: return "unbounded-range";
    case ErrorCause::EvaluationFault: return "evaluation-fault";
    case ErrorCause::StepBudget: return "step-budget";
  }
  return "?";
}

std::string_view to_string(TreeStatus s) {
  switch (s) {
    case TreeStatus::Successful: return "SUCCESSFUL";
    case TreeStatus::Failed: return "FAILED";
    case TreeStatus::Undetermined: return "UNDETERMINED";
  }
  return "?";
}

std::string to_string(const Leaf& leaf) {
  switch (leaf.kind) {
    case Leaf::Kind::Success: return "success " + to_string(leaf.valuation);
    case Leaf::Kind::Fail: return "fail";
    case Leaf::Kind::Error: return "error (" + std::string(to_string(leaf.cause)) + ")";
  }
  return "?";
}

TreeStatus status_of(std::span<const Leaf> leaves) {
  bool error = false;
  for (const auto& l : leaves) {
    if (l.kind == Leaf::Kind::Success) return TreeStatus::Successful;
    if (l.kind == Leaf::Kind::Error) error = true;
  }
  return error ? TreeStatus::Undetermined : TreeStatus::Failed;
}

std::string original_binder(std::string_view name) {
  while (name.size() > 1 && name[0] == '#') {
    std::size_t dot = name.find('.');
    if (dot == std::string_view::npos) break;
    name.remove_prefix(dot + 1);
  }
  return std::string(name);
}

std::size_t TraceNode::size() const {
  std::size_t n = 1;
  for (const auto& c : children) n += c.size();
  return n;
}

// ---------------------------------------------------------------------------

namespace {

struct StepBudgetExceeded {};

using Key = std::variant<std::string, CellRef>;

// Current bindings with an undo trail.
class Store final : public Bindings {
 public:
  explicit Store(const Valuation& base) : scalars_(base.scalars()), cells_(base.cells()) {}

  const Value* scalar(std::string_view name) const override {
    auto it = scalars_.find(name);
    return it == scalars_.end() ? nullptr : &it->second;
  }
  const Value* cell(const CellRef& c) const override {
    auto it = cells_.find(c);
    return it == cells_.end() ? nullptr : &it->second;
  }

  void bind(const Key& key, Value v) {
    if (const auto* name = std::get_if<std::string>(&key)) {
      scalars_.emplace(*name, std::move(v));
    } else {
      cells_.emplace(std::get<CellRef>(key), std::move(v));
    }
    trail_.push_back(key);
  }

  std::size_t mark() const { return trail_.size(); }

  void undo(std::size_t mark) {
    while (trail_.size() > mark) {
      const Key& k = trail_.back();
      if (const auto* name = std::get_if<std::string>(&k)) {
        scalars_.erase(*name);
      } else {
        cells_.erase(std::get<CellRef>(k));
      }
      trail_.pop_back();
    }
  }

  std::span<const Key> since(std::size_t mark) const { return {trail_.data() + mark, trail_.size() - mark}; }

  Valuation snapshot() const { return Valuation(scalars_, cells_); }

 private:
  Valuation::ScalarMap scalars_;
  Valuation::CellMap cells_;
  std::vector<Key> trail_;
};

// The remaining conjunction, as a linked stack of partially consumed lists.
struct Cont;
using ContPtr = std::shared_ptr<const Cont>;
struct Cont {
  Formula f;
  std::size_t idx;
  ContPtr next;
};

ContPtr push(const Formula& f, ContPtr next) {
  if (f.empty()) return next;
  return std::make_shared<const Cont>(Cont{f, 0, std::move(next)});
}

ContPtr rest_of(const ContPtr& c) {
  if (c->idx + 1 < c->f.size()) return std::make_shared<const Cont>(Cont{c->f, c->idx + 1, c->next});
  return c->next;
}

Formula flatten(ContPtr c) {
  std::vector<NodePtr> items;
  for (; c; c = c->next) items.insert(items.end(), c->f.begin() + static_cast<std::ptrdiff_t>(c->idx), c->f.end());
  return Formula(std::move(items));
}

struct TraceRec {
  int parent;
  std::string formula;
  Valuation valuation;
  std::string tag;
  std::string note;
  std::optional<Leaf> leaf;
};

struct Outcome {
  Leaf::Kind kind;
  ErrorCause cause = ErrorCause::AtomNotEvaluable;
};

}  // namespace

class Machine {
 public:
  Machine(ProgramUnit unit, const Valuation& alpha0, EngineConfig cfg)
      : unit_(std::move(unit)), cfg_(std::move(cfg)), store_(alpha0) {}

  const ProgramUnit& unit() const { return unit_; }
  const EngineConfig& config() const { return cfg_; }
  Store& store() { return store_; }
  std::uint64_t steps() const { return steps_; }
  std::vector<TraceRec>* arena = nullptr;

  void tick() {
    ++steps_;
    if (cfg_.max_steps && steps_ > *cfg_.max_steps) throw StepBudgetExceeded{};
  }

  std::string fresh(const std::string& name) {
    return "#" + std::to_string(++fresh_) + "." + original_binder(name);
  }

  struct SubResult {
    TreeStatus status;
    bool qualified = false;  // success witness binds none of `watched`
    std::optional<Valuation> witness;
  };

  SubResult subtree(const Formula& f, const std::set<std::string>* watched);

  // Top-level state.
  std::unique_ptr<class Search> top;
  std::vector<Leaf> leaves;
  std::uint64_t successes = 0;
  bool finished = false;

  Leaf report(const Outcome& o) {
    if (o.kind == Leaf::Kind::Fail) return Leaf::fail();
    if (o.kind == Leaf::Kind::Error) return Leaf::error(o.cause);
    if (cfg_.report_internal_bindings) return Leaf::success(store_.snapshot());
    Valuation::ScalarMap scalars;
    for (const auto& p : unit_.query_free_vars) {
      if (const Value* v = store_.scalar(p.name)) scalars.emplace(p.name, *v);
    }
    return Leaf::success(Valuation(std::move(scalars), store_.snapshot().cells()));
  }

 private:
  ProgramUnit unit_;
  EngineConfig cfg_;
  Store store_;
  std::uint64_t steps_ = 0;
  std::uint64_t fresh_ = 0;
};

namespace {

std::set<std::string> unbound_free(const Formula& f, const Store& store) {
  std::set<std::string> out;
  for (auto& v : free_vars(f)) {
    if (!store.scalar(v)) out.insert(std::move(v));
  }
  return out;
}

}  // namespace

class Search {
 public:
  Search(Machine& m, ContPtr start, int trace_parent)
      : m_(m), base_(m.store().mark()), cur_(std::move(start)), parent_(trace_parent) {}

  std::size_t base() const { return base_; }

  // Next leaf; the store reflects the leaf's branch until the next call.
  std::optional<Outcome> next() {
    if (done_) return std::nullopt;
    if (leaf_pending_) {
      leaf_pending_ = false;
      if (!backtrack()) return std::nullopt;
    }
    while (true) {
      if (auto o = step()) {
        leaf_pending_ = true;
        return o;
      }
    }
  }

  void unwind() {
    m_.store().undo(base_);
    choices_.clear();
    done_ = true;
  }

  // Records a leaf under the current trace parent.
  void trace_leaf(const Leaf& leaf) {
    if (!tracing()) return;
    m_.arena->push_back({parent_, "", {}, "leaf", "", leaf});
  }

 private:
  struct Choice {
    std::size_t mark;
    ContPtr alt;
    int parent;
  };

  bool tracing() const { return m_.arena && parent_ != kNoTrace; }

  bool backtrack() {
    if (choices_.empty()) {
      unwind();
      return false;
    }
    Choice c = std::move(choices_.back());
    choices_.pop_back();
    m_.store().undo(c.mark);
    cur_ = std::move(c.alt);
    parent_ = c.parent;
    return true;
  }

  void choose(ContPtr alt) { choices_.push_back({m_.store().mark(), std::move(alt), parent_}); }

  int open_node() {
    if (!tracing()) return parent_;
    m_.arena->push_back({parent_, cur_ ? to_string(flatten(cur_)) : std::string(), m_.store().snapshot(), "", "", std::nullopt});
    return static_cast<int>(m_.arena->size() - 1);
  }

  void label(int node, std::string tag, std::string note = {}) {
    if (!tracing()) return;
    (*m_.arena)[static_cast<std::size_t>(node)].tag = std::move(tag);
    (*m_.arena)[static_cast<std::size_t>(node)].note = std::move(note);
  }

  static Outcome fail() { return {Leaf::Kind::Fail}; }
  static Outcome error(ErrorCause c) { return {Leaf::Kind::Error, c}; }

  std::optional<Outcome> step();
  std::optional<Outcome> atom(const Atom& a, ContPtr rest, int node);
  std::optional<Outcome> negation(const Formula& negand, ContPtr rest, int node);
  std::optional<Outcome> implication(const Node::Implies& n, ContPtr rest, int node);
  std::optional<Outcome> bounded(const Node::Bounded& n, ContPtr rest, int node);

  // Renames `var` in `body` if it is already bound.
  std::pair<std::string, Formula> freshen(const std::string& var, Scalar sort, const Formula& body) {
    if (!m_.store().scalar(var)) return {var, body};
    std::string y = m_.fresh(var);
    Substitution s{{var, make_var(y, sort)}};
    return {y, instantiate(body, s, [](const std::string& b) { return b; })};
  }

  static constexpr int kNoTrace = -2;

  Machine& m_;
  std::size_t base_;
  ContPtr cur_;
  int parent_;
  std::vector<Choice> choices_;
  bool leaf_pending_ = false;
  bool done_ = false;

  friend class Machine;
};

std::optional<Outcome> Search::step() {
  m_.tick();
  int node = open_node();
  parent_ = node;
  if (!cur_) {
    label(node, "empty");
    return Outcome{Leaf::Kind::Success};
  }
  const NodePtr head = cur_->f[cur_->idx];
  ContPtr rest = rest_of(cur_);
  return std::visit(
      [&](const auto& n) -> std::optional<Outcome> {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Atom>) {
          return atom(n, std::move(rest), node);
        } else if constexpr (std::is_same_v<T, Node::Or>) {
          label(node, "disjunction");
          choose(push(n.right, rest));
          cur_ = push(n.left, std::move(rest));
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Node::And>) {
          label(node, "conjunction");
          cur_ = push(n.left, push(n.right, std::move(rest)));
          return std::nullopt;
        } else if constexpr (std::is_same_v<T, Node::Implies>) {
          return implication(n, std::move(rest), node);
        } else if constexpr (std::is_same_v<T, Node::Not>) {
          return negation(n.body, std::move(rest), node);
        } else if constexpr (std::is_same_v<T, Node::Quantified>) {
          if (n.quantifier == Quantifier::Forall) {
            // Only reachable for unnormalized input: FORALL x φ = NOT EXISTS x NOT φ.
            label(node, "negation", "universal quantifier");
            Formula neg{make_not(Formula{make_exists(n.var, n.sort, Formula{make_not(n.body)})})};
            cur_ = push(neg, std::move(rest));
            return std::nullopt;
          }
          auto [var, body] = freshen(n.var, n.sort, n.body);
          label(node, "exists", var);
          cur_ = push(body, std::move(rest));
          return std::nullopt;
        } else {
          return bounded(n, std::move(rest), node);
        }
      },
      head->node);
}

std::optional<Outcome> Search::atom(const Atom& a, ContPtr rest, int node) {
  if (const auto* call = std::get_if<Atom::Call>(&a.node)) {
    const ProcedureDef* def = m_.unit().find_procedure(call->procedure);
    if (!def) throw std::logic_error("unknown procedure '" + call->procedure + "'");
    Substitution s;
    for (std::size_t i = 0; i < def->params.size(); ++i) s[def->params[i].name] = call->args[i];
    Formula body = instantiate(def->body, s, [&](const std::string& b) { return m_.fresh(b); });
    label(node, "procedure-unfold", call->procedure);
    cur_ = push(body, std::move(rest));
    return std::nullopt;
  }
  AtomClass c = classify_atom(a, m_.store());
  switch (c.kind) {
    case AtomClass::Kind::ClosedTrue:
      label(node, "atom", "true");
      cur_ = std::move(rest);
      return std::nullopt;
    case AtomClass::Kind::ClosedFalse:
      label(node, "atom", "false");
      return fail();
    case AtomClass::Kind::Assignment: {
      std::string target = std::holds_alternative<std::string>(*c.target) ? std::get<std::string>(*c.target)
                                                                          : to_string(std::get<CellRef>(*c.target));
      label(node, "atom", "assign " + target + "/" + to_string(c.value));
      m_.store().bind(*c.target, c.value);
      cur_ = std::move(rest);
      return std::nullopt;
    }
    case AtomClass::Kind::NotEvaluable:
      break;
  }
  if (c.fault) {
    label(node, "atom", *c.fault);
    return error(ErrorCause::EvaluationFault);
  }
  label(node, "atom", "not evaluable");
  return error(ErrorCause::AtomNotEvaluable);
}

std::optional<Outcome> Search::negation(const Formula& negand, ContPtr rest, int node) {
  bool liberal = m_.config().negation == NegationMode::Liberal;
  std::set<std::string> watched = unbound_free(negand, m_.store());
  label(node, liberal ? "liberal-neg" : "negation");
  if (!liberal && !watched.empty()) {
    label(node, "negation", "negand not closed");
    return error(ErrorCause::NegandUndetermined);
  }
  Machine::SubResult r = m_.subtree(negand, &watched);
  if (r.status == TreeStatus::Failed) {
    label(node, liberal ? "liberal-neg" : "negation", "negand failed");
    cur_ = std::move(rest);
    return std::nullopt;
  }
  if (r.status == TreeStatus::Successful && r.qualified) {
    label(node, liberal ? "liberal-neg" : "negation", "negand successful");
    return fail();
  }
  label(node, liberal ? "liberal-neg" : "negation", "negand undetermined");
  return error(ErrorCause::NegandUndetermined);
}

std::optional<Outcome> Search::implication(const Node::Implies& n, ContPtr rest, int node) {
  const Formula& a = n.antecedent;
  const Formula& b = n.consequent;
  switch (m_.config().implication) {
    case ImplicationMode::Strict:
      break;
    case ImplicationMode::NegOr:
      label(node, "implication-rewrite", "NOT a OR b");
      cur_ = push(Formula{make_or(Formula{make_not(a)}, b)}, std::move(rest));
      return std::nullopt;
    case ImplicationMode::Guarded:
      label(node, "implication-rewrite", "NOT a OR (a AND b)");
      cur_ = push(Formula{make_or(Formula{make_not(a)}, concat(a, b))}, std::move(rest));
      return std::nullopt;
    case ImplicationMode::Combined:
      label(node, "implication-rewrite", "NOT a OR b OR (a AND b)");
      cur_ = push(Formula{make_or(Formula{make_not(a)}, Formula{make_or(b, concat(a, b))})}, std::move(rest));
      return std::nullopt;
  }
  std::set<std::string> watched = unbound_free(a, m_.store());
  label(node, "implication");
  if (m_.config().pedantic && !watched.empty()) {
    label(node, "implication", "antecedent not closed");
    return error(ErrorCause::AntecedentUndetermined);
  }
  Machine::SubResult r = m_.subtree(a, &watched);
  if (r.status == TreeStatus::Failed) {
    label(node, "implication", "antecedent failed");
    cur_ = std::move(rest);
    return std::nullopt;
  }
  if (r.status == TreeStatus::Successful && r.qualified) {
    label(node, "implication", "antecedent successful");
    cur_ = push(b, std::move(rest));
    return std::nullopt;
  }
  label(node, "implication", "antecedent undetermined");
  return error(ErrorCause::AntecedentUndetermined);
}

std::optional<Outcome> Search::bounded(const Node::Bounded& n, ContPtr rest, int node) {
  bool exists = n.quantifier == Quantifier::Exists;
  std::string tag = exists ? "bounded-exists" : "bounded-forall";
  if (!is_closed(*n.lo, m_.store()) || !is_closed(*n.hi, m_.store())) {
    label(node, tag, "bounds not closed");
    return error(ErrorCause::UnboundedRange);
  }
  Integer lo;
  Integer hi;
  try {
    lo = std::get<Integer>(eval_term(*n.lo, m_.store()));
    hi = std::get<Integer>(eval_term(*n.hi, m_.store()));
  } catch (const EvalFault& e) {
    label(node, tag, e.what());
    return error(ErrorCause::EvaluationFault);
  }
  if (lo > hi) {
    label(node, tag, "empty range");
    if (exists) return fail();
    cur_ = std::move(rest);
    return std::nullopt;
  }
  auto [var, body] = freshen(n.var, Scalar::Int, n.body);
  label(node, tag, var + " := " + to_string(lo));
  m_.store().bind(var, Value{lo});
  Formula remaining{make_bounded(n.quantifier, var, make_int(lo + 1), make_int(hi), body)};
  if (exists) {
    choose(push(remaining, rest));
    cur_ = push(body, std::move(rest));
  } else {
    cur_ = push(body, push(remaining, std::move(rest)));
  }
  return std::nullopt;
}

Machine::SubResult Machine::subtree(const Formula& f, const std::set<std::string>* watched) {
  Search s(*this, push(f, nullptr), Search::kNoTrace);
  bool success = false;
  bool error = false;
  std::optional<Valuation> first;
  while (auto o = s.next()) {
    if (o->kind == Leaf::Kind::Success) {
      bool ok = true;
      if (watched) {
        for (const auto& k : store_.since(s.base())) {
          if (std::holds_alternative<CellRef>(k) || watched->count(std::get<std::string>(k))) {
            ok = false;
            break;
          }
        }
      }
      if (!success) first = store_.snapshot();
      success = true;
      if (ok || !watched) {
        s.unwind();
        return {TreeStatus::Successful, true, std::move(first)};
      }
    } else if (o->kind == Leaf::Kind::Error) {
      error = true;
    }
  }
  if (success) return {TreeStatus::Successful, false, std::move(first)};
  return {error ? TreeStatus::Undetermined : TreeStatus::Failed, false, std::nullopt};
}

// ---------------------------------------------------------------------------

namespace {

void validate(const ProgramUnit& unit, const Valuation& alpha0) {
  for (const auto& [name, value] : alpha0.scalars()) {
    auto sort = unit.variable_sort(name);
    if (!sort) throw std::invalid_argument("'" + name + "' is not a free variable of the query");
    bool is_bool = std::holds_alternative<bool>(value);
    if (is_bool != (*sort == Scalar::Bool)) {
      throw std::invalid_argument("'" + name + "' expects a value of sort " + std::string(to_string(*sort)));
    }
  }
  for (const auto& [cell, value] : alpha0.cells()) {
    const ArrayDecl* decl = unit.find_array(cell.array);
    if (!decl) throw std::invalid_argument("'" + cell.array + "' is not a declared array");
    if (!decl->contains(cell.index)) throw std::invalid_argument(to_string(cell) + " is out of range");
    bool is_bool = std::holds_alternative<bool>(value);
    if (is_bool != (decl->element == Scalar::Bool)) {
      throw std::invalid_argument(to_string(cell) + " expects a value of sort " +
                                  std::string(to_string(decl->element)));
    }
  }
}

std::unique_ptr<Machine> start(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config,
                               std::vector<TraceRec>* arena) {
  validate(unit, alpha0);
  auto m = std::make_unique<Machine>(normalize(unit), alpha0, config);
  m->arena = arena;
  m->top = std::make_unique<Search>(*m, push(m->unit().query, nullptr), arena ? -1 : -2);
  return m;
}

std::optional<Leaf> advance(Machine& m) {
  if (m.finished) return std::nullopt;
  if (m.config().solution_limit && m.successes >= *m.config().solution_limit) {
    m.finished = true;
    return std::nullopt;
  }
  std::optional<Leaf> leaf;
  try {
    auto o = m.top->next();
    if (!o) {
      m.finished = true;
      return std::nullopt;
    }
    leaf = m.report(*o);
  } catch (const StepBudgetExceeded&) {
    leaf = Leaf::error(ErrorCause::StepBudget);
    m.finished = true;
  }
  m.top->trace_leaf(*leaf);
  if (leaf->kind == Leaf::Kind::Success) ++m.successes;
  m.leaves.push_back(*leaf);
  return leaf;
}

}  // namespace

Solver::Solver(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config)
    : machine_(start(unit, alpha0, config, nullptr)) {}
Solver::~Solver() = default;
Solver::Solver(Solver&&) noexcept = default;
Solver& Solver::operator=(Solver&&) noexcept = default;

std::optional<Leaf> Solver::next() { return advance(*machine_); }
TreeStatus Solver::status() const { return status_of(machine_->leaves); }
std::uint64_t Solver::steps() const { return machine_->steps(); }

SolveResult solve(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config) {
  Solver s(unit, alpha0, config);
  SolveResult out;
  while (auto leaf = s.next()) out.leaves.push_back(std::move(*leaf));
  out.status = status_of(out.leaves);
  out.steps = s.steps();
  return out;
}

SubtreeStatus eval_subtree_status(const ProgramUnit& unit, const Formula& f, const Valuation& alpha,
                                  const EngineConfig& config) {
  ProgramUnit u = unit;
  u.query = f;
  Machine m(normalize(u), alpha, config);
  try {
    Machine::SubResult r = m.subtree(m.unit().query, nullptr);
    return {r.status, std::move(r.witness)};
  } catch (const StepBudgetExceeded&) {
    return {TreeStatus::Undetermined, std::nullopt};
  }
}

Trace trace(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config) {
  std::vector<TraceRec> arena;
  auto m = start(unit, alpha0, config, &arena);
  Trace out;
  while (auto leaf = advance(*m)) out.result.leaves.push_back(std::move(*leaf));
  out.result.status = status_of(out.result.leaves);
  out.result.steps = m->steps();

  std::vector<std::vector<std::size_t>> kids(arena.size());
  std::vector<std::size_t> roots;
  for (std::size_t i = 0; i < arena.size(); ++i) {
    if (arena[i].parent < 0) {
      roots.push_back(i);
    } else {
      kids[static_cast<std::size_t>(arena[i].parent)].push_back(i);
    }
  }
  std::function<TraceNode(std::size_t)> build = [&](std::size_t i) {
    TraceRec& r = arena[i];
    TraceNode n{std::move(r.formula), std::move(r.valuation), std::move(r.tag), std::move(r.note), std::move(r.leaf), {}};
    for (std::size_t k : kids[i]) n.children.push_back(build(k));
    return n;
  };
  if (roots.size() == 1) {
    out.root = build(roots.front());
  } else {
    // Only when the budget runs out before the first step.
    out.root.tag = "root";
    out.root.formula = to_string(normalize(unit).query);
    out.root.valuation = alpha0;
    for (std::size_t r : roots) out.root.children.push_back(build(r));
  }
  return out;
}

}  // namespace fap
