#include <random>

#include "fap/oracle.hpp"
#include "fap/syntax.hpp"

namespace fap {

namespace {

class Generator {
 public:
  explicit Generator(const GeneratorConfig& cfg) : cfg_(cfg), rng_(cfg.seed) {}

  ProgramUnit program() {
    ProgramUnit unit;
    if (cfg_.max_depth > 2 && chance(1, 3)) {
      ProcedureDef def;
      def.name = "p";
      def.params = {{"a", Scalar::Int}, {"b", Scalar::Int}};
      scope_ = {"a", "b"};
      def.body = formula(2);
      unit.procedures.push_back(std::move(def));
      has_procedure_ = true;
    }
    scope_ = {"x", "y", "z"};
    Formula body = formula(cfg_.max_depth);
    std::vector<NodePtr> items;
    for (const auto& v : free_vars(body)) {
      if (!chance(cfg_.binder_percent, 100)) continue;
      NodePtr eq = make_eq(make_var(v), constant());
      items.push_back(cfg_.max_depth > 1 && chance(1, 2) ? make_or(Formula{eq}, Formula{make_eq(make_var(v), constant())})
                                                          : eq);
    }
    items.insert(items.end(), body.begin(), body.end());
    unit.query = Formula(std::move(items));
    for (const auto& v : free_vars(unit.query)) unit.query_free_vars.push_back({v, Scalar::Int});
    return unit;
  }

 private:
  int uniform(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(int num, int den) { return uniform(1, den) <= num; }

  int pick(std::initializer_list<int> weights) {
    int total = 0;
    for (int w : weights) total += w;
    int r = uniform(1, std::max(total, 1));
    int i = 0;
    for (int w : weights) {
      if (r <= w) return i;
      r -= w;
      ++i;
    }
    return 0;
  }

  TermPtr constant() {
    int lo = static_cast<int>(cfg_.domain.lo);
    int hi = static_cast<int>(cfg_.domain.hi);
    return make_int(uniform(lo, hi));
  }

  TermPtr variable() { return make_var(scope_[static_cast<std::size_t>(uniform(0, static_cast<int>(scope_.size()) - 1))]); }

  TermPtr simple() { return chance(2, 3) ? variable() : constant(); }

  TermPtr compound() {
    static constexpr FuncOp ops[] = {FuncOp::Add, FuncOp::Sub, FuncOp::Mul};
    return make_app(ops[uniform(0, 2)], simple(), simple());
  }

  TermPtr any_term() { return chance(1, 3) ? compound() : simple(); }

  NodePtr atom() {
    switch (pick({cfg_.assignment_weight, cfg_.relation_weight, cfg_.compound_weight, cfg_.constant_weight})) {
      case 0: {
        // Both sides variable or constant, so any binding stays in the domain.
        TermPtr v = variable();
        TermPtr w = simple();
        return chance(1, 4) ? make_eq(w, v) : make_eq(v, w);
      }
      case 1: {
        static constexpr Relation rels[] = {Relation::Ne, Relation::Lt, Relation::Le, Relation::Gt, Relation::Ge};
        return make_compare(rels[uniform(0, 4)], any_term(), any_term());
      }
      case 2:
        return make_eq(compound(), compound());
      default:
        return make_truth(chance(2, 3));
    }
  }

  Formula formula(int depth) {
    if (depth <= 1) return Formula{atom()};
    if (chance(1, 4)) return Formula{atom()};
    int sub = depth - 1;
    switch (pick({cfg_.and_weight, cfg_.or_weight, cfg_.not_weight, cfg_.implies_weight, cfg_.bounded_weight,
                  has_procedure_ ? cfg_.call_weight : 0})) {
      case 0: {
        std::vector<NodePtr> items;
        int n = uniform(2, 3);
        for (int i = 0; i < n; ++i) {
          Formula f = formula(sub);
          items.insert(items.end(), f.begin(), f.end());
        }
        return Formula(std::move(items));
      }
      case 1:
        return Formula{make_or(formula(sub), formula(sub))};
      case 2:
        return Formula{make_not(formula(sub))};
      case 3:
        return Formula{make_implies(formula(sub), formula(sub))};
      case 4: {
        TermPtr lo;
        TermPtr hi;
        if (chance(1, 2)) {
          int a = uniform(static_cast<int>(cfg_.domain.lo), static_cast<int>(cfg_.domain.hi));
          int width = uniform(-1, cfg_.max_range_width - 1);
          int b = std::min(a + width, static_cast<int>(cfg_.domain.hi));
          lo = make_int(a);
          hi = make_int(b);
        } else {
          lo = simple();
          hi = simple();
        }
        std::string var = "i" + std::to_string(++bound_counter_);
        scope_.push_back(var);
        Formula body = formula(sub);
        scope_.pop_back();
        return Formula{make_bounded(chance(1, 2) ? Quantifier::Exists : Quantifier::Forall, var, lo, hi, body)};
      }
      default:
        return Formula{make_call("p", {simple(), simple()})};
    }
  }

  const GeneratorConfig& cfg_;
  std::mt19937_64 rng_;
  std::vector<std::string> scope_;
  bool has_procedure_ = false;
  int bound_counter_ = 0;
};

}  // namespace

ProgramUnit generate(const GeneratorConfig& config) { return Generator(config).program(); }

}  // namespace fap
