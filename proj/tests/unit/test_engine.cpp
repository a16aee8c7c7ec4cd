#include <doctest.h>

#include "fap/driver.hpp"
#include "fap/engine.hpp"
#include "fap/oracle.hpp"
#include "helpers.hpp"

using namespace fap;
using namespace fap::test;

using Strings = std::vector<std::string>;

namespace {

const char* kFormula1 = "(x = 2 OR x = 3) AND (y = x + 1 OR 2 = y) AND 2 * x = 3 * y";

TreeStatus status(const std::string& query, EngineConfig cfg = {}) { return run(query, cfg).status; }

SubtreeStatus subtree(const std::string& f) {
  ProgramUnit u = program(f);
  return eval_subtree_status(u, u.query, {}, {});
}

}  // namespace

TEST_CASE("two disjunctions and an equation: three failures, then x/3, y/2") {
  SolveResult r = run(kFormula1);
  CHECK(kinds(r) == Strings{"fail", "fail", "fail", "success {x/3, y/2}"});
  CHECK(r.status == TreeStatus::Successful);
  CHECK(r.steps == 14);
}

TEST_CASE("conjunction is sequential") {
  CHECK(kinds(run("x = 0 AND x < 1")) == Strings{"success {x/0}"});
  CHECK(kinds(run("x < 1 AND x = 0")) == Strings{"error (atom-not-evaluable)"});
}

TEST_CASE("empty query succeeds with the initial valuation") {
  ProgramUnit u = parse("var x : int; query ;");
  SolveResult r = solve(u, val({{"x", 4}}), {});
  CHECK(kinds(r) == Strings{"success {x/4}"});
  CHECK(kinds(run("TRUE")) == Strings{"success {}"});
}

TEST_CASE("negation of a non-closed conjunction") {
  CHECK(kinds(run("NOT (x = 0 AND x = 1)")) == Strings{"error (negand-undetermined)"});
  CHECK(kinds(run("NOT (x = 0 AND x = 1)", liberal())) == Strings{"success {}"});
  CHECK(kinds(run("NOT x = 0 OR NOT x = 1")) ==
        Strings{"error (negand-undetermined)", "error (negand-undetermined)"});
  SolveResult lib = run("NOT x = 0 OR NOT x = 1", liberal());
  CHECK(lib.status == TreeStatus::Undetermined);
  CHECK(successes(lib).empty());
}

TEST_CASE("subtree status") {
  CHECK(subtree("0 = 1 AND x = y").status == TreeStatus::Failed);
  SubtreeStatus s = subtree("0 = 0 OR x = y");
  CHECK(s.status == TreeStatus::Successful);
  REQUIRE(s.witness);
  CHECK(s.witness->empty());
  CHECK(subtree("x = y").status == TreeStatus::Undetermined);
  // Failure needs an exhaustive search: a later error makes it undetermined.
  CHECK(subtree("0 = 1 OR x < 2").status == TreeStatus::Undetermined);
  SubtreeStatus w = subtree("x = 2 OR x = 3");
  REQUIRE(w.witness);
  CHECK(*w.witness == val({{"x", 2}}));
}

TEST_CASE("negation") {
  CHECK(kinds(run("NOT (0 = 1 AND x = y) AND x = 5", liberal())) == Strings{"success {x/5}"});
  CHECK(kinds(run("NOT (0 = 0 OR x = y)", liberal())) == Strings{"fail"});
  CHECK(kinds(run("NOT x = 0")) == Strings{"error (negand-undetermined)"});
  CHECK(kinds(run("x = 1 AND NOT x = 0")) == Strings{"success {x/1}"});
  CHECK(kinds(run("x = 0 AND NOT x = 0")) == Strings{"fail"});
  // A success that binds a free variable of the negand does not refute it.
  CHECK(kinds(run("NOT x = 0", liberal())) == Strings{"error (negand-undetermined)"});
  // Negand errors propagate.
  CHECK(kinds(run("x = 1 AND NOT (x = 2 OR y < 1)")) == Strings{"error (negand-undetermined)"});
}

TEST_CASE("liberal negation and implication rewrites") {
  SolveResult guarded = run("x = 0 -> x < 1", liberal(ImplicationMode::Guarded));
  CHECK(guarded.status == TreeStatus::Successful);
  CHECK(successes(guarded) == std::vector<Valuation>{val({{"x", 0}})});

  SolveResult negor = run("x = 0 -> x < 1", liberal(ImplicationMode::NegOr));
  CHECK(successes(negor).empty());
  CHECK(negor.status == TreeStatus::Undetermined);

  // The guard keeps the continuation from running twice.
  CHECK(kinds(run("((x = 0 AND x = 1) -> 0 = 1) AND y = 5", liberal(ImplicationMode::Guarded))) ==
        Strings{"success {y/5}", "fail"});
  CHECK(kinds(run("((x = 0 AND x = 1) -> 0 = 0) AND y = 5", liberal(ImplicationMode::Guarded))) ==
        Strings{"success {y/5}", "fail"});
  CHECK(kinds(run("((x = 0 AND x = 1) -> 0 = 0) AND y = 5", liberal(ImplicationMode::NegOr))) ==
        Strings{"success {y/5}", "success {y/5}"});
  // ... and from finding x/0 here, which the plain rewrite does find.
  SolveResult missed = run("((x = 0 AND x = 1) -> x = 0) AND x < 1", liberal(ImplicationMode::Guarded));
  CHECK(missed.status == TreeStatus::Undetermined);
  SolveResult found = run("((x = 0 AND x = 1) -> x = 0) AND x < 1", liberal(ImplicationMode::NegOr));
  CHECK(successes(found) == std::vector<Valuation>{val({{"x", 0}})});

  const char* delicate = "(0 = 0 OR x < 1) -> 0 = 1";
  CHECK(status(delicate, liberal(ImplicationMode::NegOr)) == TreeStatus::Failed);
  CHECK(status(delicate, liberal(ImplicationMode::Guarded)) == TreeStatus::Undetermined);
  CHECK(status(delicate, liberal(ImplicationMode::Combined)) == TreeStatus::Undetermined);
  // Strict negation cannot refute the open antecedent.
  EngineConfig strict_neg;
  strict_neg.implication = ImplicationMode::NegOr;
  CHECK(status(delicate, strict_neg) == TreeStatus::Undetermined);
}

TEST_CASE("strict implication") {
  CHECK(kinds(run("x = 1 AND (x = 1 -> y = 2)")) == Strings{"success {x/1, y/2}"});
  CHECK(kinds(run("x = 3 AND (x = 1 -> y = 2)")) == Strings{"success {x/3}"});
  CHECK(kinds(run("x = 1 AND (x = 1 -> x = 2)")) == Strings{"fail"});
  CHECK(kinds(run("x < 1 -> TRUE")) == Strings{"error (antecedent-undetermined)"});
  // Relaxations: a failed antecedent need not be closed ...
  CHECK(kinds(run("(0 = 1 AND x = y) -> y = 2")) == Strings{"success {}"});
  // ... unless pedantic.
  EngineConfig pedantic;
  pedantic.pedantic = true;
  CHECK(kinds(run("(0 = 1 AND x = y) -> y = 2", pedantic)) == Strings{"error (antecedent-undetermined)"});
  // A success binding a free variable of the antecedent does not qualify.
  CHECK(kinds(run("x = 0 -> x < 1")) == Strings{"error (antecedent-undetermined)"});
  // Bindings made inside the antecedent are not kept.
  CHECK(kinds(run("(EXISTS z. z = 1) -> y = 2")) == Strings{"success {y/2}"});
}

TEST_CASE("existential quantifier") {
  CHECK(kinds(run("EXISTS z. (z = 3 AND x = z)")) == Strings{"success {x/3}"});
  EngineConfig internal;
  internal.report_internal_bindings = true;
  SolveResult r = run("EXISTS z. (z = 3 AND x = z)", internal);
  REQUIRE(r.leaves.size() == 1);
  CHECK(r.leaves[0].valuation.size() == 2);
  // The same binder met twice is renamed the second time.
  CHECK(kinds(run("(SOME i := 1 TO 2 DO EXISTS z. z = i END) AND x = 1")) ==
        Strings{"success {x/1}", "success {x/1}", "fail"});
  CHECK(kinds(run("FOR i := 1 TO 2 DO EXISTS z. z = i END")) == Strings{"success {}"});
  // Universal quantifiers over the integers are never determined.
  CHECK(status("FORALL z. z = z") == TreeStatus::Undetermined);
}

TEST_CASE("bounded quantifiers") {
  CHECK(kinds(run("SOME x := 5 TO 3 DO x = x END")) == Strings{"fail"});
  CHECK(kinds(run("FOR x := 5 TO 3 DO 0 = 1 END AND y = 1")) == Strings{"success {y/1}"});
  CHECK(kinds(run("SOME i := 1 TO 3 DO i = 2 END")) == Strings{"fail", "success {}", "fail", "fail"});
  EngineConfig internal;
  internal.report_internal_bindings = true;
  SolveResult r = run("SOME i := 1 TO 3 DO i = 2 END", internal);
  REQUIRE(successes(r).size() == 1);
  const Value* i = successes(r)[0].scalar(successes(r)[0].scalars().begin()->first);
  REQUIRE(i);
  CHECK(*i == Value{Integer(2)});
  CHECK(kinds(run("SOME i := 1 TO n DO i = 2 END")) == Strings{"error (unbounded-range)"});
  CHECK(kinds(run("FOR i := 1 TO 3 DO x = i END")) == Strings{"fail"});
  CHECK(kinds(run("FOR i := 1 TO 3 DO i < 4 END")) == Strings{"success {}"});
  CHECK(kinds(run("SOME i := 1 TO 3 DO x = i END")) ==
        Strings{"success {x/1}", "success {x/2}", "success {x/3}", "fail"});
  CHECK(kinds(run("n = 2 AND SOME i := 1 TO n DO i = 2 END")) == Strings{"fail", "success {n/2}", "fail"});
  CHECK(kinds(run("SOME i := 1 TO 1 DIV 0 DO TRUE END")) == Strings{"error (evaluation-fault)"});
}

TEST_CASE("procedures unfold by substitution") {
  CHECK(kinds(solve(parse("def p(x) := x = 3; query p(y);"), {}, {})) == Strings{"success {y/3}"});
  CHECK(kinds(solve(parse("def p(x) := x = 3; query p(3);"), {}, {})) == Strings{"success {}"});
  CHECK(kinds(solve(parse("def p(x) := x < 1; query p(y);"), {}, {})) == Strings{"error (atom-not-evaluable)"});
  // Bound variables of the body are renamed per call.
  ProgramUnit u = parse("def p(a) := EXISTS t. (t = a AND t > 0); query p(1) AND p(2) AND x = 1;");
  CHECK(kinds(solve(u, {}, {})) == Strings{"success {x/1}"});
  // Argument capture.
  ProgramUnit cap = parse("def p(a) := EXISTS t. (t = 1 AND a = t + 1); query EXISTS t. (t = 5 AND p(t));");
  CHECK(kinds(solve(cap, {}, {})) == Strings{"fail"});
}

TEST_CASE("arrays") {
  ProgramUnit u = parse("array a[1..3] : int; query FOR i := 1 TO 3 DO a[i] = i * i END;");
  CHECK(kinds(solve(u, {}, {})) == Strings{"success {a[1]/1, a[2]/4, a[3]/9}"});
  ProgramUnit oob = parse("array a[1..3] : int; query a[4] = 1;");
  CHECK(kinds(solve(oob, {}, {})) == Strings{"error (evaluation-fault)"});
  ProgramUnit neg = parse("array a[1..3] : int; query NOT a[1] = 2;");
  CHECK(kinds(solve(neg, {}, liberal())) == Strings{"error (negand-undetermined)"});
}

TEST_CASE("error leaves do not stop the search") {
  CHECK(kinds(run("x < 1 OR x = 1")) == Strings{"error (atom-not-evaluable)", "success {x/1}"});
  CHECK(run("x < 1 OR x = 1").status == TreeStatus::Successful);
  CHECK(run("x < 1 OR 0 = 1").status == TreeStatus::Undetermined);
}

TEST_CASE("step budget and solution limit") {
  EngineConfig cfg;
  cfg.max_steps = 3;
  SolveResult r = run(kFormula1, cfg);
  REQUIRE_FALSE(r.leaves.empty());
  CHECK(to_string(r.leaves.back()) == "error (step-budget)");
  CHECK(r.status == TreeStatus::Undetermined);

  EngineConfig big;
  big.max_steps = 10'000;
  CHECK(run("SOME i := 1 TO 1000000 DO 0 = 1 END", big).status == TreeStatus::Undetermined);

  EngineConfig first;
  first.solution_limit = 2;
  CHECK(kinds(run("x = 1 OR x = 2 OR x = 3", first)) == Strings{"success {x/1}", "success {x/2}"});
  // The limit applies to the query only, not to negands.
  CHECK(kinds(run("NOT (0 = 1 OR 0 = 1 OR 0 = 0) OR y = 1", first)) == Strings{"fail", "success {y/1}"});
}

TEST_CASE("solver enumerates lazily") {
  ProgramUnit u = program("SOME i := 1 TO 1000000000 DO x = i END");
  Solver s(u, {}, {});
  for (int k = 1; k <= 3; ++k) {
    auto leaf = s.next();
    REQUIRE(leaf);
    CHECK(*leaf == Leaf::success(val({{"x", k}})));
  }
  CHECK(s.status() == TreeStatus::Successful);
  CHECK(s.steps() < 20);
}

TEST_CASE("initial valuations are validated") {
  ProgramUnit u = parse("var b : bool; array a[1..2] : int; query x = 1 AND b = TRUE;");
  CHECK_THROWS_AS(Solver(u, val({{"nope", 1}}), {}), std::invalid_argument);
  CHECK_THROWS_AS(Solver(u, Valuation{}.extended("x", Value{true}), {}), std::invalid_argument);
  CHECK_THROWS_AS(Solver(u, Valuation{}.extended(CellRef{"a", {3}}, Value{Integer(1)}), {}), std::invalid_argument);
  CHECK_THROWS_AS(Solver(u, Valuation{}.extended(CellRef{"c", {1}}, Value{Integer(1)}), {}), std::invalid_argument);
  CHECK_NOTHROW(Solver(u, Valuation{}.extended("b", Value{true}), {}));
}

TEST_CASE("original binder names") {
  CHECK(original_binder("#3.%1.x") == "%1.x");
  CHECK(original_binder("#3.#12.%1.x") == "%1.x");
  CHECK(original_binder("x") == "x");
}

TEST_CASE("trace of the two-disjunction query") {
  Trace t = trace(program(kFormula1), {}, {});
  CHECK(t.root.tag == "disjunction");
  CHECK(t.root.children.size() == 2);
  CHECK(t.root.size() == 18);
  CHECK(t.result.steps == 14);
  std::vector<std::string> leaves;
  std::function<void(const TraceNode&)> walk = [&](const TraceNode& n) {
    if (n.leaf) leaves.push_back(to_string(*n.leaf));
    for (const auto& c : n.children) walk(c);
  };
  walk(t.root);
  CHECK(leaves == kinds(run(kFormula1)));
}

TEST_CASE("trace of trivial queries") {
  Trace empty = trace(program(""), {}, {});
  CHECK(empty.root.tag == "empty");
  REQUIRE(empty.root.children.size() == 1);
  CHECK(*empty.root.children[0].leaf == Leaf::success({}));

  Trace tf = trace(program("TRUE AND FALSE"), {}, {});
  CHECK(tf.root.tag == "atom");
  REQUIRE(tf.root.children.size() == 1);
  REQUIRE(tf.root.children[0].children.size() == 1);
  CHECK(*tf.root.children[0].children[0].leaf == Leaf::fail());
  CHECK(tf.root.size() == 3);
}

TEST_CASE("trace leaves match the solver on generated programs") {
  for (std::uint64_t seed = 1; seed <= 200; ++seed) {
    GeneratorConfig g;
    g.seed = seed;
    ProgramUnit u = generate(g);
    Trace t = trace(u, {}, liberal(ImplicationMode::Combined));
    SolveResult r = solve(u, {}, liberal(ImplicationMode::Combined));
    std::vector<Leaf> leaves;
    std::function<void(const TraceNode&)> walk = [&](const TraceNode& n) {
      if (n.leaf) leaves.push_back(*n.leaf);
      for (const auto& c : n.children) walk(c);
    };
    walk(t.root);
    CHECK(leaves == r.leaves);
    CHECK(t.result.steps == r.steps);
  }
}
