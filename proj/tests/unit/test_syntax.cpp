#include <doctest.h>

#include <set>

#include "fap/oracle.hpp"
#include "fap/syntax.hpp"
#include "helpers.hpp"

using namespace fap;

namespace {

template <class T>
bool is(const NodePtr& n) {
  return std::holds_alternative<T>(n->node);
}

ParseError::Kind error_kind(const std::string& src) {
  try {
    parse(src);
  } catch (const ParseError& e) {
    return e.kind();
  }
  FAIL("expected a parse error for: " << src);
  return ParseError::Kind::Syntax;
}

}  // namespace

TEST_CASE("two disjunctions and an equation parse into a three-element list") {
  ProgramUnit u = parse("query (x = 2 OR x = 3) AND (y = x + 1 OR 2 = y) AND (2*x = 3*y);");
  REQUIRE(u.query.size() == 3);
  CHECK(is<Node::Or>(u.query[0]));
  CHECK(is<Node::Or>(u.query[1]));
  REQUIRE(is<Atom>(u.query[2]));
  const auto& a = std::get<Atom>(u.query[2]->node);
  REQUIRE(std::holds_alternative<Atom::Compare>(a.node));
  CHECK(std::get<Atom::Compare>(a.node).rel == Relation::Eq);
  CHECK(u.query_free_vars == std::vector<Param>{{"x", Scalar::Int}, {"y", Scalar::Int}});
}

TEST_CASE("TRUE alone is a unit conjunction") {
  ProgramUnit u = parse("query TRUE;");
  REQUIRE(u.query.size() == 1);
  CHECK(std::get<Atom>(u.query[0]->node) == Atom{Atom::Constant{true}});
  CHECK(parse("query ;").query.empty());
}

TEST_CASE("recursive procedures are rejected") {
  CHECK(error_kind("def p(x) := x = 0; def q() := p(q()); query: p(y);") == ParseError::Kind::Cycle);
  CHECK(error_kind("def p() := q(); def q() := p(); query p();") == ParseError::Kind::Cycle);
  CHECK(error_kind("def p(a) := p(a); query p(1);") == ParseError::Kind::Cycle);
  // Acyclic forward reference is fine.
  CHECK_NOTHROW(parse("def p(a) := q(a); def q(b) := b = 1; query p(x);"));
}

TEST_CASE("diagnostics carry a kind and a position") {
  try {
    parse("query x =\n  ;");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(e.kind() == ParseError::Kind::Syntax);
    CHECK(e.line() == 2);
    CHECK(e.column() == 3);
  }
  CHECK(error_kind("query x = 1") == ParseError::Kind::Syntax);
  CHECK(error_kind("query p(1);") == ParseError::Kind::Identifier);
  CHECK(error_kind("def p(a) := a = b; query p(1);") == ParseError::Kind::Identifier);
  CHECK(error_kind("var b : bool; query b = 1;") == ParseError::Kind::Sort);
  CHECK(error_kind("var b : bool; query b < TRUE;") == ParseError::Kind::Sort);
  CHECK(error_kind("query TRUE + 1 = 2;") == ParseError::Kind::Sort);
  CHECK(error_kind("array a[1..3] : int; query a = 1;") == ParseError::Kind::Sort);
  CHECK(error_kind("array a[1..3] : int; query a[1, 2] = 1;") == ParseError::Kind::Sort);
  CHECK(error_kind("array a[3..1] : int; query TRUE;") == ParseError::Kind::Sort);
  CHECK(error_kind("array a[1..3] : int; array a[1..2] : int; query TRUE;") == ParseError::Kind::Identifier);
  CHECK(error_kind("def p(a) := a = 1; query p(1, 2);") == ParseError::Kind::Sort);
  CHECK(error_kind("def p(a : bool) := a = TRUE; query p(1);") == ParseError::Kind::Sort);
  CHECK(error_kind("query x = 1 $;") == ParseError::Kind::Syntax);
}

TEST_CASE("surface sugar") {
  ProgramUnit u = parse(
      "# comment\n"
      "array a[0..2, -1..1] : bool;\n"
      "query either x = 1 orelse x = 2; y = 3 orelse x = 4 end\n"
      "  AND IF x = 1 THEN y = 2 END AND x != -3 AND a[1, -1] = TRUE AND z = 7 DIV 2 MOD 2;");
  REQUIRE(u.query.size() == 5);
  const auto& either = std::get<Node::Or>(u.query[0]->node);
  CHECK(either.left.size() == 1);
  REQUIRE(either.right.size() == 1);
  const auto& rest = std::get<Node::Or>(either.right[0]->node);
  CHECK(rest.left.size() == 2);
  CHECK(is<Node::Implies>(u.query[1]));
  CHECK(to_string(u.query) ==
        "(x = 1 OR x = 2 AND y = 3 OR x = 4) AND (x = 1 -> y = 2) AND x <> -3 AND a[1, -1] = TRUE AND "
        "z = 7 DIV 2 MOD 2");
  CHECK(u.arrays[0]->ranges[1].lo == -1);
}

TEST_CASE("constants resolve in ranges and terms") {
  ParseOptions opts;
  opts.constants["N"] = 4;
  ProgramUnit u = parse("array a[1..N] : int; query a[N] = N + 1;", opts);
  CHECK(u.arrays[0]->ranges[0].hi == 4);
  CHECK(to_string(u.query) == "a[4] = 4 + 1");
  CHECK(u.query_free_vars.empty());
}

TEST_CASE("normalize: double negation, associativity, universal quantifier") {
  Formula dn{make_not(Formula{make_not(Formula{make_eq(make_var("x"), make_int(0))})})};
  CHECK(normalize(dn) == Formula{make_eq(make_var("x"), make_int(0))});

  NodePtr a = make_eq(make_var("x"), make_int(1));
  NodePtr b = make_eq(make_var("y"), make_int(2));
  NodePtr c = make_truth(true);
  Formula nested{make_and(Formula{make_and(Formula{a}, Formula{b})}, Formula{c})};
  CHECK(normalize(nested) == Formula{a, b, c});

  Formula all{make_forall("x", Scalar::Int, Formula{make_eq(make_var("x"), make_int(0))})};
  Formula n = normalize(all);
  REQUIRE(n.size() == 1);
  const auto& outer = std::get<Node::Not>(n[0]->node);
  REQUIRE(outer.body.size() == 1);
  const auto& ex = std::get<Node::Quantified>(outer.body[0]->node);
  CHECK(ex.quantifier == Quantifier::Exists);
  CHECK(is_reserved_name(ex.var));
  CHECK(ex.var != "x");
  REQUIRE(ex.body.size() == 1);
  const auto& inner = std::get<Node::Not>(ex.body[0]->node);
  CHECK(inner.body == Formula{make_eq(make_var(ex.var), make_int(0))});

  // FORALL x NOT φ: the inner negations cancel.
  Formula all_not = parse_formula("FORALL x. NOT x = 0");
  Formula m = normalize(all_not);
  const auto& ex2 = std::get<Node::Quantified>(std::get<Node::Not>(m[0]->node).body[0]->node);
  CHECK(ex2.body == Formula{make_eq(make_var(ex2.var), make_int(0))});
}

TEST_CASE("free variables") {
  CHECK(free_vars(parse("query (x = 2 OR x = 3) AND (y = x + 1 OR 2 = y) AND 2*x = 3*y;").query) ==
        std::vector<std::string>{"x", "y"});
  CHECK(free_vars(Formula{}).empty());
  CHECK(free_vars(parse_formula("EXISTS z. z = x")) == std::vector<std::string>{"x"});
  CHECK(free_vars(parse_formula("SOME i := a TO b DO i = c END")) == std::vector<std::string>{"a", "b", "c"});
  CHECK(bound_vars(parse_formula("SOME i := 1 TO 2 DO EXISTS j. i = j END")) ==
        std::vector<std::string>{"i", "j"});
}

TEST_CASE("normalization renames every binder apart") {
  ProgramUnit u = normalize(parse(
      "def p(a) := EXISTS z. z = a;\n"
      "query EXISTS z. z = 1 AND (EXISTS z. z = 2) AND FOR i := 1 TO 2 DO EXISTS z. z = i END AND p(x);"));
  std::vector<std::string> binders = bound_vars(u.query);
  for (const auto& d : u.procedures) {
    auto more = bound_vars(d.body);
    binders.insert(binders.end(), more.begin(), more.end());
  }
  std::set<std::string> unique(binders.begin(), binders.end());
  CHECK(unique.size() == binders.size());
  CHECK(binders.size() == 5);
  for (const auto& b : binders) CHECK(is_reserved_name(b));
  CHECK(free_vars(u.query) == std::vector<std::string>{"x"});
}

TEST_CASE("normalize is idempotent and printing round-trips") {
  std::vector<ProgramUnit> units;
  units.push_back(parse("query (x = 2 OR x = 3) AND (y = x + 1 OR 2 = y) AND 2*x = 3*y;"));
  units.push_back(parse(
      "var b : bool; def p(a, c : bool) := NOT NOT (a = 1 OR c = FALSE) -> FORALL q. q = q;\n"
      "query p(x - -2 * (y + 1), b) AND NOT (x < 1 AND NOT y = 2) AND SOME i := x TO 3 DO (i = 1 -> i = 2) END;"));
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    GeneratorConfig cfg;
    cfg.seed = seed;
    units.push_back(generate(cfg));
  }
  for (const auto& u : units) {
    ProgramUnit n = normalize(u);
    ProgramUnit nn = normalize(n);
    CHECK(to_string(nn) == to_string(n));
    CHECK(nn.query == n.query);
    std::string printed = to_string(n);
    ProgramUnit reparsed = parse(printed);
    CHECK(to_string(reparsed) == printed);
    CHECK(reparsed.query == n.query);
    CHECK(free_vars(n.query) == free_vars(u.query));
  }
}

TEST_CASE("instantiate substitutes without capture") {
  Formula body = parse_formula("EXISTS z. z = a + 1");
  int counter = 0;
  Formula out = instantiate(body, {{"a", make_var("z")}}, [&](const std::string& b) {
    return "#" + std::to_string(++counter) + "." + b;
  });
  CHECK(to_string(out) == "EXISTS #1.z:int. #1.z = z + 1");
  CHECK(free_vars(out) == std::vector<std::string>{"z"});
}

TEST_CASE("reserved names") {
  CHECK(is_reserved_name("%1.x"));
  CHECK(is_reserved_name("%12.abc"));
  CHECK_FALSE(is_reserved_name("x"));
  CHECK_FALSE(is_reserved_name("%.x"));
  CHECK_FALSE(is_reserved_name("%1x"));
  CHECK_FALSE(is_reserved_name("#1.x"));
}
