#pragma once

// Brute-force classical truth over a finite integer range, and a random
// program generator whose output the oracle can always decide.

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "fap/ast.hpp"
#include "fap/semantics.hpp"

namespace fap {

struct FiniteDomain {
  Integer lo = 0;
  Integer hi = 4;
};

// Raised for input the oracle cannot decide: division, unbounded integer
// quantifiers, unbound variables or cells.
class OracleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Truth of `f` under `alpha`, which must bind every free variable of `f`.
// Procedures and arrays come from `unit`.
bool oracle_truth(const ProgramUnit& unit, const Formula& f, const Valuation& alpha, const FiniteDomain& domain);

struct Satisfiability {
  bool satisfiable = false;
  // Groundings of the free variables left unbound by alpha, in enumeration
  // order.  Each witness binds exactly those variables.
  std::vector<Valuation> witnesses;
};

Satisfiability oracle_satisfiable(const ProgramUnit& unit, const Formula& f, const Valuation& alpha,
                                  const FiniteDomain& domain);

struct GeneratorConfig {
  std::uint64_t seed = 1;
  int max_depth = 5;
  int max_range_width = 3;
  FiniteDomain domain;
  // Relative weights of atom shapes.
  int assignment_weight = 6;
  int relation_weight = 3;
  int compound_weight = 1;
  int constant_weight = 1;
  // Relative weights of connectives at depth > 1.
  int and_weight = 4;
  int or_weight = 3;
  int not_weight = 2;
  int implies_weight = 2;
  int bounded_weight = 2;
  int call_weight = 1;
  // Chance, in percent, that a free variable of the query gets a leading
  // `v = c` or `(v = c OR v = c')` conjunct.
  int binder_percent = 75;
};

// Sort-correct program over free integer variables x, y, z.  Constants lie in
// the domain, equations never bind a variable to a value outside it, and no
// division or unbounded quantifier is emitted.  Deterministic in the seed.
ProgramUnit generate(const GeneratorConfig& config);

}  // namespace fap
