#pragma once

// Depth-first exploration of computation trees.

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fap/ast.hpp"
#include "fap/semantics.hpp"

namespace fap {

enum class NegationMode { Strict, Liberal };
enum class ImplicationMode { Strict, NegOr, Guarded, Combined };

struct EngineConfig {
  NegationMode negation = NegationMode::Strict;
  ImplicationMode implication = ImplicationMode::Strict;
  // Require closed antecedents in strict implication mode.
  bool pedantic = false;
  std::optional<std::uint64_t> max_steps;
  // Stop after this many success leaves.
  std::optional<std::uint64_t> solution_limit;
  // Keep bindings of quantified variables in reported solutions.
  bool report_internal_bindings = false;
};

std::string_view to_string(NegationMode m);
std::string_view to_string(ImplicationMode m);

enum class ErrorCause {
  AtomNotEvaluable,
  NegandUndetermined,
  AntecedentUndetermined,
  UnboundedRange,
  EvaluationFault,
  StepBudget,
};

std::string_view to_string(ErrorCause c);

struct Leaf {
  enum class Kind { Success, Fail, Error };

  Kind kind = Kind::Fail;
  Valuation valuation;  // Success only
  ErrorCause cause = ErrorCause::AtomNotEvaluable;  // Error only

  static Leaf success(Valuation v) { return {Kind::Success, std::move(v), {}}; }
  static Leaf fail() { return {Kind::Fail, {}, {}}; }
  static Leaf error(ErrorCause c) { return {Kind::Error, {}, c}; }

  friend bool operator==(const Leaf&, const Leaf&) = default;
};

// success {x/3}, fail, error (atom-not-evaluable)
std::string to_string(const Leaf& leaf);

enum class TreeStatus { Successful, Failed, Undetermined };

std::string_view to_string(TreeStatus s);

TreeStatus status_of(std::span<const Leaf> leaves);

// Names introduced at run time for renamed binders look like `#4.%2.x`.
// Returns the binder name they were derived from (`%2.x`).
std::string original_binder(std::string_view name);

class Machine;

// Lazy enumeration of leaves in left-to-right depth-first order.  The unit
// is normalized on construction.  Throws std::invalid_argument if α0 binds
// anything other than declared free variables and in-range array cells, or
// binds them with the wrong sort.
class Solver {
 public:
  Solver(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config);
  ~Solver();
  Solver(Solver&&) noexcept;
  Solver& operator=(Solver&&) noexcept;

  std::optional<Leaf> next();

  // Status of the leaves produced so far; final once next() returned nullopt.
  TreeStatus status() const;
  std::uint64_t steps() const;

 private:
  std::unique_ptr<Machine> machine_;
};

struct SolveResult {
  std::vector<Leaf> leaves;
  TreeStatus status = TreeStatus::Failed;
  std::uint64_t steps = 0;
};

SolveResult solve(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config);

struct SubtreeStatus {
  TreeStatus status = TreeStatus::Failed;
  // The first success leaf's full valuation.
  std::optional<Valuation> witness;
};

// Status of the tree for `f` at α, stopping at the first success.  `unit`
// supplies procedures and arrays.
SubtreeStatus eval_subtree_status(const ProgramUnit& unit, const Formula& f, const Valuation& alpha,
                                  const EngineConfig& config);

struct TraceNode {
  std::string formula;  // remaining conjunction at this node
  Valuation valuation;
  std::string tag;  // rule applied; "leaf" for leaves
  std::string note;
  std::optional<Leaf> leaf;
  std::vector<TraceNode> children;

  std::size_t size() const;
};

struct Trace {
  TraceNode root;
  SolveResult result;
};

// Materializes the explored tree.  Negands and antecedents are evaluated
// without being expanded in the trace.
Trace trace(const ProgramUnit& unit, const Valuation& alpha0, const EngineConfig& config);

}  // namespace fap
