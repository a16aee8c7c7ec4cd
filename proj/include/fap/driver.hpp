#pragma once

// Library side of the command-line tool: initial valuations from `--set`
// flags, run reports, and the rectangle-tiling example.

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fap/engine.hpp"
#include "fap/render.hpp"
#include "fap/syntax.hpp"

namespace fap {

// Bad `--set` argument: unknown name, wrong sort, index out of range.
class BindError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Parses `name=value` and `array[i,...]=value` against the unit's
// declarations.  Values are integers or TRUE/FALSE.
Valuation bind(const ProgramUnit& unit, const std::vector<std::string>& assignments);

// `NAME=INTEGER`, for ParseOptions::constants.
std::pair<std::string, Integer> parse_constant(const std::string& text);

struct RunReport {
  TreeStatus status = TreeStatus::Failed;
  std::vector<Valuation> solutions;
  std::uint64_t successes = 0;
  std::uint64_t fails = 0;
  std::uint64_t errors = 0;
  std::map<ErrorCause, std::uint64_t> error_causes;
  std::uint64_t steps = 0;
  std::optional<std::string> trace;
};

// 0 SUCCESSFUL, 1 FAILED, 2 UNDETERMINED.  Static errors use 3.
int exit_code(TreeStatus status);
inline constexpr int kStaticErrorExit = 3;

struct RunOptions {
  EngineConfig engine;
  std::optional<RenderOptions::Format> trace;
};

RunReport run(const ProgramUnit& unit, const Valuation& alpha0, const RunOptions& options);

// `x=3 y=2 a[1,2]=5`, sorted; `{}` for the empty valuation.
std::string format_solution(const Valuation& v);

// Solutions, then status, leaf counts, error causes and steps.
std::string format_report(const RunReport& report);

// ---------------------------------------------------------------------------
// Tiling a rectangle with squares of given sizes.

struct SquaresCase {
  int nx = 1;
  int ny = 1;
  std::vector<Integer> sizes;
  // Extra `--set` assignments, typically posX[k]/posY[k].
  std::vector<std::string> partial;
};

struct Placement {
  int square;  // 1-based
  Integer x;
  Integer y;
  Integer size;
};

struct SquaresReport {
  RunReport run;
  // Placements read off the first solution.
  std::vector<Placement> placements;
  // Set for successful runs: both independent checks passed.
  bool verified = false;
  std::string verification;
};

// Path of the bundled tiling program.
std::string default_squares_program();

ProgramUnit load_squares_program(const std::string& path, const SquaresCase& c);

// Throws std::invalid_argument on bad dimensions or sizes, ParseError on a
// malformed program, BindError on bad partial assignments.
SquaresReport run_squares(const SquaresCase& c, const EngineConfig& config,
                          const std::string& program_path = default_squares_program());

// Every cell lies in some square and the squares fit the rectangle
// (checked with the classical evaluator).
bool covers_rectangle(const SquaresCase& c, const std::vector<Placement>& placements);

// Cell-marking check: squares lie inside the rectangle, are pairwise
// disjoint and cover every cell.
bool tiles_rectangle(const SquaresCase& c, const std::vector<Placement>& placements);

std::string read_file(const std::string& path);

}  // namespace fap
