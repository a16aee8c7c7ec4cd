#pragma once

#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "fap/ast.hpp"

namespace fap {

// Static diagnostic.  Never produced at run time; runtime problems become
// error leaves instead.
class ParseError : public std::runtime_error {
 public:
  enum class Kind { Syntax, Sort, Cycle, Identifier };

  ParseError(Kind kind, int line, int column, const std::string& message);

  Kind kind() const { return kind_; }
  int line() const { return line_; }
  int column() const { return column_; }
  const std::string& message() const { return message_; }

 private:
  Kind kind_;
  int line_;
  int column_;
  std::string message_;
};

std::string_view to_string(ParseError::Kind kind);

struct ParseOptions {
  // Named integer constants, usable in array ranges and in terms.
  std::map<std::string, Integer, std::less<>> constants;
};

// Parses and sort-checks a `.fap` program.  The result is not normalized.
ProgramUnit parse(std::string_view source, const ParseOptions& options = {});

// Parses a single formula against the declarations of `context` (used for
// tests and for the tiling checker).  Free variables default to INT.
Formula parse_formula(std::string_view source, const ProgramUnit& context = {},
                      const ParseOptions& options = {});

// Right-associates conjunctions, rewrites unbounded FORALL as NOT EXISTS NOT,
// removes double negations and renames every binder to a reserved fresh
// name.  Idempotent.
ProgramUnit normalize(const ProgramUnit& unit);
Formula normalize(const Formula& formula);

// Free scalar variables in order of first occurrence.
std::vector<std::string> free_vars(const Formula& formula);

// Names bound by any quantifier anywhere in the formula.
std::vector<std::string> bound_vars(const Formula& formula);

// Reserved binder names look like `%7.x`; they cannot clash with the
// identifiers users normally write.
bool is_reserved_name(std::string_view name);

// Capture-free instantiation: replaces free occurrences of the keys of
// `subst` and renames every binder through `rename_binder`.
using Substitution = std::map<std::string, TermPtr, std::less<>>;

Formula instantiate(const Formula& formula, const Substitution& subst,
                    const std::function<std::string(const std::string&)>& rename_binder);

TermPtr substitute(const TermPtr& term, const Substitution& subst);

// Pretty printing in `.fap` surface syntax.
std::string to_string(const Term& term);
std::string to_string(const Atom& atom);
std::string to_string(const Formula& formula);
std::string to_string(const ProgramUnit& unit);

}  // namespace fap
