#pragma once

#include <string>
#include <vector>

#include "fap/engine.hpp"
#include "fap/syntax.hpp"

namespace fap::test {

inline ProgramUnit program(const std::string& query) { return parse("query " + query + ";"); }

inline SolveResult run(const std::string& query, EngineConfig cfg = {}, const Valuation& alpha = {}) {
  return solve(program(query), alpha, cfg);
}

inline EngineConfig liberal(ImplicationMode impl = ImplicationMode::Strict) {
  EngineConfig cfg;
  cfg.negation = NegationMode::Liberal;
  cfg.implication = impl;
  return cfg;
}

inline Valuation val(std::initializer_list<std::pair<const char*, long>> bindings) {
  Valuation v;
  for (const auto& [k, x] : bindings) v = v.extended(k, Value{Integer(x)});
  return v;
}

inline std::vector<std::string> kinds(const SolveResult& r) {
  std::vector<std::string> out;
  for (const auto& l : r.leaves) out.push_back(to_string(l));
  return out;
}

inline std::vector<Valuation> successes(const SolveResult& r) {
  std::vector<Valuation> out;
  for (const auto& l : r.leaves) {
    if (l.kind == Leaf::Kind::Success) out.push_back(l.valuation);
  }
  return out;
}

}  // namespace fap::test
