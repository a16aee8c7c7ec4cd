#include "fap/driver.hpp"

#include <fstream>
#include <numeric>
#include <regex>
#include <sstream>

#include "fap/oracle.hpp"

#ifndef FAP_CORPUS_DIR
#define FAP_CORPUS_DIR "corpus"
#endif

namespace fap {

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  auto e = s.find_last_not_of(" \t");
  return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
}

std::optional<Integer> parse_integer(const std::string& text) {
  static const std::regex number(R"(-?[0-9]+)");
  if (!std::regex_match(text, number)) return std::nullopt;
  return Integer(text);
}

Value parse_value(const std::string& text, Scalar sort, const std::string& what) {
  std::string v = trim(text);
  std::string upper = v;
  for (auto& ch : upper) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  if (upper == "TRUE" || upper == "FALSE") {
    if (sort != Scalar::Bool) throw BindError(what + " expects an integer, got '" + v + "'");
    return upper == "TRUE";
  }
  auto n = parse_integer(v);
  if (!n) throw BindError("cannot parse value '" + v + "' for " + what);
  if (sort != Scalar::Int) throw BindError(what + " expects TRUE or FALSE, got '" + v + "'");
  return *n;
}

}  // namespace

Valuation bind(const ProgramUnit& unit, const std::vector<std::string>& assignments) {
  static const std::regex shape(R"(\s*([A-Za-z_][A-Za-z0-9_]*)\s*(?:\[([^\]]*)\])?\s*=(.*))");
  Valuation out;
  for (const auto& a : assignments) {
    std::smatch m;
    if (!std::regex_match(a, m, shape)) throw BindError("expected NAME=VALUE or ARRAY[I,...]=VALUE, got '" + a + "'");
    std::string name = m[1];
    if (!m[2].matched) {
      auto sort = unit.variable_sort(name);
      if (!sort) throw BindError("unknown variable '" + name + "'");
      if (out.scalar(name)) throw BindError("'" + name + "' is set twice");
      out = out.extended(name, parse_value(m[3], *sort, "'" + name + "'"));
      continue;
    }
    const ArrayDecl* decl = unit.find_array(name);
    if (!decl) throw BindError("unknown array '" + name + "'");
    CellRef cell{name, {}};
    std::stringstream idx(m[2].str());
    std::string part;
    while (std::getline(idx, part, ',')) {
      auto n = parse_integer(trim(part));
      if (!n) throw BindError("bad index '" + trim(part) + "' for array '" + name + "'");
      cell.index.push_back(*n);
    }
    if (static_cast<int>(cell.index.size()) != decl->arity()) {
      throw BindError("array '" + name + "' takes " + std::to_string(decl->arity()) + " indices");
    }
    if (!decl->contains(cell.index)) throw BindError(to_string(cell) + " is out of range");
    if (out.cell(cell)) throw BindError(to_string(cell) + " is set twice");
    out = out.extended(cell, parse_value(m[3], decl->element, to_string(cell)));
  }
  return out;
}

std::pair<std::string, Integer> parse_constant(const std::string& text) {
  static const std::regex shape(R"(\s*([A-Za-z_][A-Za-z0-9_]*)\s*=\s*(-?[0-9]+)\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, shape)) throw BindError("expected NAME=INTEGER, got '" + text + "'");
  return {m[1], Integer(m[2].str())};
}

int exit_code(TreeStatus status) {
  switch (status) {
    case TreeStatus::Successful: return 0;
    case TreeStatus::Failed: return 1;
    case TreeStatus::Undetermined: return 2;
  }
  return 2;
}

RunReport run(const ProgramUnit& unit, const Valuation& alpha0, const RunOptions& options) {
  RunReport report;
  std::vector<Leaf> leaves;
  if (options.trace) {
    Trace t = trace(unit, alpha0, options.engine);
    leaves = std::move(t.result.leaves);
    report.steps = t.result.steps;
    RenderOptions ro;
    ro.format = *options.trace;
    report.trace = render(t.root, ro);
  } else {
    Solver s(unit, alpha0, options.engine);
    while (auto leaf = s.next()) leaves.push_back(std::move(*leaf));
    report.steps = s.steps();
  }
  for (auto& l : leaves) {
    switch (l.kind) {
      case Leaf::Kind::Success:
        ++report.successes;
        report.solutions.push_back(std::move(l.valuation));
        break;
      case Leaf::Kind::Fail:
        ++report.fails;
        break;
      case Leaf::Kind::Error:
        ++report.errors;
        ++report.error_causes[l.cause];
        break;
    }
  }
  report.status = report.successes ? TreeStatus::Successful
                  : report.errors  ? TreeStatus::Undetermined
                                   : TreeStatus::Failed;
  return report;
}

std::string format_solution(const Valuation& v) {
  if (v.empty()) return "{}";
  std::string out;
  for (const auto& [name, value] : v.scalars()) {
    if (!out.empty()) out += ' ';
    out += name + "=" + to_string(value);
  }
  for (const auto& [cell, value] : v.cells()) {
    if (!out.empty()) out += ' ';
    out += to_string(cell) + "=" + to_string(value);
  }
  return out;
}

std::string format_report(const RunReport& r) {
  std::ostringstream os;
  for (const auto& s : r.solutions) os << format_solution(s) << '\n';
  os << "status: " << to_string(r.status) << '\n';
  os << "leaves: " << r.successes << " success, " << r.fails << " fail, " << r.errors << " error\n";
  if (!r.error_causes.empty()) {
    os << "errors:";
    for (const auto& [cause, n] : r.error_causes) os << ' ' << to_string(cause) << '=' << n;
    os << '\n';
  }
  os << "steps: " << r.steps << '\n';
  return os.str();
}

// ---------------------------------------------------------------------------

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string default_squares_program() { return std::string(FAP_CORPUS_DIR) + "/squares.fap"; }

namespace {

void check_case(const SquaresCase& c) {
  if (c.nx < 1 || c.ny < 1) throw std::invalid_argument("rectangle dimensions must be positive");
  if (c.sizes.empty()) throw std::invalid_argument("at least one square size is required");
  for (const auto& s : c.sizes) {
    if (s < 1) throw std::invalid_argument("square sizes must be positive");
  }
}

ParseOptions squares_constants(const SquaresCase& c) {
  ParseOptions opts;
  opts.constants["NX"] = c.nx;
  opts.constants["NY"] = c.ny;
  opts.constants["M"] = static_cast<long>(c.sizes.size());
  return opts;
}

}  // namespace

ProgramUnit load_squares_program(const std::string& path, const SquaresCase& c) {
  check_case(c);
  return parse(read_file(path), squares_constants(c));
}

bool covers_rectangle(const SquaresCase& c, const std::vector<Placement>& placements) {
  check_case(c);
  ParseOptions opts = squares_constants(c);
  ProgramUnit unit = parse("array posX[1..M] : int; array posY[1..M] : int; array Sizes[1..M] : int; query ;", opts);
  Formula cover = parse_formula(
      "FOR i := 1 TO NX DO FOR j := 1 TO NY DO SOME k := 1 TO M DO "
      "posX[k] <= i; i < posX[k] + Sizes[k]; posX[k] + Sizes[k] <= NX + 1; "
      "posY[k] <= j; j < posY[k] + Sizes[k]; posY[k] + Sizes[k] <= NY + 1 "
      "END END END",
      unit, opts);
  // Unused squares get a position far enough left that they cover nothing.
  Integer total = std::accumulate(c.sizes.begin(), c.sizes.end(), Integer(0));
  Integer sentinel = -total - 1;
  Valuation::CellMap cells;
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    Integer idx = static_cast<long>(k + 1);
    cells[{"Sizes", {idx}}] = c.sizes[k];
    cells[{"posX", {idx}}] = sentinel;
    cells[{"posY", {idx}}] = sentinel;
  }
  for (const auto& p : placements) {
    Integer idx = p.square;
    cells[{"posX", {idx}}] = p.x;
    cells[{"posY", {idx}}] = p.y;
  }
  FiniteDomain domain{sentinel, Integer(std::max(c.nx, c.ny)) + total};
  return oracle_truth(unit, cover, Valuation({}, std::move(cells)), domain);
}

bool tiles_rectangle(const SquaresCase& c, const std::vector<Placement>& placements) {
  check_case(c);
  std::vector<int> grid(static_cast<std::size_t>(c.nx * c.ny), 0);
  for (const auto& p : placements) {
    if (p.x < 1 || p.y < 1 || p.x + p.size - 1 > c.nx || p.y + p.size - 1 > c.ny) return false;
    int x0 = static_cast<int>(p.x);
    int y0 = static_cast<int>(p.y);
    int s = static_cast<int>(p.size);
    for (int x = x0; x < x0 + s; ++x) {
      for (int y = y0; y < y0 + s; ++y) {
        int& cell = grid[static_cast<std::size_t>((x - 1) * c.ny + (y - 1))];
        if (cell) return false;
        cell = p.square;
      }
    }
  }
  return std::all_of(grid.begin(), grid.end(), [](int v) { return v != 0; });
}

SquaresReport run_squares(const SquaresCase& c, const EngineConfig& config, const std::string& program_path) {
  ProgramUnit unit = load_squares_program(program_path, c);
  std::vector<std::string> sets;
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    sets.push_back("Sizes[" + std::to_string(k + 1) + "]=" + to_string(c.sizes[k]));
  }
  sets.insert(sets.end(), c.partial.begin(), c.partial.end());
  Valuation alpha0 = fap::bind(unit, sets);

  SquaresReport out;
  RunOptions ro;
  ro.engine = config;
  out.run = run(unit, alpha0, ro);
  if (out.run.solutions.empty()) return out;

  const Valuation& sol = out.run.solutions.front();
  for (std::size_t k = 0; k < c.sizes.size(); ++k) {
    Integer idx = static_cast<long>(k + 1);
    const Value* x = sol.cell({"posX", {idx}});
    const Value* y = sol.cell({"posY", {idx}});
    if (x && y) {
      out.placements.push_back({static_cast<int>(k + 1), std::get<Integer>(*x), std::get<Integer>(*y), c.sizes[k]});
    }
  }
  bool cover = covers_rectangle(c, out.placements);
  bool tiles = tiles_rectangle(c, out.placements);
  out.verified = cover && tiles;
  out.verification = std::string("coverage ") + (cover ? "ok" : "FAILED") + ", disjointness " +
                     (tiles ? "ok" : "FAILED");
  return out;
}

}  // namespace fap
