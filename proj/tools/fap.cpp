// fap: run first-order formulas as programs.

#include <CLI11.hpp>

#include <iostream>
#include <sstream>

#include "fap/driver.hpp"
#include "fap/oracle.hpp"

namespace {

struct EngineFlags {
  std::string neg = "strict";
  std::string impl = "strict";
  bool pedantic = false;
  std::uint64_t max_steps = 100'000'000;
  bool all = false;
  std::uint64_t first = 1;
  bool internal = false;
  std::string trace;

  void add(CLI::App* app) {
    app->add_option("--neg", neg, "Negation mode")->check(CLI::IsMember({"strict", "liberal"}));
    app->add_option("--impl", impl, "Implication mode")
        ->check(CLI::IsMember({"strict", "negor", "guarded", "combined"}));
    app->add_flag("--pedantic", pedantic, "Require closed antecedents in strict implication mode");
    app->add_option("--max-steps", max_steps, "Step budget (0 for unlimited)");
    auto* all_flag = app->add_flag("--all", all, "Enumerate every solution");
    app->add_option("--first", first, "Stop after N solutions")->excludes(all_flag)->check(CLI::PositiveNumber);
    app->add_flag("--internal", internal, "Report bindings of quantified variables");
    app->add_option("--trace", trace, "Print the explored tree")->check(CLI::IsMember({"text", "dot"}));
  }

  fap::RunOptions options() const {
    fap::RunOptions o;
    o.engine.negation = neg == "liberal" ? fap::NegationMode::Liberal : fap::NegationMode::Strict;
    o.engine.implication = impl == "negor"      ? fap::ImplicationMode::NegOr
                           : impl == "guarded"  ? fap::ImplicationMode::Guarded
                           : impl == "combined" ? fap::ImplicationMode::Combined
                                                : fap::ImplicationMode::Strict;
    o.engine.pedantic = pedantic;
    if (max_steps) o.engine.max_steps = max_steps;
    if (!all) o.engine.solution_limit = first;
    o.engine.report_internal_bindings = internal;
    if (trace == "text") o.trace = fap::RenderOptions::Format::Text;
    if (trace == "dot") o.trace = fap::RenderOptions::Format::Dot;
    return o;
  }
};

void print_parse_error(const std::string& file, const fap::ParseError& e) {
  std::cerr << file << ':' << e.line() << ':' << e.column() << ": " << fap::to_string(e.kind())
            << " error: " << e.message() << '\n';
}

std::vector<fap::Integer> parse_sizes(const std::string& text) {
  std::vector<fap::Integer> out;
  std::stringstream ss(text);
  std::string part;
  while (std::getline(ss, part, ',')) {
    try {
      out.emplace_back(part);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad square size '" + part + "'");
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Execute first-order formulas over the integers as programs"};
  app.require_subcommand(1);

  // run
  auto* run_cmd = app.add_subcommand("run", "Run the query of a .fap program");
  std::string file;
  std::vector<std::string> sets;
  std::vector<std::string> consts;
  EngineFlags run_flags;
  run_cmd->add_option("file", file, "Program file")->required();
  run_cmd->add_option("--set", sets, "Initial binding NAME=V or ARRAY[I,..]=V");
  run_cmd->add_option("--const", consts, "Named constant NAME=V");
  run_flags.add(run_cmd);

  // gen
  auto* gen_cmd = app.add_subcommand("gen", "Print a random program");
  std::uint64_t seed = 1;
  int depth = 4;
  gen_cmd->add_option("--seed", seed, "Random seed");
  gen_cmd->add_option("--depth", depth, "Maximum formula depth")->check(CLI::PositiveNumber);

  // squares
  auto* sq_cmd = app.add_subcommand("squares", "Fill a rectangle with squares of given sizes");
  int nx = 1;
  int ny = 1;
  std::string sizes;
  std::vector<std::string> partial;
  std::string program = fap::default_squares_program();
  EngineFlags sq_flags;
  sq_cmd->add_option("--nx", nx, "Rectangle width")->required()->check(CLI::PositiveNumber);
  sq_cmd->add_option("--ny", ny, "Rectangle height")->required()->check(CLI::PositiveNumber);
  sq_cmd->add_option("--sizes", sizes, "Comma-separated square sizes")->required();
  sq_cmd->add_option("--set", partial, "Partial placement, e.g. posX[1]=1");
  sq_cmd->add_option("--program", program, "Tiling program");
  sq_flags.add(sq_cmd);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : fap::kStaticErrorExit;
  }

  try {
    if (*gen_cmd) {
      fap::GeneratorConfig cfg;
      cfg.seed = seed;
      cfg.max_depth = depth;
      std::cout << fap::to_string(fap::generate(cfg));
      return 0;
    }

    if (*run_cmd) {
      fap::ParseOptions po;
      for (const auto& c : consts) po.constants.insert(fap::parse_constant(c));
      fap::ProgramUnit unit;
      try {
        unit = fap::parse(fap::read_file(file), po);
      } catch (const fap::ParseError& e) {
        print_parse_error(file, e);
        return fap::kStaticErrorExit;
      }
      fap::Valuation alpha0 = fap::bind(unit, sets);
      fap::RunReport report = fap::run(unit, alpha0, run_flags.options());
      if (report.trace) std::cout << *report.trace;
      std::cout << fap::format_report(report);
      return fap::exit_code(report.status);
    }

    fap::SquaresCase c;
    c.nx = nx;
    c.ny = ny;
    c.sizes = parse_sizes(sizes);
    c.partial = partial;
    fap::SquaresReport report;
    try {
      report = fap::run_squares(c, sq_flags.options().engine, program);
    } catch (const fap::ParseError& e) {
      print_parse_error(program, e);
      return fap::kStaticErrorExit;
    }
    std::cout << fap::format_report(report.run);
    for (const auto& p : report.placements) {
      std::cout << "square " << p.square << ": size " << p.size << " at (" << p.x << ", " << p.y << ")\n";
    }
    if (report.run.status == fap::TreeStatus::Successful) {
      std::cout << "check: " << report.verification << '\n';
      if (!report.verified) return fap::exit_code(fap::TreeStatus::Undetermined);
    }
    return fap::exit_code(report.run.status);
  } catch (const fap::BindError& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << '\n';
  }
  return fap::kStaticErrorExit;
}
