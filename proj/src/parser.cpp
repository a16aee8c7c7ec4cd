// Parser and sort checker for the `.fap` program format.
//
//   program  := { array-decl | var-decl } { def } "query" [formula] ";"
//
// See docs/language.md for the complete grammar.

#include <algorithm>
#include <cctype>
#include <functional>
#include <map>
#include <set>

#include "fap/syntax.hpp"

namespace fap {

ParseError::ParseError(Kind kind, int line, int column, const std::string& message)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": " +
                         std::string(to_string(kind)) + " error: " + message),
      kind_(kind),
      line_(line),
      column_(column),
      message_(message) {}

std::string_view to_string(ParseError::Kind kind) {
  switch (kind) {
    case ParseError::Kind::Syntax: return "syntax";
    case ParseError::Kind::Sort: return "sort";
    case ParseError::Kind::Cycle: return "recursion";
    case ParseError::Kind::Identifier: return "identifier";
  }
  return "?";
}

namespace {

enum class Tok { Ident, Int, Keyword, Symbol, End };

struct Token {
  Tok kind;
  std::string text;  // keywords are stored upper-case
  int line;
  int column;
};

const std::set<std::string, std::less<>> kKeywords = {
    "AND", "OR", "NOT", "EXISTS", "FORALL", "SOME", "FOR", "TO", "DO", "END",
    "EITHER", "ORELSE", "IF", "THEN", "TRUE", "FALSE", "DIV", "MOD"};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1;
  int col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (c == '#') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    int tl = line;
    int tc = col;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < src.size() && ident_char(src[j])) ++j;
      std::string text(src.substr(i, j - i));
      std::string upper = text;
      std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char ch) { return std::toupper(ch); });
      std::string lower = text;
      std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
      bool single_case = text == upper || text == lower;
      if (single_case && kKeywords.count(upper)) {
        out.push_back({Tok::Keyword, upper, tl, tc});
      } else {
        out.push_back({Tok::Ident, text, tl, tc});
      }
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      out.push_back({Tok::Int, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    if (c == '%') {
      // Reserved binder name: %<digits>.<identifier>
      std::size_t j = i + 1;
      std::size_t digits = j;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j == digits || j >= src.size() || src[j] != '.' || j + 1 >= src.size() || !ident_start(src[j + 1])) {
        throw ParseError(ParseError::Kind::Syntax, tl, tc, "malformed reserved name");
      }
      ++j;
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    static const char* const kSymbols[] = {"..", ":=", "<>", "!=", "<=", ">=", "->", "(", ")", "[", "]", ",",
                                           ";",  ":",  ".",  "=",  "<",  ">",  "+",  "-", "*"};
    bool matched = false;
    for (const char* sym : kSymbols) {
      std::string_view s(sym);
      if (src.substr(i, s.size()) == s) {
        out.push_back({Tok::Symbol, std::string(s), tl, tc});
        advance(s.size());
        matched = true;
        break;
      }
    }
    if (!matched) {
      throw ParseError(ParseError::Kind::Syntax, tl, tc, std::string("unexpected character '") + c + "'");
    }
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

struct Signature {
  std::vector<Param> params;
  int line;
  int column;
};

class Parser {
 public:
  Parser(std::string_view src, const ParseOptions& options) : tokens_(lex(src)), options_(options) {}

  ProgramUnit program() {
    collect_signatures();
    while (true) {
      if (is_ident("array")) {
        array_decl();
      } else if (is_ident("var")) {
        var_decl();
      } else {
        break;
      }
    }
    while (is_ident("def")) definition();
    if (!is_ident("query")) syntax("expected 'query'");
    ++pos_;
    if (is_symbol(":")) ++pos_;
    in_query_ = true;
    if (!is_symbol(";")) unit_.query = formula();
    expect_symbol(";");
    if (peek().kind != Tok::End) syntax("unexpected input after query");
    check_cycles();
    for (auto& p : implicit_) unit_.query_free_vars.push_back(p);
    return std::move(unit_);
  }

  Formula standalone(const ProgramUnit& context) {
    unit_.arrays = context.arrays;
    unit_.query_free_vars = context.query_free_vars;
    for (const auto& def : context.procedures) signatures_[def.name] = Signature{def.params, 0, 0};
    in_query_ = true;
    Formula f = formula();
    if (peek().kind != Tok::End) syntax("unexpected input after formula");
    return f;
  }

 private:
  // ---- token helpers ------------------------------------------------------

  const Token& peek(std::size_t k = 0) const { return tokens_[std::min(pos_ + k, tokens_.size() - 1)]; }
  bool is_symbol(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Symbol && peek(k).text == s;
  }
  bool is_keyword(std::string_view s, std::size_t k = 0) const {
    return peek(k).kind == Tok::Keyword && peek(k).text == s;
  }
  bool is_ident(std::string_view s) const { return peek().kind == Tok::Ident && peek().text == s; }

  [[noreturn]] void fail(ParseError::Kind kind, const Token& at, const std::string& msg) const {
    throw ParseError(kind, at.line, at.column, msg);
  }
  [[noreturn]] void syntax(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Tok::End ? "end of input" : "'" + t.text + "'";
    fail(ParseError::Kind::Syntax, t, msg + ", found " + found);
  }

  void expect_symbol(std::string_view s) {
    if (!is_symbol(s)) syntax("expected '" + std::string(s) + "'");
    ++pos_;
  }
  void expect_keyword(std::string_view s) {
    if (!is_keyword(s)) syntax("expected '" + std::string(s) + "'");
    ++pos_;
  }
  const Token& expect_ident(const char* what) {
    if (peek().kind != Tok::Ident) syntax(std::string("expected ") + what);
    return tokens_[pos_++];
  }

  Scalar scalar_sort() {
    const Token& t = expect_ident("sort 'int' or 'bool'");
    if (t.text == "int") return Scalar::Int;
    if (t.text == "bool") return Scalar::Bool;
    fail(ParseError::Kind::Sort, t, "unknown sort '" + t.text + "'");
  }

  // ---- declarations -------------------------------------------------------

  void collect_signatures() {
    for (std::size_t i = 0; i + 2 < tokens_.size(); ++i) {
      const Token& t = tokens_[i];
      if (t.kind != Tok::Ident || t.text != "def") continue;
      if (i > 0 && !(tokens_[i - 1].kind == Tok::Symbol && tokens_[i - 1].text == ";")) continue;
      if (tokens_[i + 1].kind != Tok::Ident) continue;
      std::size_t saved = pos_;
      pos_ = i + 2;
      Signature sig{{}, tokens_[i + 1].line, tokens_[i + 1].column};
      try {
        sig.params = param_list();
      } catch (const ParseError&) {
        pos_ = saved;
        continue;  // reported when the definition itself is parsed
      }
      pos_ = saved;
      if (signatures_.count(tokens_[i + 1].text)) {
        fail(ParseError::Kind::Identifier, tokens_[i + 1], "duplicate procedure '" + tokens_[i + 1].text + "'");
      }
      signatures_[tokens_[i + 1].text] = std::move(sig);
    }
  }

  std::vector<Param> param_list() {
    std::vector<Param> params;
    expect_symbol("(");
    if (!is_symbol(")")) {
      while (true) {
        const Token& name = expect_ident("parameter name");
        Param p{name.text, Scalar::Int};
        if (is_symbol(":")) {
          ++pos_;
          p.sort = scalar_sort();
        }
        for (const auto& q : params) {
          if (q.name == p.name) fail(ParseError::Kind::Identifier, name, "duplicate parameter '" + p.name + "'");
        }
        params.push_back(p);
        if (!is_symbol(",")) break;
        ++pos_;
      }
    }
    expect_symbol(")");
    return params;
  }

  void check_fresh_global(const Token& t) const {
    const std::string& n = t.text;
    if (unit_.find_array(n) || unit_.variable_sort(n) || options_.constants.count(n)) {
      fail(ParseError::Kind::Identifier, t, "duplicate identifier '" + n + "'");
    }
  }

  Integer range_bound() {
    bool negative = false;
    if (is_symbol("-")) {
      negative = true;
      ++pos_;
    }
    const Token& t = peek();
    Integer value;
    if (t.kind == Tok::Int) {
      value = Integer(t.text);
    } else if (t.kind == Tok::Ident) {
      auto it = options_.constants.find(t.text);
      if (it == options_.constants.end()) fail(ParseError::Kind::Identifier, t, "unknown constant '" + t.text + "'");
      value = it->second;
    } else {
      syntax("expected integer bound");
    }
    ++pos_;
    return negative ? Integer(-value) : value;
  }

  void array_decl() {
    ++pos_;
    const Token& name = expect_ident("array name");
    check_fresh_global(name);
    auto decl = std::make_shared<ArrayDecl>();
    decl->name = name.text;
    expect_symbol("[");
    while (true) {
      const Token& at = peek();
      IndexRange r;
      r.lo = range_bound();
      expect_symbol("..");
      r.hi = range_bound();
      if (r.lo > r.hi) fail(ParseError::Kind::Sort, at, "empty index range in array '" + decl->name + "'");
      decl->ranges.push_back(r);
      if (!is_symbol(",")) break;
      ++pos_;
    }
    expect_symbol("]");
    expect_symbol(":");
    decl->element = scalar_sort();
    expect_symbol(";");
    unit_.arrays.push_back(std::move(decl));
  }

  void var_decl() {
    ++pos_;
    std::vector<const Token*> names;
    while (true) {
      names.push_back(&expect_ident("variable name"));
      if (!is_symbol(",")) break;
      ++pos_;
    }
    expect_symbol(":");
    Scalar sort = scalar_sort();
    expect_symbol(";");
    for (const Token* t : names) {
      check_fresh_global(*t);
      unit_.query_free_vars.push_back({t->text, sort});
    }
  }

  void definition() {
    ++pos_;
    const Token& name = expect_ident("procedure name");
    ProcedureDef def;
    def.name = name.text;
    def.params = param_list();
    expect_symbol(":=");
    params_ = &def.params;
    current_def_ = def.name;
    calls_[def.name];
    def.body = formula();
    params_ = nullptr;
    current_def_.clear();
    expect_symbol(";");
    unit_.procedures.push_back(std::move(def));
  }

  void check_cycles() const {
    // Depth-first search over the call graph.
    std::map<std::string, int> state;  // 0 new, 1 on stack, 2 done
    std::function<void(const std::string&)> visit = [&](const std::string& p) {
      state[p] = 1;
      auto it = calls_.find(p);
      if (it != calls_.end()) {
        for (const auto& [callee, at] : it->second) {
          if (state[callee] == 1) {
            fail(ParseError::Kind::Cycle, at, "recursive call of procedure '" + callee + "' from '" + p + "'");
          }
          if (state[callee] == 0) visit(callee);
        }
      }
      state[p] = 2;
    };
    for (const auto& def : unit_.procedures) {
      if (state[def.name] == 0) visit(def.name);
    }
  }

  // ---- formulas -----------------------------------------------------------

  Formula formula() {
    Formula lhs = disjunction();
    if (is_symbol("->")) {
      ++pos_;
      Formula rhs = formula();
      return Formula{make_implies(std::move(lhs), std::move(rhs))};
    }
    return lhs;
  }

  Formula disjunction() {
    Formula lhs = conjunction();
    if (is_keyword("OR")) {
      ++pos_;
      Formula rhs = disjunction();
      return Formula{make_or(std::move(lhs), std::move(rhs))};
    }
    return lhs;
  }

  Formula conjunction() {
    Formula acc = unary();
    while (is_keyword("AND")) {
      ++pos_;
      acc = concat(acc, unary());
    }
    return acc;
  }

  // formula { ';' formula } [';'], terminated by END, ORELSE or THEN.
  Formula block() {
    Formula acc = formula();
    while (is_symbol(";")) {
      ++pos_;
      if (is_keyword("END") || is_keyword("ORELSE") || is_keyword("THEN")) break;
      acc = concat(acc, formula());
    }
    return acc;
  }

  std::pair<std::string, Scalar> binder(bool allow_sort) {
    const Token& t = expect_ident("bound variable");
    if (unit_.find_array(t.text) || options_.constants.count(t.text) || signatures_.count(t.text)) {
      fail(ParseError::Kind::Identifier, t, "cannot bind '" + t.text + "': name is already declared");
    }
    Scalar sort = Scalar::Int;
    if (allow_sort && is_symbol(":")) {
      ++pos_;
      sort = scalar_sort();
    }
    return {t.text, sort};
  }

  Formula scoped(const std::string& var, Scalar sort, const std::function<Formula()>& body) {
    scope_.emplace_back(var, sort);
    Formula f = body();
    scope_.pop_back();
    return f;
  }

  Formula unary() {
    if (is_keyword("NOT")) {
      ++pos_;
      return Formula{make_not(unary())};
    }
    if (is_keyword("EXISTS") || is_keyword("FORALL")) {
      bool exists = is_keyword("EXISTS");
      ++pos_;
      auto [var, sort] = binder(true);
      expect_symbol(".");
      Formula body = scoped(var, sort, [&] { return unary(); });
      return Formula{exists ? make_exists(var, sort, std::move(body)) : make_forall(var, sort, std::move(body))};
    }
    return primary();
  }

  Formula bounded(Quantifier q) {
    ++pos_;
    auto [var, sort] = binder(false);
    expect_symbol(":=");
    TermPtr lo = int_term();
    expect_keyword("TO");
    TermPtr hi = int_term();
    expect_keyword("DO");
    Formula body = scoped(var, Scalar::Int, [&] { return block(); });
    expect_keyword("END");
    return Formula{make_bounded(q, var, std::move(lo), std::move(hi), std::move(body))};
  }

  Formula primary() {
    if (is_keyword("SOME")) return bounded(Quantifier::Exists);
    if (is_keyword("FOR")) return bounded(Quantifier::Forall);
    if (is_keyword("EITHER")) {
      ++pos_;
      std::vector<Formula> branches{block()};
      while (is_keyword("ORELSE")) {
        ++pos_;
        branches.push_back(block());
      }
      expect_keyword("END");
      Formula acc = branches.back();
      for (std::size_t i = branches.size() - 1; i-- > 0;) acc = Formula{make_or(branches[i], acc)};
      return acc;
    }
    if (is_keyword("IF")) {
      ++pos_;
      Formula cond = block();
      expect_keyword("THEN");
      Formula then = block();
      expect_keyword("END");
      return Formula{make_implies(std::move(cond), std::move(then))};
    }
    if (peek().kind == Tok::Ident && is_symbol("(", 1)) return Formula{call()};
    if ((is_keyword("TRUE") || is_keyword("FALSE")) && !is_relation(1) && !is_arith(1)) {
      bool v = is_keyword("TRUE");
      ++pos_;
      return Formula{make_truth(v)};
    }
    if (is_symbol("(")) {
      std::size_t saved = pos_;
      std::size_t implicit = implicit_.size();
      try {
        return Formula{comparison()};
      } catch (const ParseError& e) {
        if (e.kind() != ParseError::Kind::Syntax) throw;
        pos_ = saved;
        implicit_.resize(implicit);
      }
      ++pos_;
      Formula f = formula();
      expect_symbol(")");
      return f;
    }
    return Formula{comparison()};
  }

  bool is_relation(std::size_t k = 0) const {
    if (peek(k).kind != Tok::Symbol) return false;
    const std::string& s = peek(k).text;
    return s == "=" || s == "<>" || s == "!=" || s == "<" || s == "<=" || s == ">" || s == ">=";
  }
  bool is_arith(std::size_t k = 0) const {
    return is_symbol("+", k) || is_symbol("-", k) || is_symbol("*", k) || is_keyword("DIV", k) || is_keyword("MOD", k);
  }

  NodePtr call() {
    const Token& name = tokens_[pos_++];
    auto sig = signatures_.find(name.text);
    if (sig == signatures_.end()) fail(ParseError::Kind::Identifier, name, "unknown procedure '" + name.text + "'");
    expect_symbol("(");
    std::vector<TermPtr> args;
    if (!is_symbol(")")) {
      while (true) {
        const Token& at = peek();
        args.push_back(term());
        std::size_t i = args.size() - 1;
        if (i < sig->second.params.size() && args[i]->sort() != sig->second.params[i].sort) {
          fail(ParseError::Kind::Sort, at,
               "argument " + std::to_string(i + 1) + " of '" + name.text + "' must be " +
                   std::string(to_string(sig->second.params[i].sort)));
        }
        if (!is_symbol(",")) break;
        ++pos_;
      }
    }
    expect_symbol(")");
    if (args.size() != sig->second.params.size()) {
      fail(ParseError::Kind::Sort, name,
           "procedure '" + name.text + "' expects " + std::to_string(sig->second.params.size()) + " arguments");
    }
    if (!current_def_.empty()) calls_[current_def_].emplace_back(name.text, name);
    return make_call(name.text, std::move(args));
  }

  NodePtr comparison() {
    const Token& at = peek();
    TermPtr lhs = term();
    if (!is_relation()) syntax("expected relation");
    std::string op = tokens_[pos_++].text;
    TermPtr rhs = term();
    Relation rel = op == "="                 ? Relation::Eq
                   : op == "<>" || op == "!=" ? Relation::Ne
                   : op == "<"                ? Relation::Lt
                   : op == "<="               ? Relation::Le
                   : op == ">"                ? Relation::Gt
                                              : Relation::Ge;
    if (rel == Relation::Eq) {
      if (lhs->sort() != rhs->sort()) fail(ParseError::Kind::Sort, at, "equation between different sorts");
    } else if (lhs->sort() != Scalar::Int || rhs->sort() != Scalar::Int) {
      fail(ParseError::Kind::Sort, at, "relation '" + op + "' requires integer operands");
    }
    return make_compare(rel, std::move(lhs), std::move(rhs));
  }

  // ---- terms --------------------------------------------------------------

  TermPtr int_term() {
    const Token& at = peek();
    TermPtr t = term();
    if (t->sort() != Scalar::Int) fail(ParseError::Kind::Sort, at, "integer term expected");
    return t;
  }

  TermPtr arith(FuncOp op, TermPtr lhs, TermPtr rhs, const Token& at) {
    if (lhs->sort() != Scalar::Int || rhs->sort() != Scalar::Int) {
      fail(ParseError::Kind::Sort, at, "operator '" + std::string(to_string(op)) + "' requires integer operands");
    }
    return make_app(op, std::move(lhs), std::move(rhs));
  }

  TermPtr term() {
    TermPtr acc = product();
    while (is_symbol("+") || is_symbol("-")) {
      const Token& at = tokens_[pos_++];
      acc = arith(at.text == "+" ? FuncOp::Add : FuncOp::Sub, acc, product(), at);
    }
    return acc;
  }

  TermPtr product() {
    TermPtr acc = signed_factor();
    while (is_symbol("*") || is_keyword("DIV") || is_keyword("MOD")) {
      const Token& at = tokens_[pos_++];
      FuncOp op = at.text == "*" ? FuncOp::Mul : at.text == "DIV" ? FuncOp::Div : FuncOp::Mod;
      acc = arith(op, acc, signed_factor(), at);
    }
    return acc;
  }

  TermPtr signed_factor() {
    if (is_symbol("-")) {
      const Token& at = tokens_[pos_++];
      TermPtr inner = signed_factor();
      if (auto* c = std::get_if<Term::IntConst>(&inner->node)) return make_int(-c->value);
      return arith(FuncOp::Sub, make_int(0), inner, at);
    }
    return factor();
  }

  TermPtr factor() {
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      ++pos_;
      return make_int(Integer(t.text));
    }
    if (is_keyword("TRUE") || is_keyword("FALSE")) {
      ++pos_;
      return make_bool(t.text == "TRUE");
    }
    if (is_symbol("(")) {
      ++pos_;
      TermPtr inner = term();
      expect_symbol(")");
      return inner;
    }
    if (t.kind != Tok::Ident) syntax("expected term");
    ++pos_;
    if (is_symbol("[")) return array_ref(t);
    return variable(t);
  }

  TermPtr array_ref(const Token& name) {
    const ArrayDecl* decl = unit_.find_array(name.text);
    if (!decl) fail(ParseError::Kind::Identifier, name, "unknown array '" + name.text + "'");
    ArrayDeclPtr ptr;
    for (const auto& d : unit_.arrays) {
      if (d.get() == decl) ptr = d;
    }
    expect_symbol("[");
    std::vector<TermPtr> indices;
    while (true) {
      indices.push_back(int_term());
      if (!is_symbol(",")) break;
      ++pos_;
    }
    expect_symbol("]");
    if (static_cast<int>(indices.size()) != decl->arity()) {
      fail(ParseError::Kind::Sort, name,
           "array '" + name.text + "' has " + std::to_string(decl->arity()) + " indices");
    }
    return make_array_ref(std::move(ptr), std::move(indices));
  }

  TermPtr variable(const Token& t) {
    const std::string& n = t.text;
    for (auto it = scope_.rbegin(); it != scope_.rend(); ++it) {
      if (it->first == n) return make_var(n, it->second);
    }
    if (params_) {
      for (const auto& p : *params_) {
        if (p.name == n) return make_var(n, p.sort);
      }
    }
    if (unit_.find_array(n)) fail(ParseError::Kind::Sort, t, "array '" + n + "' used without index");
    if (signatures_.count(n)) {
      if (n == current_def_) fail(ParseError::Kind::Cycle, t, "procedure '" + n + "' refers to itself");
      fail(ParseError::Kind::Syntax, t, "procedure '" + n + "' used as a term");
    }
    if (auto c = options_.constants.find(n); c != options_.constants.end()) return make_int(c->second);
    if (params_) fail(ParseError::Kind::Identifier, t, "unknown identifier '" + n + "' in procedure body");
    if (auto sort = unit_.variable_sort(n)) return make_var(n, *sort);
    for (const auto& p : implicit_) {
      if (p.name == n) return make_var(n, p.sort);
    }
    if (!in_query_) fail(ParseError::Kind::Identifier, t, "unknown identifier '" + n + "'");
    implicit_.push_back({n, Scalar::Int});
    return make_var(n, Scalar::Int);
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
  const ParseOptions& options_;
  ProgramUnit unit_;
  std::map<std::string, Signature, std::less<>> signatures_;
  std::map<std::string, std::vector<std::pair<std::string, Token>>> calls_;
  std::vector<std::pair<std::string, Scalar>> scope_;
  std::vector<Param> implicit_;
  const std::vector<Param>* params_ = nullptr;
  std::string current_def_;
  bool in_query_ = false;
};

}  // namespace

ProgramUnit parse(std::string_view source, const ParseOptions& options) {
  Parser parser(source, options);
  return parser.program();
}

Formula parse_formula(std::string_view source, const ProgramUnit& context, const ParseOptions& options) {
  Parser parser(source, options);
  return parser.standalone(context);
}

}  // namespace fap
