#include "caext/smtlib.h"

#include <sstream>
#include <unordered_set>

namespace caext {

ParseError::ParseError(Kind kind, const std::string& msg, uint32_t line, uint32_t column)
    : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + msg),
      d_kind(kind),
      d_line(line),
      d_column(column)
{
}

namespace {

[[noreturn]] void fail(ParseError::Kind kind, const std::string& msg, const SExpr& at)
{
  throw ParseError(kind, msg, at.line, at.column);
}

[[noreturn]] void syntax(const std::string& msg, const SExpr& at)
{
  fail(ParseError::Kind::SYNTAX, msg, at);
}

bool is_symbol_char(char c)
{
  return std::isalnum(static_cast<unsigned char>(c)) || std::string_view("~!@$%^&*_-+=<>.?/#:").find(c) != std::string_view::npos;
}

class Reader
{
 public:
  explicit Reader(std::string_view text) : d_text(text) {}

  std::vector<SExpr> read_all()
  {
    std::vector<SExpr> out;
    for (;;)
    {
      skip_space();
      if (d_pos >= d_text.size()) return out;
      out.push_back(read());
    }
  }

 private:
  SExpr here() const
  {
    SExpr e;
    e.line = d_line;
    e.column = d_column;
    return e;
  }

  void advance()
  {
    if (d_text[d_pos] == '\n')
    {
      ++d_line;
      d_column = 1;
    }
    else
    {
      ++d_column;
    }
    ++d_pos;
  }

  void skip_space()
  {
    while (d_pos < d_text.size())
    {
      char c = d_text[d_pos];
      if (c == ';')
      {
        while (d_pos < d_text.size() && d_text[d_pos] != '\n') advance();
      }
      else if (std::isspace(static_cast<unsigned char>(c)))
      {
        advance();
      }
      else
      {
        return;
      }
    }
  }

  SExpr read()
  {
    SExpr e = here();
    char c = d_text[d_pos];
    if (c == ')') syntax("unexpected ')'", e);
    if (c == '(')
    {
      advance();
      e.type = SExpr::Type::LIST;
      for (;;)
      {
        skip_space();
        if (d_pos >= d_text.size()) syntax("missing ')'", e);
        if (d_text[d_pos] == ')')
        {
          advance();
          return e;
        }
        e.items.push_back(read());
      }
    }
    if (c == '|' || c == '"')
    {
      // Quoted symbols keep their bars so printing round-trips; strings keep
      // their quotes.
      char close = c;
      e.atom.push_back(c);
      advance();
      while (d_pos < d_text.size() && d_text[d_pos] != close)
      {
        e.atom.push_back(d_text[d_pos]);
        advance();
      }
      if (d_pos >= d_text.size()) syntax("unterminated literal", e);
      e.atom.push_back(close);
      advance();
      if (close == '|') e.atom = e.atom.substr(1, e.atom.size() - 2);
      return e;
    }
    while (d_pos < d_text.size() && is_symbol_char(d_text[d_pos]))
    {
      e.atom.push_back(d_text[d_pos]);
      advance();
    }
    if (e.atom.empty()) syntax(std::string("unexpected character '") + c + "'", e);
    return e;
  }

  std::string_view d_text;
  size_t d_pos = 0;
  uint32_t d_line = 1;
  uint32_t d_column = 1;
};

class TermParser
{
 public:
  explicit TermParser(TermManager& tm) : d_tm(tm) {}

  Sort sort(const SExpr& e)
  {
    try
    {
      if (e.is_atom("Bool")) return d_tm.mk_bool_sort();
      if (!e.is_atom() && e.items.size() == 3 && e.items[0].is_atom("_")
          && e.items[1].is_atom("BitVec"))
      {
        return d_tm.mk_bv_sort(numeral(e.items[2]));
      }
      if (!e.is_atom() && e.items.size() == 3 && e.items[0].is_atom("Array"))
        return d_tm.mk_array_sort(sort(e.items[1]), sort(e.items[2]));
    }
    catch (const ParseError&)
    {
      throw;
    }
    catch (const Error& err)
    {
      fail(ParseError::Kind::SORT, err.what(), e);
    }
    fail(ParseError::Kind::SORT, "unsupported sort", e);
  }

  Term term(const SExpr& e)
  {
    try
    {
      return e.is_atom() ? atom(e) : app(e);
    }
    catch (const ParseError&)
    {
      throw;
    }
    catch (const SortMismatch& err)
    {
      fail(ParseError::Kind::SORT, err.what(), e);
    }
    catch (const Error& err)
    {
      fail(ParseError::Kind::SORT, err.what(), e);
    }
  }

  uint32_t numeral(const SExpr& e)
  {
    if (!e.is_atom() || e.atom.empty() || e.atom.size() > 9
        || e.atom.find_first_not_of("0123456789") != std::string::npos)
    {
      syntax("numeral expected", e);
    }
    return static_cast<uint32_t>(std::stoul(e.atom));
  }

 private:
  Term atom(const SExpr& e)
  {
    const std::string& s = e.atom;
    if (s == "true") return d_tm.mk_true();
    if (s == "false") return d_tm.mk_false();
    if (s.size() > 2 && s[0] == '#' && (s[1] == 'b' || s[1] == 'x'))
    {
      bool binary = s[1] == 'b';
      std::string digits = s.substr(2);
      const char* allowed = binary ? "01" : "0123456789abcdefABCDEF";
      if (digits.find_first_not_of(allowed) != std::string::npos) syntax("bad literal " + s, e);
      size_t width = digits.size() * (binary ? 1 : 4);
      if (width > 64) fail(ParseError::Kind::SORT, "literal wider than 64 bits", e);
      uint64_t bits = std::stoull(digits, nullptr, binary ? 2 : 16);
      return d_tm.mk_value(d_tm.mk_bv_sort(static_cast<uint32_t>(width)), bits);
    }
    if (auto c = d_tm.lookup_const(s)) return *c;
    fail(ParseError::Kind::UNKNOWN_SYMBOL, "unknown symbol '" + s + "'", e);
  }

  void arity(const SExpr& e, size_t lo, size_t hi)
  {
    size_t n = e.items.size() - 1;
    if (n < lo || n > hi) syntax("arity mismatch for '" + e.items[0].atom + "'", e);
  }

  Term app(const SExpr& e)
  {
    if (e.items.empty()) syntax("empty application", e);
    const SExpr& head = e.items[0];
    if (!head.is_atom())
    {
      // ((as const S) v)
      if (head.items.size() == 3 && head.items[0].is_atom("as") && head.items[1].is_atom("const"))
      {
        arity(e, 1, 1);
        Sort s = sort(head.items[2]);
        if (!s.is_array()) fail(ParseError::Kind::SORT, "const needs an array sort", head);
        return d_tm.mk_const_array(s, term(e.items[1]));
      }
      syntax("unsupported application", e);
    }
    std::vector<Term> args;
    for (size_t k = 1; k < e.items.size(); ++k) args.push_back(term(e.items[k]));
    const std::string& op = head.atom;
    constexpr size_t many = SIZE_MAX;
    if (op == "select")
    {
      arity(e, 2, 2);
      return d_tm.mk_select(args[0], args[1]);
    }
    if (op == "store")
    {
      arity(e, 3, 3);
      return d_tm.mk_store(args[0], args[1], args[2]);
    }
    if (op == "=")
    {
      arity(e, 2, many);
      std::vector<Term> eqs;
      for (size_t k = 0; k + 1 < args.size(); ++k) eqs.push_back(d_tm.mk_eq(args[k], args[k + 1]));
      return d_tm.mk_and(eqs);
    }
    if (op == "distinct")
    {
      arity(e, 2, many);
      std::vector<Term> neqs;
      for (size_t k = 0; k < args.size(); ++k)
        for (size_t l = k + 1; l < args.size(); ++l)
          neqs.push_back(d_tm.mk_not(d_tm.mk_eq(args[k], args[l])));
      return d_tm.mk_and(neqs);
    }
    if (op == "not")
    {
      arity(e, 1, 1);
      return d_tm.mk_not(args[0]);
    }
    if (op == "and" || op == "or")
    {
      arity(e, 1, many);
      for (const Term& a : args)
        if (!a.sort().is_bool()) fail(ParseError::Kind::SORT, op + " expects Bool arguments", e);
      return op == "and" ? d_tm.mk_and(args) : d_tm.mk_or(args);
    }
    if (op == "=>")
    {
      arity(e, 2, many);
      Term r = args.back();
      for (size_t k = args.size() - 1; k-- > 0;) r = d_tm.mk_implies(args[k], r);
      return r;
    }
    if (op == "ite")
    {
      arity(e, 3, 3);
      return d_tm.mk_ite(args[0], args[1], args[2]);
    }
    fail(ParseError::Kind::UNKNOWN_SYMBOL, "unknown function '" + op + "'", head);
  }

  TermManager& d_tm;
};

const std::string& symbol_of(const SExpr& e)
{
  if (!e.is_atom() || e.atom.empty() || e.atom[0] == '"' || e.atom[0] == '#')
    syntax("symbol expected", e);
  return e.atom;
}

}  // namespace

std::vector<SExpr> parse_sexprs(std::string_view text) { return Reader(text).read_all(); }

std::vector<Term> Script::assertions() const
{
  std::vector<Term> r;
  for (const Command& c : commands)
    if (c.kind == CommandKind::ASSERT) r.push_back(c.term);
  return r;
}

std::vector<Term> Script::declared() const
{
  std::vector<Term> r;
  for (const Command& c : commands)
    if (c.kind == CommandKind::DECLARE_CONST) r.push_back(c.term);
  return r;
}

bool Script::has_check_sat() const
{
  for (const Command& c : commands)
    if (c.kind == CommandKind::CHECK_SAT) return true;
  return false;
}

bool Script::has_get_model() const
{
  for (const Command& c : commands)
    if (c.kind == CommandKind::GET_MODEL) return true;
  return false;
}

Script parse_script(TermManager& tm, std::string_view text)
{
  Script script;
  TermParser tp(tm);
  std::unordered_set<std::string> declared;
  bool checked = false;
  for (const SExpr& cmd : parse_sexprs(text))
  {
    if (cmd.is_atom() || cmd.items.empty() || !cmd.items[0].is_atom())
      syntax("command expected", cmd);
    const std::string& name = cmd.items[0].atom;
    size_t n = cmd.items.size() - 1;
    auto want = [&](size_t k) {
      if (n != k) syntax("arity mismatch for '" + name + "'", cmd);
    };
    auto declare = [&](const SExpr& sym, Sort sort) {
      const std::string& s = symbol_of(sym);
      if (declared.count(s)) syntax("'" + s + "' already declared", sym);
      auto existing = tm.lookup_const(s);
      if (existing && existing->sort() != sort)
        fail(ParseError::Kind::SORT, "'" + s + "' already declared with another sort", sym);
      declared.insert(s);
      Term c = tm.mk_const(sort, s);
      script.commands.push_back(Command{CommandKind::DECLARE_CONST, c, {}});
      return c;
    };

    if (name == "set-logic")
    {
      want(1);
      script.commands.push_back(Command{CommandKind::SET_LOGIC, Term(), cmd.items[1].atom});
    }
    else if (name == "set-info" || name == "set-option")
    {
      continue;
    }
    else if (name == "declare-const")
    {
      want(2);
      declare(cmd.items[1], tp.sort(cmd.items[2]));
    }
    else if (name == "declare-fun")
    {
      want(3);
      if (cmd.items[2].is_atom() || !cmd.items[2].items.empty())
        syntax("only nullary functions are supported", cmd.items[2]);
      declare(cmd.items[1], tp.sort(cmd.items[3]));
    }
    else if (name == "define-fun")
    {
      want(4);
      if (cmd.items[2].is_atom() || !cmd.items[2].items.empty())
        syntax("only nullary definitions are supported", cmd.items[2]);
      Sort s = tp.sort(cmd.items[3]);
      Term body = tp.term(cmd.items[4]);
      if (body.sort() != s) fail(ParseError::Kind::SORT, "definition body has another sort", cmd.items[4]);
      const std::string& sym = symbol_of(cmd.items[1]);
      Term c;
      if (declared.count(sym))
      {
        c = *tm.lookup_const(sym);
        if (c.sort() != s) fail(ParseError::Kind::SORT, "'" + sym + "' declared with another sort", cmd.items[1]);
      }
      else
      {
        c = declare(cmd.items[1], s);
      }
      script.commands.push_back(Command{CommandKind::ASSERT, tm.mk_eq(c, body), {}});
    }
    else if (name == "assert")
    {
      want(1);
      Term f = tp.term(cmd.items[1]);
      if (!f.sort().is_bool()) fail(ParseError::Kind::SORT, "assertion is not Bool", cmd.items[1]);
      script.commands.push_back(Command{CommandKind::ASSERT, f, {}});
    }
    else if (name == "check-sat")
    {
      want(0);
      if (checked) syntax("more than one check-sat", cmd);
      checked = true;
      script.commands.push_back(Command{CommandKind::CHECK_SAT, Term(), {}});
    }
    else if (name == "get-model")
    {
      want(0);
      if (!checked) syntax("get-model before check-sat", cmd);
      script.commands.push_back(Command{CommandKind::GET_MODEL, Term(), {}});
    }
    else if (name == "exit")
    {
      want(0);
      script.commands.push_back(Command{CommandKind::EXIT, Term(), {}});
    }
    else
    {
      syntax("unsupported command '" + name + "'", cmd);
    }
  }
  return script;
}

Term parse_term(TermManager& tm, std::string_view text)
{
  std::vector<SExpr> es = parse_sexprs(text);
  if (es.size() != 1)
    throw ParseError(ParseError::Kind::SYNTAX, "exactly one term expected", 1, 1);
  return TermParser(tm).term(es[0]);
}

std::string print_sort(Sort sort) { return sort.to_string(); }

std::string print_term(Term term) { return term.to_string(); }

std::string print_script(std::span<const Term> assertions,
                         std::span<const Term> declared,
                         const std::string& logic)
{
  std::ostringstream out;
  out << "(set-logic " << logic << ")\n";
  std::unordered_set<Term> seen;
  for (const Term& c : declared)
  {
    if (seen.insert(c).second)
      out << "(declare-const " << c.symbol() << " " << print_sort(c.sort()) << ")\n";
  }
  for (const Term& c : free_constants(assertions))
  {
    if (seen.insert(c).second)
      out << "(declare-const " << c.symbol() << " " << print_sort(c.sort()) << ")\n";
  }
  for (const Term& a : assertions) out << "(assert " << print_term(a) << ")\n";
  out << "(check-sat)\n";
  return out.str();
}

namespace {

std::string scalar_text(Sort sort, uint64_t bits)
{
  if (sort.is_bool()) return bits ? "true" : "false";
  std::string s = "#b";
  for (uint32_t k = sort.bv_width(); k-- > 0;) s.push_back(((bits >> k) & 1) ? '1' : '0');
  return s;
}

}  // namespace

std::string print_value(Sort sort, const Value& value)
{
  if (!sort.is_array()) return scalar_text(sort, value.scalar);
  const ArrayValue& a = *value.array;
  std::string text = "((as const " + print_sort(sort) + ") "
                     + scalar_text(sort.array_element(), a.default_value) + ")";
  for (const auto& [i, e] : a.overrides)
  {
    text = "(store " + text + " " + scalar_text(sort.array_index(), i) + " "
           + scalar_text(sort.array_element(), e) + ")";
  }
  return text;
}

std::string print_model(const Model& model, std::span<const Term> constants)
{
  std::ostringstream out;
  for (const Term& c : constants)
  {
    if (!model.has(c)) continue;
    out << "(define-fun " << c.symbol() << " () " << print_sort(c.sort()) << " "
        << print_value(c.sort(), model.get(c)) << ")\n";
  }
  return out.str();
}

Model parse_model(TermManager& tm, std::string_view text)
{
  std::vector<SExpr> es = parse_sexprs(text);
  // Unwrap `(model ...)` or a bare outer list of definitions.
  if (es.size() == 1 && !es[0].is_atom() && !es[0].items.empty()
      && !es[0].items[0].is_atom("define-fun"))
  {
    SExpr outer = es[0];
    if (outer.items[0].is_atom("model")) outer.items.erase(outer.items.begin());
    es = outer.items;
  }
  TermParser tp(tm);
  Model model;
  Model empty;
  for (const SExpr& d : es)
  {
    if (d.is_atom() || d.items.size() != 5 || !d.items[0].is_atom("define-fun"))
      syntax("define-fun expected", d);
    if (d.items[2].is_atom() || !d.items[2].items.empty())
      syntax("only nullary definitions are supported", d.items[2]);
    Sort s = tp.sort(d.items[3]);
    const std::string& sym = symbol_of(d.items[1]);
    auto existing = tm.lookup_const(sym);
    if (existing && existing->sort() != s)
      fail(ParseError::Kind::SORT, "'" + sym + "' has another sort", d.items[1]);
    Term c = tm.mk_const(s, sym);
    Term body = tp.term(d.items[4]);
    if (body.sort() != s) fail(ParseError::Kind::SORT, "definition body has another sort", d.items[4]);
    try
    {
      model.set(c, eval_term(empty, body));
    }
    catch (const UnassignedConstant&)
    {
      syntax("model value must be a closed term", d.items[4]);
    }
  }
  return model;
}

}  // namespace caext
