#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "caext/error.h"
#include "caext/model.h"
#include "caext/term.h"

namespace caext {

class ParseError : public Error
{
 public:
  enum class Kind
  {
    SYNTAX,
    UNKNOWN_SYMBOL,
    SORT,
  };

  ParseError(Kind kind, const std::string& msg, uint32_t line, uint32_t column);

  Kind kind() const { return d_kind; }
  uint32_t line() const { return d_line; }
  uint32_t column() const { return d_column; }

 private:
  Kind d_kind;
  uint32_t d_line;
  uint32_t d_column;
};

/// S-expression with the source position of its first character.
struct SExpr
{
  enum class Type
  {
    ATOM,
    LIST,
  };
  Type type = Type::ATOM;
  std::string atom;
  std::vector<SExpr> items;
  uint32_t line = 1;
  uint32_t column = 1;

  bool is_atom() const { return type == Type::ATOM; }
  bool is_atom(std::string_view s) const { return is_atom() && atom == s; }
};

/// Reads every top-level s-expression. Comments run from `;` to end of line;
/// `|quoted|` symbols and `"strings"` are single atoms.
std::vector<SExpr> parse_sexprs(std::string_view text);

enum class CommandKind
{
  SET_LOGIC,
  DECLARE_CONST,
  ASSERT,
  CHECK_SAT,
  GET_MODEL,
  EXIT,
};

struct Command
{
  CommandKind kind;
  /// Declared constant (DECLARE_CONST) or asserted formula (ASSERT).
  Term term;
  std::string logic;
};

struct Script
{
  std::vector<Command> commands;

  std::vector<Term> assertions() const;
  std::vector<Term> declared() const;
  bool has_check_sat() const;
  bool has_get_model() const;
};

/// Parses an SMT-LIB script. `set-info` and `set-option` are skipped,
/// `distinct` becomes pairwise disequalities, chained `=` becomes a
/// conjunction and `=>` associates to the right. A nullary `define-fun` of a
/// fresh name declares it and asserts the definition; of a declared constant
/// of the same sort it asserts the definition only.
Script parse_script(TermManager& tm, std::string_view text);

/// Parses a single term over constants already known to `tm`.
Term parse_term(TermManager& tm, std::string_view text);

std::string print_sort(Sort sort);
std::string print_term(Term term);

/// Declarations, one assertion per formula and `(check-sat)`.
std::string print_script(std::span<const Term> assertions,
                         std::span<const Term> declared = {},
                         const std::string& logic = "ALL");

/// Text for an array or scalar value: stores over an `(as const ...)` base.
std::string print_value(Sort sort, const Value& value);

/// One nullary `define-fun` per constant, in the given order. Constants
/// missing from the model are skipped.
std::string print_model(const Model& model, std::span<const Term> constants);

/// Reads `define-fun` lines as printed by print_model; an optional outer
/// list wrapper `(model ...)` or `( ... )` is accepted.
Model parse_model(TermManager& tm, std::string_view text);

}  // namespace caext
