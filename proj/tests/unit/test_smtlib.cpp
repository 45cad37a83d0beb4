#include <gtest/gtest.h>

#include "caext/benchgen.h"
#include "caext/error.h"
#include "caext/model.h"
#include "caext/smtlib.h"
#include "example2.h"

using namespace caext;
using caext::testing::Example2;

namespace {

const char* kWorkedExample = R"(
(set-logic QF_ABV)
(set-info :status sat)
(declare-const a (Array (_ BitVec 2) Bool))
(declare-const v Bool) (declare-const w Bool)
(declare-const i1 (_ BitVec 2)) (declare-const i2 (_ BitVec 2))
(declare-const j1 (_ BitVec 2)) (declare-const j2 (_ BitVec 2))
(declare-const u1 Bool) (declare-const u2 Bool) (declare-const u3 Bool) (declare-const u4 Bool)
; two chains through a
(assert (= (store ((as const (Array (_ BitVec 2) Bool)) v) i1 u1) (store a j1 u2)))
(assert (= (store a i2 u3) (store ((as const (Array (_ BitVec 2) Bool)) w) j2 u4)))
(check-sat)
(get-model)
(exit)
)";

ParseError parse_error(const std::string& text)
{
  TermManager tm;
  try
  {
    parse_script(tm, text);
  }
  catch (const ParseError& e)
  {
    return e;
  }
  ADD_FAILURE() << "no parse error for: " << text;
  return ParseError(ParseError::Kind::SYNTAX, "", 0, 0);
}

}  // namespace

TEST(Sexpr, CommentsQuotedSymbolsAndPositions)
{
  std::vector<SExpr> xs = parse_sexprs("; c\n(a |b c| \"s t\")\n  (d)");
  ASSERT_EQ(xs.size(), 2u);
  ASSERT_EQ(xs[0].items.size(), 3u);
  EXPECT_TRUE(xs[0].items[1].is_atom("b c"));
  EXPECT_EQ(xs[0].line, 2u);
  EXPECT_EQ(xs[1].line, 3u);
  EXPECT_EQ(xs[1].column, 3u);
  EXPECT_THROW(parse_sexprs("(a"), ParseError);
  EXPECT_THROW(parse_sexprs("a)"), ParseError);
}

TEST(Script, WorkedExampleParsesToTheSameTerms)
{
  TermManager tm;
  Script s = parse_script(tm, kWorkedExample);
  Example2 ex(tm);
  EXPECT_EQ(s.assertions(), ex.phi());
  EXPECT_EQ(s.declared().size(), 11u);
  EXPECT_TRUE(s.has_check_sat());
  EXPECT_TRUE(s.has_get_model());
  EXPECT_EQ(s.commands.front().logic, "QF_ABV");
}

TEST(Script, SugarExpansion)
{
  TermManager tm;
  Script s = parse_script(tm, R"(
(declare-const x (_ BitVec 2)) (declare-const y (_ BitVec 2)) (declare-const z (_ BitVec 2))
(declare-const p Bool) (declare-const q Bool) (declare-const r Bool)
(declare-const h (_ BitVec 4))
(assert (= x y z))
(assert (distinct x y z))
(assert (=> p q r))
(assert (= h #xa))
(assert (= y #b11))
)");
  Term x = *tm.lookup_const("x"), y = *tm.lookup_const("y"), z = *tm.lookup_const("z");
  Term p = *tm.lookup_const("p"), q = *tm.lookup_const("q"), r = *tm.lookup_const("r");
  Term h = *tm.lookup_const("h");
  std::vector<Term> as = s.assertions();
  ASSERT_EQ(as.size(), 5u);
  EXPECT_EQ(as[0], tm.mk_and({tm.mk_eq(x, y), tm.mk_eq(y, z)}));
  EXPECT_EQ(as[1], tm.mk_and({tm.mk_not(tm.mk_eq(x, y)), tm.mk_not(tm.mk_eq(x, z)),
                              tm.mk_not(tm.mk_eq(y, z))}));
  EXPECT_EQ(as[2], tm.mk_implies(p, tm.mk_implies(q, r)));
  EXPECT_EQ(as[3], tm.mk_eq(h, tm.mk_value(h.sort(), 10)));
  EXPECT_EQ(as[4], tm.mk_eq(y, tm.mk_value(y.sort(), 3)));
  EXPECT_FALSE(s.has_check_sat());
}

TEST(Script, NullaryDefineFunDeclaresAndAsserts)
{
  TermManager tm;
  Script s = parse_script(tm, "(declare-const x Bool)(define-fun y () Bool (not x))");
  Term x = *tm.lookup_const("x"), y = *tm.lookup_const("y");
  EXPECT_EQ(s.assertions(), std::vector<Term>{tm.mk_eq(y, tm.mk_not(x))});
}

TEST(Script, ErrorsCarryKindAndPosition)
{
  ParseError unknown = parse_error("(declare-const x Bool)\n(assert (= x y))");
  EXPECT_EQ(unknown.kind(), ParseError::Kind::UNKNOWN_SYMBOL);
  EXPECT_EQ(unknown.line(), 2u);
  EXPECT_EQ(unknown.column(), 14u);

  ParseError sort = parse_error(
      "(declare-const x Bool)\n(declare-const i (_ BitVec 2))\n(assert (= x i))");
  EXPECT_EQ(sort.kind(), ParseError::Kind::SORT);
  EXPECT_EQ(sort.line(), 3u);

  EXPECT_EQ(parse_error("(assert (select))").kind(), ParseError::Kind::SYNTAX);
  EXPECT_EQ(parse_error("(declare-const x Bool)(declare-const x Bool)").kind(),
            ParseError::Kind::SYNTAX);
  EXPECT_EQ(parse_error("(check-sat)(check-sat)").kind(), ParseError::Kind::SYNTAX);
  EXPECT_EQ(parse_error("(get-model)(check-sat)").kind(), ParseError::Kind::SYNTAX);
  EXPECT_EQ(parse_error("(declare-fun f (Bool) Bool)").kind(), ParseError::Kind::SYNTAX);
  EXPECT_EQ(parse_error("(push 1)").kind(), ParseError::Kind::SYNTAX);
}

TEST(Script, NestedArraysAreUnsupported)
{
  TermManager tm;
  EXPECT_THROW(parse_script(tm, "(declare-const a (Array Bool (Array Bool Bool)))"), Error);
  EXPECT_THROW(parse_script(tm, "(declare-const r Real)"), Error);
}

TEST(Printer, RoundTripsFuzzInstances)
{
  for (uint64_t seed = 0; seed < 300; ++seed)
  {
    TermManager tm;
    std::vector<Term> fs = gen_fuzz(tm, seed);
    bool has_distinct_n = false;
    for (const Term& t : subterms_postorder(fs)) has_distinct_n |= t.kind() == Kind::DISTINCT_N;
    if (has_distinct_n) continue;
    std::string text = print_script(fs);
    TermManager tm2;
    Script s = parse_script(tm2, text);
    ASSERT_EQ(s.assertions().size(), fs.size()) << text;
    for (size_t k = 0; k < fs.size(); ++k)
      EXPECT_EQ(print_term(s.assertions()[k]), print_term(fs[k])) << seed;
    EXPECT_EQ(print_script(s.assertions()), text);
  }
}

TEST(Printer, SortsAndValues)
{
  TermManager tm;
  Sort bv2 = tm.mk_bv_sort(2), arr = tm.mk_array_sort(bv2, tm.mk_bool_sort());
  EXPECT_EQ(print_sort(arr), "(Array (_ BitVec 2) Bool)");
  EXPECT_EQ(print_term(tm.mk_value(bv2, 2)), "#b10");
  EXPECT_EQ(print_term(tm.mk_true()), "true");
  ArrayValue a{0, {{0, 1}, {2, 1}}};
  EXPECT_EQ(print_value(arr, Value::of_array(a)),
            "(store (store ((as const (Array (_ BitVec 2) Bool)) false) #b00 true) #b10 true)");
  EXPECT_EQ(print_value(bv2, Value::of_scalar(3)), "#b11");
}

TEST(Model, PrintParseRoundTrip)
{
  TermManager tm;
  Example2 ex(tm);
  Model m;
  m.set(ex.a, Value::of_array(ArrayValue{1, {{1, 0}, {3, 0}}}));
  m.set(ex.v, Value::of_scalar(0));
  m.set(ex.i1, Value::of_scalar(2));
  std::vector<Term> order{ex.a, ex.v, ex.i1, ex.w};
  std::string text = print_model(m, order);
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
  for (const std::string& wrapped : {text, "(\n" + text + ")\n", "(model\n" + text + ")"})
  {
    Model back = parse_model(tm, wrapped);
    EXPECT_EQ(back.values(), m.values());
  }
  EXPECT_EQ(parse_model(tm, "").size(), 0u);
  EXPECT_THROW(parse_model(tm, "(define-fun v () Bool #b01)"), Error);
  EXPECT_THROW(parse_model(tm, "(define-fun v (x) Bool true)"), ParseError);
}

TEST(Model, ParsedModelValidatesScript)
{
  TermManager tm;
  Script s = parse_script(tm, kWorkedExample);
  Model m = parse_model(tm, R"(
(define-fun a () (Array (_ BitVec 2) Bool) ((as const (Array (_ BitVec 2) Bool)) false))
(define-fun v () Bool false) (define-fun w () Bool false)
(define-fun i1 () (_ BitVec 2) #b00) (define-fun i2 () (_ BitVec 2) #b00)
(define-fun j1 () (_ BitVec 2) #b00) (define-fun j2 () (_ BitVec 2) #b00)
(define-fun u1 () Bool false) (define-fun u2 () Bool false)
(define-fun u3 () Bool false) (define-fun u4 () Bool false)
)");
  EXPECT_TRUE(validate_model(m, s.assertions()).valid);
}
