#include <gtest/gtest.h>

#include "caext/benchgen.h"
#include "caext/error.h"
#include "caext/flatten.h"
#include "caext/model.h"
#include "caext/oracle.h"

using namespace caext;

namespace {

std::unordered_map<Term, Term> definition_map(const FlatLiteralSet& flat)
{
  return {flat.definitions.begin(), flat.definitions.end()};
}

}  // namespace

TEST(Flatten, ReadOverWriteGetsOneNamePerApplication)
{
  TermManager tm;
  Sort bv2 = tm.mk_bv_sort(2), b = tm.mk_bool_sort();
  Term a = tm.mk_const(tm.mk_array_sort(bv2, b), "a");
  Term i = tm.mk_const(bv2, "i"), j = tm.mk_const(bv2, "j");
  Term u = tm.mk_const(b, "u"), w = tm.mk_const(b, "w");
  Term st = tm.mk_store(a, i, u);
  Term f = tm.mk_eq(tm.mk_select(st, j), w);
  std::vector<Term> in{f};
  FlatLiteralSet flat = flatten(tm, in);

  ASSERT_EQ(flat.definitions.size(), 2u);
  Term t1 = flat.definitions[0].first, t2 = flat.definitions[1].first;
  EXPECT_EQ(flat.definitions[0].second, st);
  EXPECT_EQ(flat.definitions[1].second, tm.mk_select(t1, j));
  EXPECT_EQ(t1.symbol().rfind("__flat_", 0), 0u);
  std::vector<Term> expected{tm.mk_eq(t1, st), tm.mk_eq(t2, tm.mk_select(t1, j)),
                             tm.mk_eq(t2, w)};
  EXPECT_EQ(flat.formulas, expected);
  for (const Term& g : flat.formulas) EXPECT_TRUE(is_flat_literal(g)) << g;
  EXPECT_FALSE(is_flat_literal(f));
}

TEST(Flatten, FlatInputIsUnchanged)
{
  TermManager tm;
  Sort bv2 = tm.mk_bv_sort(2);
  Term x = tm.mk_const(bv2, "x"), y = tm.mk_const(bv2, "y");
  std::vector<Term> in{tm.mk_eq(x, y), tm.mk_not(tm.mk_eq(x, tm.mk_value(bv2, 1)))};
  FlatLiteralSet flat = flatten(tm, in);
  EXPECT_EQ(flat.formulas, in);
  EXPECT_TRUE(flat.definitions.empty());
}

TEST(Flatten, ArrayDisequalityStaysANegatedAtom)
{
  TermManager tm;
  Sort s = tm.mk_array_sort(tm.mk_bool_sort(), tm.mk_bool_sort());
  Term a = tm.mk_const(s, "a"), c = tm.mk_const(s, "c");
  std::vector<Term> in{tm.mk_not(tm.mk_eq(a, c))};
  EXPECT_EQ(flatten(tm, in).formulas, in);
}

TEST(Flatten, ArrayIteBecomesGuardedEqualities)
{
  TermManager tm;
  Sort b = tm.mk_bool_sort(), s = tm.mk_array_sort(b, b);
  Term a = tm.mk_const(s, "a"), c = tm.mk_const(s, "c"), d = tm.mk_const(s, "d");
  Term p = tm.mk_const(b, "p");
  std::vector<Term> in{tm.mk_eq(tm.mk_ite(p, a, c), d)};
  FlatLiteralSet flat = flatten(tm, in);
  ASSERT_EQ(flat.definitions.size(), 1u);
  Term x = flat.definitions[0].first;
  EXPECT_TRUE(x.sort().is_array());
  for (const Term& f : flat.formulas)
  {
    EXPECT_TRUE(is_flat_formula(f)) << f;
    for (const Term& sub : subterms_postorder(std::span(&f, 1)))
      EXPECT_FALSE(sub.kind() == Kind::ITE && sub.sort().is_array()) << f;
  }
  EXPECT_EQ(flat.formulas.back(), tm.mk_eq(x, d));
}

TEST(Flatten, SharedSubtermsShareNamesAcrossCalls)
{
  TermManager tm;
  Sort b = tm.mk_bool_sort(), s = tm.mk_array_sort(b, b);
  Term a = tm.mk_const(s, "a"), i = tm.mk_const(b, "i");
  Term r = tm.mk_select(a, i);
  Flattener fl(tm);
  FlatLiteralSet out;
  fl.add(tm.mk_eq(r, tm.mk_true()), out);
  size_t defs = out.definitions.size();
  fl.add(tm.mk_not(tm.mk_eq(r, tm.mk_const(b, "u"))), out);
  EXPECT_EQ(out.definitions.size(), defs);
}

TEST(Flatten, OutputIsFlatAndUnflattensToInput)
{
  for (uint64_t seed = 0; seed < 500; ++seed)
  {
    TermManager tm;
    std::vector<Term> in = gen_fuzz(tm, seed);
    FlatLiteralSet flat = flatten(tm, in);
    for (const Term& f : flat.formulas) EXPECT_TRUE(is_flat_formula(f)) << seed << ": " << f;
    auto defs = definition_map(flat);
    // Everything except the defining formulas is a flattened input.
    std::vector<Term> roots;
    for (const Term& f : flat.formulas)
    {
      bool is_def = false;
      for (const auto& [x, d] : flat.definitions)
      {
        is_def |= f == tm.mk_eq(x, d);
        if (x.sort().is_bool() && f.kind() == Kind::OR && f.num_children() == 2)
          is_def |= f[0] == tm.mk_not(x) || f[0] == x;
      }
      if (!is_def) roots.push_back(f);
    }
    ASSERT_EQ(roots.size(), in.size()) << seed;
    for (size_t x = 0; x < in.size(); ++x)
      EXPECT_EQ(unflatten(tm, roots[x], defs), in[x]) << seed;
  }
}

TEST(Flatten, PreservesSatisfiability)
{
  OracleBounds wide{4, 4, 16, 8, 4'000'000};
  size_t compared = 0, extended = 0;
  for (uint64_t seed = 0; seed < 400; ++seed)
  {
    TermManager tm;
    std::vector<Term> in = gen_fuzz(tm, seed);
    FlatLiteralSet flat = flatten(tm, in);
    OracleResult orig = oracle_solve(in);
    if (orig.sat)
    {
      // Extend the witness through the definitions.
      Model m = *orig.witness;
      for (const auto& [x, d] : flat.definitions) m.set(x, eval_term(m, d));
      Validation v = validate_model(m, flat.formulas);
      EXPECT_TRUE(v.valid) << seed << ": " << v.failing;
      ++extended;
    }
    if (within_oracle_bounds(flat.formulas, wide))
    {
      EXPECT_EQ(oracle_solve(flat.formulas, wide).sat, orig.sat) << seed;
      ++compared;
    }
  }
  EXPECT_GT(extended, 100u);
  EXPECT_GT(compared, 40u);
}

TEST(Flatten, RejectsNonFormulas)
{
  TermManager tm;
  Term x = tm.mk_const(tm.mk_bv_sort(2), "x");
  std::vector<Term> in{x};
  EXPECT_THROW(flatten(tm, in), SortMismatch);
}
