#include <gtest/gtest.h>

#include <random>

#include "caext/array_engine.h"
#include "caext/benchgen.h"
#include "caext/error.h"
#include "caext/model.h"
#include "caext/solver.h"
#include "example2.h"

using namespace caext;
using caext::testing::Example2;

namespace {

/// Every table over the given domain sizes, with zero default.
std::vector<ArrayValue> all_tables(uint64_t index_size, uint64_t element_size)
{
  std::vector<ArrayValue> out;
  uint64_t count = 1;
  for (uint64_t k = 0; k < index_size; ++k) count *= element_size;
  for (uint64_t code = 0; code < count; ++code)
  {
    ArrayValue a;
    uint64_t c = code;
    for (uint64_t i = 0; i < index_size; ++i, c /= element_size)
      if (c % element_size) a.overrides[i] = c % element_size;
    out.push_back(a);
  }
  return out;
}

ArrayValue table(std::initializer_list<uint64_t> cells)
{
  ArrayValue a;
  uint64_t i = 0;
  for (uint64_t c : cells) a.overrides[i++] = c;
  return a;
}

struct SortCase
{
  uint32_t index_width;  // 0 for Bool
  uint32_t element_width;
};

Sort make(TermManager& tm, uint32_t w) { return w == 0 ? tm.mk_bool_sort() : tm.mk_bv_sort(w); }

}  // namespace

class ArrayAxioms : public ::testing::TestWithParam<SortCase>
{
};

TEST_P(ArrayAxioms, HoldExhaustively)
{
  TermManager tm;
  Sort idx = make(tm, GetParam().index_width), elem = make(tm, GetParam().element_width);
  Sort arr = tm.mk_array_sort(idx, elem);
  uint64_t ni = domain_size(idx), ne = domain_size(elem);
  Term a = tm.mk_const(arr, "a"), b = tm.mk_const(arr, "b");
  Term i = tm.mk_const(idx, "i"), j = tm.mk_const(idx, "j");
  Term u = tm.mk_const(elem, "u"), v = tm.mk_const(elem, "v");
  Term const_read = tm.mk_eq(tm.mk_select(tm.mk_const_array(arr, v), i), v);
  Term row_same = tm.mk_eq(tm.mk_select(tm.mk_store(a, i, u), i), u);
  Term row_other = tm.mk_implies(
      tm.mk_not(tm.mk_eq(i, j)),
      tm.mk_eq(tm.mk_select(tm.mk_store(a, i, u), j), tm.mk_select(a, j)));
  Term ab = tm.mk_eq(a, b);
  std::vector<ArrayValue> tables = all_tables(ni, ne);

  Model m;
  for (uint64_t x = 0; x < ne; ++x)
  {
    m.set(v, Value::of_scalar(x));
    m.set(u, Value::of_scalar(x));
    for (uint64_t y = 0; y < ni; ++y)
    {
      m.set(i, Value::of_scalar(y));
      ASSERT_TRUE(eval_formula(m, const_read));
      for (uint64_t z = 0; z < ni; ++z)
      {
        m.set(j, Value::of_scalar(z));
        for (const ArrayValue& t : tables)
        {
          m.set(a, Value::of_array(t));
          ASSERT_TRUE(eval_formula(m, row_same));
          ASSERT_TRUE(eval_formula(m, row_other));
        }
      }
    }
  }
  for (const ArrayValue& ta : tables)
  {
    m.set(a, Value::of_array(ta));
    for (const ArrayValue& tb : tables)
    {
      m.set(b, Value::of_array(tb));
      bool cells_equal = true;
      for (uint64_t k = 0; k < ni; ++k) cells_equal &= ta.at(k) == tb.at(k);
      ASSERT_EQ(eval_formula(m, ab), cells_equal);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(SmallSorts,
                         ArrayAxioms,
                         ::testing::Values(SortCase{0, 0}, SortCase{0, 2}, SortCase{1, 1},
                                           SortCase{2, 0}, SortCase{2, 2}, SortCase{1, 2}));

TEST(Canonical, EqualFunctionsHaveEqualForms)
{
  TermManager tm;
  std::mt19937_64 rng(5);
  for (uint32_t w : {1u, 2u, 3u})
  {
    Sort idx = tm.mk_bv_sort(w);
    uint64_t n = domain_size(idx);
    for (int round = 0; round < 300; ++round)
    {
      std::vector<uint64_t> cells(n);
      for (auto& c : cells) c = rng() % 3;
      // Two representations of the same function with different defaults.
      ArrayValue p{rng() % 3, {}}, q{rng() % 3, {}};
      for (uint64_t i = 0; i < n; ++i)
      {
        if (cells[i] != p.default_value || rng() % 2) p.overrides[i] = cells[i];
        if (cells[i] != q.default_value) q.overrides[i] = cells[i];
      }
      ArrayValue cp = canonical(p, idx), cq = canonical(q, idx);
      EXPECT_EQ(cp, cq);
      for (uint64_t i = 0; i < n; ++i) EXPECT_EQ(cp.at(i), cells[i]);
      for (const auto& [i, e] : cp.overrides) EXPECT_NE(e, cp.default_value);
    }
  }
}

TEST(Canonical, MajorityDefaultWithSmallestOnTies)
{
  TermManager tm;
  Sort bv2 = tm.mk_bv_sort(2);
  ArrayValue c = canonical(table({1, 1, 0, 1}), bv2);
  EXPECT_EQ(c.default_value, 1u);
  EXPECT_EQ(c.overrides, (std::map<uint64_t, uint64_t>{{2, 0}}));
  ArrayValue tie = canonical(table({1, 0, 1, 0}), bv2);
  EXPECT_EQ(tie.default_value, 0u);
}

TEST(Canonical, LargeDomainsOnlyDropRedundantOverrides)
{
  TermManager tm;
  Sort bv20 = tm.mk_bv_sort(20);
  ArrayValue a{7, {{1, 7}, {2, 3}}};
  ArrayValue c = canonical(a, bv20);
  EXPECT_EQ(c.default_value, 7u);
  EXPECT_EQ(c.overrides, (std::map<uint64_t, uint64_t>{{2, 3}}));
}

TEST(ModelApi, SetGetAndSortChecks)
{
  TermManager tm;
  Sort b = tm.mk_bool_sort(), arr = tm.mk_array_sort(b, b);
  Term x = tm.mk_const(b, "x"), a = tm.mk_const(arr, "a");
  Model m;
  EXPECT_THROW(m.set(a, Value::of_scalar(1)), Error);
  EXPECT_THROW(m.set(x, Value::of_array({})), Error);
  EXPECT_THROW(m.set(tm.mk_not(x), Value::of_scalar(1)), Error);
  EXPECT_THROW(m.get(x), UnassignedConstant);
  m.set(x, Value::of_scalar(1));
  m.set(a, zero_value(arr));
  EXPECT_EQ(m.get(x).scalar, 1u);
  EXPECT_TRUE(m.get(a).is_array());
  EXPECT_EQ(m.size(), 2u);
  EXPECT_THROW(eval_term(m, tm.mk_const(b, "y")), UnassignedConstant);
}

TEST(Validate, WorkedExampleModel)
{
  TermManager tm;
  Example2 ex(tm);
  std::vector<Term> fs = ex.with({tm.mk_not(tm.mk_eq(ex.v, ex.w))});
  Model m;
  m.set(ex.a, Value::of_array(table({1, 0, 1, 0})));
  for (auto [c, val] : std::initializer_list<std::pair<Term, uint64_t>>{
           {ex.i1, 0}, {ex.i2, 1}, {ex.j1, 2}, {ex.j2, 3}, {ex.v, 0}, {ex.u2, 0},
           {ex.u4, 0}, {ex.w, 1}, {ex.u1, 1}, {ex.u3, 1}})
    m.set(c, Value::of_scalar(val));
  EXPECT_TRUE(validate_model(m, fs).valid);

  m.set(ex.w, Value::of_scalar(0));
  Validation bad = validate_model(m, fs);
  EXPECT_FALSE(bad.valid);
  EXPECT_FALSE(bad.failing.is_null());

  Model partial;
  EXPECT_FALSE(validate_model(partial, fs).valid);
  EXPECT_TRUE(validate_model(partial, {}).valid);
}

TEST(BuildModel, WorkedExampleSaturatedInterpretation)
{
  for (ModelConstruction mode : {ModelConstruction::PER_INDEX, ModelConstruction::RECORDED_DEFAULTS})
  {
    TermManager tm;
    Example2 ex(tm);
    ArrayEngine engine(tm);
    std::vector<Term> fs = ex.with({tm.mk_not(tm.mk_eq(ex.v, ex.w))});
    for (const Term& f : fs) engine.add_formula(f);
    EXPECT_THROW(build_model(engine, mode), Error);
    engine.set_interpretation(ex.interpretation(0, 2, 1, 3, 1, 0, 1, 0, 0, 1));
    engine.init_steps();
    engine.propagate_fixpoint();
    ASSERT_FALSE(engine.check_conflicts().has_value());
    Model m = build_model(engine, mode);
    EXPECT_EQ(*m.get(ex.a).array, canonical(table({1, 0, 1, 0}), ex.idx));
    EXPECT_EQ(m.get(ex.j1).scalar, 2u);
    EXPECT_TRUE(validate_model(m, fs).valid);
  }
}

TEST(BuildModel, SolverModelIsForcedWorkedExampleModel)
{
  TermManager tm;
  Example2 ex(tm);
  Sort idx = ex.idx, elem = ex.elem;
  std::vector<Term> fs = ex.with({
      tm.mk_not(tm.mk_eq(ex.v, ex.w)),
      tm.mk_eq(ex.i1, tm.mk_value(idx, 0)),
      tm.mk_eq(ex.i2, tm.mk_value(idx, 1)),
      tm.mk_eq(ex.j1, tm.mk_value(idx, 2)),
      tm.mk_eq(ex.j2, tm.mk_value(idx, 3)),
      tm.mk_eq(ex.v, tm.mk_value(elem, 0)),
      tm.mk_eq(ex.u2, ex.v),
      tm.mk_eq(ex.u4, ex.v),
      tm.mk_eq(ex.u1, ex.w),
      tm.mk_eq(ex.u3, ex.w),
  });
  Solver s(tm);
  for (const Term& f : fs) s.assert_formula(f);
  ASSERT_EQ(s.check_sat(), Verdict::SAT);
  Model m = s.model_for(free_constants(fs));
  EXPECT_EQ(*m.get(ex.a).array, canonical(table({1, 0, 1, 0}), idx));
}

TEST(BuildModel, ReadsAndDefaultsFillTables)
{
  TermManager tm;
  Sort idx = tm.mk_bv_sort(2), elem = tm.mk_bv_sort(2), arr = tm.mk_array_sort(idx, elem);
  Term a = tm.mk_const(arr, "a"), b = tm.mk_const(arr, "b");
  Term i = tm.mk_const(idx, "i"), x = tm.mk_const(elem, "x"), v = tm.mk_const(elem, "v");
  Term cv = tm.mk_const_array(arr, v);
  Term ai = tm.mk_select(a, i);
  ArrayEngine engine(tm);
  engine.add_formula(tm.mk_eq(ai, x));
  engine.add_formula(tm.mk_eq(b, cv));
  Interpretation I;
  I.set(a, 0);
  I.set(b, 1);
  I.set(cv, 1);
  I.set(i, 2);
  I.set(x, 3);
  I.set(ai, 3);
  I.set(v, 2);
  engine.set_interpretation(I);
  engine.init_steps();
  engine.propagate_fixpoint();
  ASSERT_FALSE(engine.check_conflicts().has_value());
  Model m = build_model(engine);
  EXPECT_EQ(*m.get(a).array, (ArrayValue{0, {{2, 3}}}));
  EXPECT_EQ(*m.get(b).array, (ArrayValue{2, {}}));
}

namespace {

/// An array c reached by ⟨v⟩ first through a store y = store(c,k,u2) that is
/// equal to x = store(⟨v⟩,k,u1), and only later through a longer chain of
/// equalities c = e3 = e2 = e1 = ⟨v⟩. c's entry for ⟨v⟩ then records k as an
/// updated index although the chain fixes c[k] = v.
struct StorePathBeforeChain
{
  TermManager tm;
  Sort idx = tm.mk_bv_sort(2), elem = tm.mk_bool_sort(), arr = tm.mk_array_sort(idx, elem);
  Term v = tm.mk_const(elem, "v"), k = tm.mk_const(idx, "k");
  Term u1 = tm.mk_const(elem, "u1"), u2 = tm.mk_const(elem, "u2");
  Term c = tm.mk_const(arr, "c"), e1 = tm.mk_const(arr, "e1"), e2 = tm.mk_const(arr, "e2"),
       e3 = tm.mk_const(arr, "e3");
  Term cv = tm.mk_const_array(arr, v);
  Term x = tm.mk_store(cv, k, u1), y = tm.mk_store(c, k, u2);
  std::vector<Term> formulas{tm.mk_eq(x, y), tm.mk_eq(c, e3), tm.mk_eq(e3, e2),
                             tm.mk_eq(e2, e1), tm.mk_eq(e1, cv)};

  void saturate(ArrayEngine& engine)
  {
    for (const Term& f : formulas) engine.add_formula(f);
    Interpretation I;
    for (Term t : {cv, c, e1, e2, e3}) I.set(t, 1);
    I.set(x, 2);
    I.set(y, 2);
    I.set(v, 1);
    I.set(k, 0);
    I.set(u1, 0);
    I.set(u2, 0);
    I.set(tm.mk_select(x, k), 0);
    I.set(tm.mk_select(y, k), 0);
    engine.set_interpretation(I);
    engine.init_steps();
    engine.propagate_fixpoint();
  }
};

}  // namespace

TEST(BuildModel, RecordedDefaultsMissAnEqualityChain)
{
  StorePathBeforeChain g;
  ArrayEngine engine(g.tm);
  g.saturate(engine);
  ASSERT_FALSE(engine.check_conflicts().has_value());
  EXPECT_EQ(engine.compute_updated_indices(g.c, g.cv), std::vector<Term>{g.k});
  EXPECT_TRUE(engine.compute_updated_indices(g.e3, g.cv).empty());

  Model recorded = build_model(engine, ModelConstruction::RECORDED_DEFAULTS);
  Validation rv = validate_model(recorded, g.formulas);
  EXPECT_FALSE(rv.valid);
  EXPECT_EQ(rv.failing, g.tm.mk_eq(g.c, g.e3));

  Model per_index = build_model(engine, ModelConstruction::PER_INDEX);
  EXPECT_TRUE(validate_model(per_index, g.formulas).valid);
  EXPECT_EQ(*per_index.get(g.c).array, (ArrayValue{1, {}}));
}

TEST(BuildModel, SolverModelsValidateOnRandomInstances)
{
  size_t sat = 0;
  for (uint64_t seed = 0; seed < 300; ++seed)
  {
    TermManager tm;
    std::vector<Term> fs = gen_fuzz(tm, seed);
    Solver s(tm);
    for (const Term& f : fs) s.assert_formula(f);
    if (s.check_sat() != Verdict::SAT) continue;
    ++sat;
    EXPECT_TRUE(validate_model(s.model_for(free_constants(fs)), fs).valid) << seed;
  }
  EXPECT_GT(sat, 100u);
}
