#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "caext/array_engine.h"
#include "caext/benchgen.h"
#include "caext/error.h"
#include "caext/flatten.h"
#include "caext/ground_solver.h"
#include "caext/oracle.h"
#include "example2.h"

using namespace caext;
using caext::testing::Example2;

namespace {

std::set<Term, TermIdLess> as_set(const std::vector<Term>& ts) { return {ts.begin(), ts.end()}; }

class EngineModes : public ::testing::TestWithParam<bool>
{
 protected:
  EngineOptions options() const { return EngineOptions{GetParam(), true}; }
};

/// Engine over φ ∧ v≉w under the given interpretation, at fixpoint.
struct WorkedExample
{
  TermManager tm;
  Example2 ex{tm};
  ArrayEngine engine;
  Term vw;

  explicit WorkedExample(EngineOptions opts) : engine(tm, opts)
  {
    vw = tm.mk_not(tm.mk_eq(ex.v, ex.w));
    for (const Term& f : ex.with({vw})) engine.add_formula(f);
  }

  void run(const Interpretation& I)
  {
    engine.set_interpretation(I);
    engine.init_steps();
    engine.propagate_fixpoint();
  }

  void expect_step(Term dest, Term t, Term reason, Term source, Rule rule)
  {
    ASSERT_TRUE(engine.has_step(dest, t)) << dest << " / " << t;
    Step s = engine.step(dest, t);
    EXPECT_EQ(s.reason, reason) << dest << " / " << t;
    EXPECT_EQ(s.source, source) << dest << " / " << t;
    EXPECT_EQ(s.rule, rule) << dest << " / " << t;
  }
};

}  // namespace

TEST_P(EngineModes, InitialStepsAreSelfSteps)
{
  WorkedExample w(options());
  w.engine.set_interpretation(w.ex.interpretation(0, 0, 0, 0, 0, 0, 0, 0, 0, 1));
  w.engine.init_steps();
  Term top = w.tm.mk_true();
  EXPECT_EQ(w.engine.propagation_map().size(), 6u);
  for (Term s : {w.ex.s1, w.ex.s2, w.ex.s3, w.ex.s4})
    w.expect_step(s, w.engine.virtual_read(s), top, s, Rule::INIT_W);
  w.expect_step(w.ex.cv, w.ex.cv, top, w.ex.cv, Rule::INIT_C);
  w.expect_step(w.ex.cw, w.ex.cw, top, w.ex.cw, Rule::INIT_C);
  EXPECT_TRUE(w.engine.compute_reason(w.ex.cv, w.ex.cv).empty());
  EXPECT_TRUE(w.engine.compute_updated_indices(w.ex.cv, w.ex.cv).empty());
}

TEST_P(EngineModes, ReadOfSelectAtomGetsInitR)
{
  TermManager tm;
  Sort idx = tm.mk_bv_sort(2), elem = tm.mk_bool_sort();
  Term a = tm.mk_const(tm.mk_array_sort(idx, elem), "a");
  Term i = tm.mk_const(idx, "i");
  Term x = tm.mk_const(elem, "x");
  Term r = tm.mk_select(a, i);
  ArrayEngine engine(tm, options());
  engine.add_formula(tm.mk_eq(r, x));
  Interpretation I;
  I.set(a, 0);
  I.set(i, 2);
  I.set(x, 1);
  I.set(r, 1);
  engine.set_interpretation(I);
  engine.init_steps();
  engine.propagate_fixpoint();
  ASSERT_EQ(engine.propagation_map().size(), 1u);
  EXPECT_EQ(engine.step(a, r).rule, Rule::INIT_R);
  EXPECT_FALSE(engine.check_conflicts().has_value());
  EXPECT_EQ(engine.state(), EngineState::SATURATED);
}

TEST_P(EngineModes, WorkedExampleFirstInterpretationSteps)
{
  WorkedExample w(options());
  auto& ex = w.ex;
  w.run(ex.interpretation(0, 0, 0, 0, 0, 0, 0, 0, 0, 1));
  Term top = w.tm.mk_true();
  w.expect_step(ex.s1, ex.cv, top, ex.cv, Rule::COW_U);
  w.expect_step(ex.s2, ex.cv, ex.eq12, ex.s1, Rule::CEQ_R);
  w.expect_step(ex.a, ex.cv, top, ex.s2, Rule::COW_D);
  w.expect_step(ex.s3, ex.cv, top, ex.a, Rule::COW_U);
  w.expect_step(ex.s4, ex.cv, ex.eq34, ex.s3, Rule::CEQ_R);
  w.expect_step(ex.cw, ex.cv, top, ex.s4, Rule::COW_D);

  EXPECT_EQ(as_set(w.engine.compute_reason(ex.cw, ex.cv)), as_set({ex.eq12, ex.eq34}));
  EXPECT_EQ(as_set(w.engine.compute_updated_indices(ex.cw, ex.cv)),
            as_set({ex.i1, ex.j1, ex.i2, ex.j2}));
  EXPECT_EQ(as_set(w.engine.compute_updated_indices(ex.s1, ex.cv)), as_set({ex.i1}));
  EXPECT_EQ(as_set(w.engine.compute_reason(ex.cv, ex.cw)), as_set({ex.eq12, ex.eq34}));

  // s1[i1] crosses to s2 but stops there: i1 and j1 are equal under I.
  Term r1 = w.engine.virtual_read(ex.s1);
  w.expect_step(ex.s2, r1, ex.eq12, ex.s1, Rule::EQ_R);
  EXPECT_FALSE(w.engine.has_step(ex.a, r1));
  EXPECT_THROW(w.engine.compute_reason(ex.a, r1), UndefinedStep);
  EXPECT_THROW(w.engine.compute_updated_indices(ex.a, ex.s1), UndefinedStep);
}

TEST_P(EngineModes, WorkedExampleFirstInterpretationCongC)
{
  WorkedExample w(options());
  auto& ex = w.ex;
  w.run(ex.interpretation(0, 0, 0, 0, 0, 0, 0, 0, 0, 1));
  size_t before = w.engine.formulas().size();
  std::optional<Lemma> lemma = w.engine.check_conflicts();
  ASSERT_TRUE(lemma.has_value());
  EXPECT_EQ(lemma->rule, Rule::CONG_C);
  EXPECT_EQ(lemma->conclusion, w.tm.mk_eq(ex.v, ex.w));

  std::set<Term, TermIdLess> plain;
  std::vector<Term> distinct_args;
  for (const Term& l : lemma->antecedents)
  {
    if (l.kind() == Kind::NOT && l[0].kind() == Kind::DISTINCT_N)
    {
      EXPECT_EQ(l[0].distinct_n(), 4u);
      distinct_args.assign(l[0].children().begin(), l[0].children().end());
    }
    else
      plain.insert(l);
  }
  EXPECT_EQ(plain, as_set({ex.eq12, ex.eq34}));
  std::multiset<Term, TermIdLess> got(distinct_args.begin(), distinct_args.end());
  std::multiset<Term, TermIdLess> want{ex.i1, ex.j1, ex.i2, ex.j2};
  EXPECT_EQ(got, want);

  EXPECT_EQ(w.engine.formulas().size(), before + 1);
  EXPECT_EQ(w.engine.formulas().back(), lemma->formula);
  EXPECT_FALSE(w.engine.has_interpretation());
  EXPECT_TRUE(w.engine.propagation_map().empty());

  OracleBounds wide{4, 4, 14, 4, 10'000'000};
  EXPECT_TRUE(oracle_valid(lemma->formula, wide).valid);
}

TEST_P(EngineModes, WorkedExampleSecondInterpretationRoc)
{
  WorkedExample w(options());
  auto& ex = w.ex;
  w.run(ex.interpretation(0, 1, 2, 3, 1, 1, 1, 1, 0, 1));
  Term r2 = w.engine.virtual_read(ex.s2);
  Term ji = w.tm.mk_not(w.tm.mk_eq(ex.j1, ex.i1));
  w.expect_step(ex.s1, r2, ex.eq12, ex.s2, Rule::EQ_L);
  w.expect_step(ex.cv, r2, ji, ex.s1, Rule::ROW_D);

  std::optional<Lemma> lemma = w.engine.check_conflicts();
  ASSERT_TRUE(lemma.has_value());
  EXPECT_EQ(lemma->rule, Rule::ROC);
  EXPECT_EQ(lemma->conclusion, w.tm.mk_eq(r2, ex.v));
  EXPECT_EQ(as_set(lemma->antecedents), as_set({ex.eq12, ji}));
  OracleBounds wide{4, 4, 14, 4, 10'000'000};
  EXPECT_TRUE(oracle_valid(lemma->formula, wide).valid);
}

TEST_P(EngineModes, WorkedExampleSaturatingInterpretation)
{
  WorkedExample w(options());
  auto& ex = w.ex;
  // i1=0, j1=2, i2=1, j2=3, u1=1, u2=0, u3=1, u4=0, v=0, w=1
  w.run(ex.interpretation(0, 2, 1, 3, 1, 0, 1, 0, 0, 1));
  EXPECT_FALSE(w.engine.check_conflicts().has_value());
  EXPECT_EQ(w.engine.state(), EngineState::SATURATED);
  EXPECT_EQ(w.engine.stats().lemmas, 0u);
}

TEST_P(EngineModes, EntriesAreSetOnce)
{
  WorkedExample w(options());
  std::set<std::pair<uint64_t, uint64_t>> seen;
  bool duplicate = false;
  w.engine.on_step = [&](const StepKey& k, const Step&) {
    duplicate |= !seen.emplace(k.dest.id(), k.term.id()).second;
  };
  w.run(w.ex.interpretation(0, 0, 0, 0, 0, 0, 0, 0, 0, 1));
  size_t size = w.engine.propagation_map().size();
  w.engine.propagate_fixpoint();
  EXPECT_FALSE(duplicate);
  EXPECT_EQ(w.engine.propagation_map().size(), size);
  EXPECT_EQ(seen.size(), size);
}

TEST_P(EngineModes, DisEqFiresOncePerAtom)
{
  TermManager tm;
  Sort idx = tm.mk_bv_sort(2), elem = tm.mk_bool_sort(), arr = tm.mk_array_sort(idx, elem);
  Term a = tm.mk_const(arr, "a"), b = tm.mk_const(arr, "b");
  Term eq = tm.mk_eq(a, b);
  ArrayEngine engine(tm, options());
  engine.add_formula(tm.mk_not(eq));
  Interpretation I;
  I.set(a, 0);
  I.set(b, 1);
  engine.set_interpretation(I);
  engine.init_steps();
  engine.propagate_fixpoint();
  std::optional<Lemma> lemma = engine.check_conflicts();
  ASSERT_TRUE(lemma.has_value());
  EXPECT_EQ(lemma->rule, Rule::DIS_EQ);
  Term k = tm.mk_const(idx, "__ext_k_" + std::to_string(eq.id()));
  Term ak = tm.mk_select(a, k), bk = tm.mk_select(b, k);
  EXPECT_EQ(lemma->conclusion, tm.mk_not(tm.mk_eq(ak, bk)));
  EXPECT_EQ(lemma->antecedents, std::vector<Term>{tm.mk_not(eq)});

  I.set(k, 0);
  I.set(ak, 0);
  I.set(bk, 1);
  engine.set_interpretation(I);
  engine.init_steps();
  engine.propagate_fixpoint();
  EXPECT_FALSE(engine.check_conflicts().has_value());
  EXPECT_EQ(engine.stats().lemmas_by_rule.at(Rule::DIS_EQ), 1u);
}

TEST_P(EngineModes, CongRAddsIndexEqualityOnlyForDistinctIndexTerms)
{
  TermManager tm;
  Sort idx = tm.mk_bv_sort(2), elem = tm.mk_bool_sort(), arr = tm.mk_array_sort(idx, elem);
  Term a = tm.mk_const(arr, "a");
  Term i = tm.mk_const(idx, "i"), j = tm.mk_const(idx, "j");
  Term x = tm.mk_const(elem, "x"), y = tm.mk_const(elem, "y");
  Term ai = tm.mk_select(a, i), aj = tm.mk_select(a, j);
  ArrayEngine engine(tm, options());
  engine.add_formula(tm.mk_eq(ai, x));
  engine.add_formula(tm.mk_eq(aj, y));
  Interpretation I;
  I.set(a, 0);
  I.set(i, 1);
  I.set(j, 1);
  I.set(x, 0);
  I.set(y, 1);
  I.set(ai, 0);
  I.set(aj, 1);
  engine.set_interpretation(I);
  engine.init_steps();
  engine.propagate_fixpoint();
  std::optional<Lemma> lemma = engine.check_conflicts();
  ASSERT_TRUE(lemma.has_value());
  EXPECT_EQ(lemma->rule, Rule::CONG_R);
  EXPECT_EQ(lemma->antecedents, std::vector<Term>{tm.mk_eq(i, j)});
  EXPECT_EQ(lemma->conclusion, tm.mk_eq(ai, aj));
  EXPECT_TRUE(oracle_valid(lemma->formula).valid);
}

TEST(ExistsFreshIndex, CountsDistinctValues)
{
  TermManager tm;
  Sort bv2 = tm.mk_bv_sort(2), b = tm.mk_bool_sort();
  std::vector<Term> ks;
  Interpretation I;
  for (int n = 0; n < 4; ++n)
  {
    ks.push_back(tm.mk_const(bv2, "k" + std::to_string(n)));
    I.set(ks.back(), n);
  }
  EXPECT_FALSE(ArrayEngine::exists_fresh_index(I, ks, bv2));
  EXPECT_TRUE(ArrayEngine::exists_fresh_index(I, std::span(ks).first(1), bv2));
  EXPECT_TRUE(ArrayEngine::exists_fresh_index(I, std::span(ks).first(3), bv2));
  I.set(ks[3], 0);
  EXPECT_TRUE(ArrayEngine::exists_fresh_index(I, ks, bv2));
  EXPECT_TRUE(ArrayEngine::exists_fresh_index(I, {}, b));
}

namespace {

struct FuzzRun
{
  Interpretation interp;
  std::vector<Term> formulas;
};

/// Flattened fuzz instance plus one ground interpretation of it.
std::optional<FuzzRun> ground_run(TermManager& tm, uint64_t seed)
{
  std::vector<Term> input = gen_fuzz(tm, seed);
  FlatLiteralSet flat = flatten(tm, input);
  GroundSolver ground(tm);
  ground.reserve(flat.formulas);
  for (const Term& f : flat.formulas) ground.assert_formula(f);
  if (ground.solve() != GroundResult::SAT) return std::nullopt;
  return FuzzRun{ground.interpretation(), flat.formulas};
}

}  // namespace

TEST(EngineProperties, ReplayAndEagerAgreeOnEveryEntry)
{
  for (uint64_t seed = 0; seed < 300; ++seed)
  {
    TermManager tm;
    std::optional<FuzzRun> run = ground_run(tm, seed);
    if (!run) continue;
    ArrayEngine eager(tm, {false, true}), replay(tm, {true, true});
    for (const Term& f : run->formulas)
    {
      eager.add_formula(f);
      replay.add_formula(f);
    }
    for (ArrayEngine* e : {&eager, &replay})
    {
      e->set_interpretation(run->interp);
      e->init_steps();
      e->propagate_fixpoint();
    }
    ASSERT_EQ(eager.propagation_map().size(), replay.propagation_map().size()) << seed;
    for (const auto& [key, step] : eager.propagation_map())
    {
      ASSERT_TRUE(replay.has_step(key.dest, key.term)) << seed;
      Step r = replay.step(key.dest, key.term);
      EXPECT_EQ(r.rule, step.rule) << seed;
      EXPECT_EQ(r.source, step.source) << seed;
      EXPECT_EQ(r.reason, step.reason) << seed;
      EXPECT_EQ(replay.compute_reason(key.dest, key.term),
                eager.compute_reason(key.dest, key.term))
          << seed;
      if (key.term.kind() == Kind::CONST_ARRAY)
      {
        EXPECT_EQ(as_set(replay.compute_updated_indices(key.dest, key.term)),
                  as_set(eager.compute_updated_indices(key.dest, key.term)))
            << seed;
      }
    }
  }
}

TEST(EngineProperties, ReasonsHoldAndLemmasExcludeTheInterpretation)
{
  uint64_t lemmas = 0;
  for (uint64_t seed = 0; seed < 300; ++seed)
  {
    TermManager tm;
    std::optional<FuzzRun> run = ground_run(tm, seed);
    if (!run) continue;
    ArrayEngine engine(tm, {true, false});
    for (const Term& f : run->formulas) engine.add_formula(f);
    engine.set_interpretation(run->interp);
    engine.init_steps();
    engine.propagate_fixpoint();
    for (const auto& [key, step] : engine.propagation_map())
    {
      EXPECT_TRUE(eval_atom(run->interp, engine.compute_reason_term(key.dest, key.term)))
          << seed;
      EXPECT_TRUE(eval_atom(run->interp, engine.step(key.dest, key.term).reason)) << seed;
    }
    std::optional<Lemma> lemma = engine.check_conflicts();
    if (!lemma || lemma->rule == Rule::DIS_EQ) continue;
    ++lemmas;
    for (const Term& l : lemma->antecedents) EXPECT_TRUE(eval_atom(run->interp, l)) << seed;
    EXPECT_FALSE(eval_atom(run->interp, lemma->conclusion)) << seed;
    EXPECT_FALSE(eval_atom(run->interp, lemma->formula)) << seed;
  }
  EXPECT_GT(lemmas, 20u);
}

INSTANTIATE_TEST_SUITE_P(ReplayModes,
                         EngineModes,
                         ::testing::Values(false, true),
                         [](const auto& info) { return info.param ? "Replay" : "Eager"; });
