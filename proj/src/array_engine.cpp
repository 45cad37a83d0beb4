#include "caext/array_engine.h"

#include <algorithm>
#include <deque>

#include "caext/error.h"

namespace caext {

const char* rule_name(Rule rule)
{
  switch (rule)
  {
    case Rule::INIT_R: return "InitR";
    case Rule::INIT_W: return "InitW";
    case Rule::INIT_C: return "InitC";
    case Rule::ROW_D: return "RowD";
    case Rule::ROW_U: return "RowU";
    case Rule::EQ_R: return "EqR";
    case Rule::EQ_L: return "EqL";
    case Rule::COW_D: return "CowD";
    case Rule::COW_U: return "CowU";
    case Rule::CEQ_R: return "CEqR";
    case Rule::CEQ_L: return "CEqL";
    case Rule::ROC: return "Roc";
    case Rule::CONG_R: return "CongR";
    case Rule::DIS_EQ: return "DisEq";
    case Rule::CONG_C: return "CongC";
  }
  return "?";
}

ArrayEngine::ArrayEngine(TermManager& tm, EngineOptions options)
    : d_tm(tm), d_options(options)
{
}

void ArrayEngine::add_formula(Term formula)
{
  d_formulas.push_back(formula);
  index_term(formula);
}

void ArrayEngine::index_term(Term root)
{
  Term roots[] = {root};
  for (const Term& t : subterms_postorder(roots))
  {
    if (!d_indexed.insert(t).second) continue;
    if (t.sort().is_array() && d_array_set.insert(t).second) d_arrays.push_back(t);
    switch (t.kind())
    {
      case Kind::SELECT: d_reads.push_back(t); break;
      case Kind::STORE:
        d_stores.push_back(t);
        d_stores_by_base[t[0]].push_back(t);
        d_virtual_reads.emplace(t, d_tm.mk_select(t, t[1]));
        break;
      case Kind::CONST_ARRAY: d_consts.push_back(t); break;
      case Kind::EQUAL:
        if (t[0].sort().is_array())
        {
          d_array_eqs.push_back(t);
          d_eqs_by_array[t[0]].push_back(t);
          if (t[1] != t[0]) d_eqs_by_array[t[1]].push_back(t);
        }
        break;
      default: break;
    }
  }
}

Term ArrayEngine::virtual_read(Term store) const { return d_virtual_reads.at(store); }

void ArrayEngine::set_interpretation(const Interpretation& interp)
{
  if (!d_map.empty()) throw InvariantViolation("interpretation installed over a non-empty map");
  d_interp = interp;
  d_has_interp = true;
  d_state = EngineState::RUNNING;
  d_at_fixpoint = false;
  d_replay_cache.clear();
}

void ArrayEngine::reset()
{
  d_interp = Interpretation();
  d_has_interp = false;
  d_map.clear();
  d_updated.clear();
  d_by_dest.clear();
  d_propagated_terms.clear();
  d_replay_cache.clear();
  d_at_fixpoint = false;
  if (d_state != EngineState::UNSAT) d_state = EngineState::RUNNING;
}

bool ArrayEngine::holds(Term literal) const { return eval_atom(d_interp, literal); }

Term ArrayEngine::neq(Term a, Term b) { return d_tm.mk_not(d_tm.mk_eq(a, b)); }

bool ArrayEngine::exists_fresh_index(const Interpretation& interp,
                                     std::span<const Term> indices,
                                     Sort sort)
{
  std::unordered_set<uint64_t> values;
  for (const Term& k : indices) values.insert(interp.value(k));
  return values.size() < domain_size(sort);
}

/* -------------------------------------------------------------------------- */

void ArrayEngine::init_steps()
{
  if (!d_has_interp) throw InvariantViolation("init_steps without interpretation");
  auto init = [this](Term dest, Term t, Rule rule) {
    StepKey key{dest, t};
    if (d_map.count(key)) return;
    Step s{d_tm.mk_true(), dest, rule};
    if (d_options.replay_reasons) s = Step{Term(), Term(), rule};
    d_map.emplace(key, s);
    d_by_dest[dest].push_back(t);
    d_propagated_terms.push_back(t);
    d_at_fixpoint = false;
    if (t.kind() == Kind::CONST_ARRAY) d_updated.emplace(key, std::vector<Term>{});
    ++d_stats.steps;
    if (on_step) on_step(key, Step{d_tm.mk_true(), dest, rule});
  };
  for (const Term& r : d_reads) init(r[0], r, Rule::INIT_R);
  for (const Term& s : d_stores) init(s, d_virtual_reads.at(s), Rule::INIT_W);
  for (const Term& c : d_consts) init(c, c, Rule::INIT_C);
  d_stats.max_map_size = std::max<uint64_t>(d_stats.max_map_size, d_map.size());
}

void ArrayEngine::explore(Term t, Explored& out) const
{
  if (t.kind() == Kind::CONST_ARRAY)
    explore_const(t, out);
  else
    explore_read(t, out);
}

void ArrayEngine::explore_read(Term read, Explored& out) const
{
  Term origin = read[0];
  Term index = read[1];
  uint64_t index_value = d_interp.value(index);
  Rule init_rule = Rule::INIT_R;
  if (origin.kind() == Kind::STORE && origin[1] == index
      && !std::count(d_reads.begin(), d_reads.end(), read))
  {
    init_rule = Rule::INIT_W;
  }
  out.steps.emplace(StepKey{origin, read}, Step{d_tm.mk_true(), origin, init_rule});
  out.order.push_back(origin);

  std::deque<Term> queue{origin};
  auto set = [&](Term dest, Term reason, Term source, Rule rule) {
    StepKey key{dest, read};
    if (out.steps.count(key)) return;
    out.steps.emplace(key, Step{reason, source, rule});
    out.order.push_back(dest);
    queue.push_back(dest);
  };
  while (!queue.empty())
  {
    Term x = queue.front();
    queue.pop_front();
    // RowD: down from a store whose index differs from the read index.
    if (x.kind() == Kind::STORE && d_interp.value(x[1]) != index_value
        && !out.steps.count(StepKey{x[0], read}))
    {
      set(x[0], d_tm.mk_not(d_tm.mk_eq(index, x[1])), x, Rule::ROW_D);
    }
    // RowU: up to every store over x whose index differs.
    auto sit = d_stores_by_base.find(x);
    if (sit != d_stores_by_base.end())
    {
      for (const Term& s : sit->second)
      {
        if (d_interp.value(s[1]) != index_value && !out.steps.count(StepKey{s, read}))
          set(s, d_tm.mk_not(d_tm.mk_eq(index, s[1])), x, Rule::ROW_U);
      }
    }
    // EqR / EqL: across array equalities true in I.
    auto eit = d_eqs_by_array.find(x);
    if (eit != d_eqs_by_array.end())
    {
      for (const Term& e : eit->second)
      {
        bool left = e[0] == x;
        Term other = left ? e[1] : e[0];
        if (!out.steps.count(StepKey{other, read}) && holds(e))
          set(other, e, x, left ? Rule::EQ_R : Rule::EQ_L);
      }
    }
  }
}

void ArrayEngine::explore_const(Term c, Explored& out) const
{
  Sort index_sort = c.sort().array_index();
  out.steps.emplace(StepKey{c, c}, Step{d_tm.mk_true(), c, Rule::INIT_C});
  out.updated.emplace(c, std::vector<Term>{});
  out.order.push_back(c);

  std::deque<Term> queue{c};
  auto set = [&](Term dest, Term reason, Term source, Rule rule, std::vector<Term> upd) {
    out.steps.emplace(StepKey{dest, c}, Step{reason, source, rule});
    out.updated.emplace(dest, std::move(upd));
    out.order.push_back(dest);
    queue.push_back(dest);
  };
  auto extended = [](const std::vector<Term>& base, Term j) {
    std::vector<Term> r = base;
    if (std::find(r.begin(), r.end(), j) == r.end()) r.push_back(j);
    return r;
  };
  while (!queue.empty())
  {
    Term x = queue.front();
    queue.pop_front();
    const std::vector<Term> upd_x = out.updated.at(x);
    // CEqR / CEqL: across array equalities true in I.
    auto eit = d_eqs_by_array.find(x);
    if (eit != d_eqs_by_array.end())
    {
      for (const Term& e : eit->second)
      {
        bool left = e[0] == x;
        Term other = left ? e[1] : e[0];
        if (!out.steps.count(StepKey{other, c}) && holds(e))
          set(other, e, x, left ? Rule::CEQ_R : Rule::CEQ_L, upd_x);
      }
    }
    // CowD: down from a store if some index stays untouched.
    if (x.kind() == Kind::STORE && !out.steps.count(StepKey{x[0], c}))
    {
      std::vector<Term> upd = extended(upd_x, x[1]);
      if (exists_fresh_index(d_interp, upd, index_sort))
        set(x[0], d_tm.mk_true(), x, Rule::COW_D, std::move(upd));
    }
    // CowU: up to every store over x if some index stays untouched.
    auto sit = d_stores_by_base.find(x);
    if (sit != d_stores_by_base.end())
    {
      for (const Term& s : sit->second)
      {
        if (out.steps.count(StepKey{s, c})) continue;
        std::vector<Term> upd = extended(upd_x, s[1]);
        if (exists_fresh_index(d_interp, upd, index_sort))
          set(s, d_tm.mk_true(), x, Rule::COW_U, std::move(upd));
      }
    }
  }
}

void ArrayEngine::propagate_fixpoint()
{
  if (!d_has_interp) throw InvariantViolation("propagation without interpretation");
  if (d_at_fixpoint) return;
  d_at_fixpoint = true;
  std::vector<Term> terms = d_propagated_terms;
  for (const Term& t : terms)
  {
    Explored ex;
    explore(t, ex);
    for (const Term& dest : ex.order)
    {
      StepKey key{dest, t};
      const Step& s = ex.steps.at(key);
      auto it = d_map.find(key);
      if (it != d_map.end())
      {
        // Only the initial self-step may already be present.
        if (s.source != dest)
          throw InvariantViolation("propagation step set twice: " + dest.to_string() + " / "
                                   + t.to_string());
        continue;
      }
      // The new step's own reason must hold; the rest of R(dest, t) was
      // checked when the source step was set.
      if (!s.reason.is_true() && !holds(s.reason))
        throw InvariantViolation("step reason false under I: " + s.reason.to_string());
      if (d_options.replay_reasons)
        d_map.emplace(key, Step{Term(), Term(), s.rule});
      else
        d_map.emplace(key, s);
      if (t.kind() == Kind::CONST_ARRAY) d_updated.emplace(key, ex.updated.at(dest));
      d_by_dest[dest].push_back(t);
      ++d_stats.steps;
      if (on_step) on_step(key, s);
    }
  }
  d_stats.max_map_size = std::max<uint64_t>(d_stats.max_map_size, d_map.size());

  if (d_options.check_invariants)
  {
    for (const auto& [key, s] : d_map)
    {
      Term r = compute_reason_term(key.dest, key.term);
      if (!holds(r))
        throw InvariantViolation("reason of " + key.term.to_string() + " at "
                                 + key.dest.to_string() + " false under I");
      if (key.term.kind() == Kind::CONST_ARRAY)
      {
        std::vector<Term> walked = compute_updated_indices(key.dest, key.term);
        std::vector<Term> cached = d_updated.at(key);
        std::sort(walked.begin(), walked.end(), TermIdLess{});
        std::sort(cached.begin(), cached.end(), TermIdLess{});
        if (walked != cached)
          throw InvariantViolation("updated indices disagree for " + key.dest.to_string());
      }
    }
  }
}

/* -------------------------------------------------------------------------- */

bool ArrayEngine::has_step(Term dest, Term t) const { return d_map.count(StepKey{dest, t}) > 0; }

const ArrayEngine::Explored& ArrayEngine::replay(Term t) const
{
  auto it = d_replay_cache.find(t);
  if (it != d_replay_cache.end()) return it->second;
  Explored ex;
  explore(t, ex);
  ++const_cast<EngineStats&>(d_stats).replays;
  if (d_options.check_invariants)
  {
    for (const Term& dest : ex.order)
    {
      if (!d_map.count(StepKey{dest, t}))
        throw InvariantViolation("replay reaches unset entry " + dest.to_string());
    }
  }
  return d_replay_cache.emplace(t, std::move(ex)).first->second;
}

Step ArrayEngine::step(Term dest, Term t) const
{
  auto it = d_map.find(StepKey{dest, t});
  if (it == d_map.end())
    throw UndefinedStep("no propagation step for " + t.to_string() + " at " + dest.to_string());
  if (!d_options.replay_reasons) return it->second;
  Rule rule = it->second.rule;
  if (rule == Rule::INIT_R || rule == Rule::INIT_W || rule == Rule::INIT_C)
    return Step{d_tm.mk_true(), dest, rule};
  const Explored& ex = replay(t);
  auto rit = ex.steps.find(StepKey{dest, t});
  if (rit == ex.steps.end())
    throw InvariantViolation("replay misses entry " + t.to_string() + " at " + dest.to_string());
  return rit->second;
}

std::vector<std::pair<Term, Step>> ArrayEngine::path(Term dest, Term t) const
{
  std::vector<std::pair<Term, Step>> result;
  Term cur = dest;
  for (size_t hops = 0;; ++hops)
  {
    if (hops > d_arrays.size() + 1)
      throw InvariantViolation("cyclic propagation path for " + t.to_string());
    Step s = step(cur, t);
    result.emplace_back(cur, s);
    bool self = t == cur || (t.kind() == Kind::SELECT && t[0] == cur);
    if (self) break;
    cur = s.source;
  }
  return result;
}

std::vector<Term> ArrayEngine::compute_reason(Term dest, Term t) const
{
  auto p = path(dest, t);
  std::vector<Term> lits;
  for (auto it = p.rbegin(); it != p.rend(); ++it)
  {
    const Term& r = it->second.reason;
    bool self = t == it->first || (t.kind() == Kind::SELECT && t[0] == it->first);
    if (self || r.is_true()) continue;
    if (std::find(lits.begin(), lits.end(), r) == lits.end()) lits.push_back(r);
  }
  return lits;
}

Term ArrayEngine::compute_reason_term(Term dest, Term t) const
{
  return d_tm.mk_and(compute_reason(dest, t));
}

std::vector<Term> ArrayEngine::compute_updated_indices(Term dest, Term c) const
{
  if (c.kind() != Kind::CONST_ARRAY) throw UndefinedStep("updated indices of non-constant term");
  auto p = path(dest, c);
  std::vector<Term> result;
  // Walk from the constant array outwards.
  for (size_t k = p.size(); k-- > 0;)
  {
    const auto& [a, s] = p[k];
    if (a == c) continue;
    Term b = s.source;
    if (s.reason.is_true())
    {
      Term j;
      if (b.kind() == Kind::STORE && b[0] == a)
        j = b[1];
      else if (a.kind() == Kind::STORE && a[0] == b)
        j = a[1];
      if (!j.is_null() && std::find(result.begin(), result.end(), j) == result.end())
        result.push_back(j);
    }
  }
  return result;
}

std::vector<Term> ArrayEngine::updated_indices_cached(Term dest, Term c) const
{
  auto it = d_updated.find(StepKey{dest, c});
  if (it == d_updated.end())
    throw UndefinedStep("no default value of " + c.to_string() + " at " + dest.to_string());
  return it->second;
}

const std::vector<Term>& ArrayEngine::propagated_to(Term dest) const
{
  static const std::vector<Term> empty;
  auto it = d_by_dest.find(dest);
  return it == d_by_dest.end() ? empty : it->second;
}

/* -------------------------------------------------------------------------- */

Lemma ArrayEngine::make_lemma(Rule rule, std::vector<Term> antecedents, Term conclusion)
{
  Lemma l{rule, std::move(antecedents), conclusion, Term()};
  if (l.antecedents.empty())
    l.formula = conclusion;
  else
    l.formula = d_tm.mk_implies(d_tm.mk_and(l.antecedents), conclusion);
  return l;
}

std::optional<Lemma> ArrayEngine::check_roc()
{
  for (const Term& c : d_consts)
  {
    uint64_t v = d_interp.value(c[0]);
    for (const Term& t : propagated_to(c))
    {
      if (t.kind() != Kind::SELECT || d_interp.value(t) == v) continue;
      return make_lemma(Rule::ROC, compute_reason(c, t), d_tm.mk_eq(t, c[0]));
    }
  }
  return std::nullopt;
}

std::optional<Lemma> ArrayEngine::check_cong_r()
{
  for (const Term& a : d_arrays)
  {
    std::unordered_map<uint64_t, Term> first_at;
    for (const Term& t : propagated_to(a))
    {
      if (t.kind() != Kind::SELECT) continue;
      auto [it, fresh] = first_at.emplace(d_interp.value(t[1]), t);
      if (fresh) continue;
      Term r = it->second;
      if (d_interp.value(r) == d_interp.value(t)) continue;
      std::vector<Term> ante = compute_reason(a, r);
      for (const Term& l : compute_reason(a, t))
        if (std::find(ante.begin(), ante.end(), l) == ante.end()) ante.push_back(l);
      if (r[1] != t[1]) ante.push_back(d_tm.mk_eq(r[1], t[1]));
      return make_lemma(Rule::CONG_R, std::move(ante), d_tm.mk_eq(r, t));
    }
  }
  return std::nullopt;
}

std::optional<Lemma> ArrayEngine::check_dis_eq()
{
  for (const Term& e : d_array_eqs)
  {
    if (d_witnessed.count(e) || holds(e)) continue;
    d_witnessed.insert(e);
    Term k = d_tm.mk_const(e[0].sort().array_index(), "__ext_k_" + std::to_string(e.id()));
    Term diff = d_tm.mk_not(d_tm.mk_eq(d_tm.mk_select(e[0], k), d_tm.mk_select(e[1], k)));
    return make_lemma(Rule::DIS_EQ, {d_tm.mk_not(e)}, diff);
  }
  return std::nullopt;
}

std::optional<Lemma> ArrayEngine::check_cong_c()
{
  for (const Term& a : d_arrays)
  {
    std::vector<Term> defaults;
    for (const Term& t : propagated_to(a))
      if (t.kind() == Kind::CONST_ARRAY) defaults.push_back(t);
    Sort index_sort = a.sort().array_index();
    for (size_t x = 0; x < defaults.size(); ++x)
    {
      for (size_t y = x + 1; y < defaults.size(); ++y)
      {
        Term cv = defaults[x], cw = defaults[y];
        if (d_interp.value(cv[0]) == d_interp.value(cw[0])) continue;
        std::vector<Term> idx = updated_indices_cached(a, cv);
        std::vector<Term> idx_w = updated_indices_cached(a, cw);
        idx.insert(idx.end(), idx_w.begin(), idx_w.end());
        if (!exists_fresh_index(d_interp, idx, index_sort)) continue;
        std::vector<Term> ante = compute_reason(a, cv);
        for (const Term& l : compute_reason(a, cw))
          if (std::find(ante.begin(), ante.end(), l) == ante.end()) ante.push_back(l);
        if (!idx.empty())
          ante.push_back(d_tm.mk_not(d_tm.mk_distinct_n(domain_size(index_sort), idx)));
        return make_lemma(Rule::CONG_C, std::move(ante), d_tm.mk_eq(cv[0], cw[0]));
      }
    }
  }
  return std::nullopt;
}

void ArrayEngine::commit_lemma(const Lemma& lemma)
{
  if (d_options.check_invariants && lemma.rule != Rule::DIS_EQ)
  {
    for (const Term& a : lemma.antecedents)
    {
      if (!holds(a))
        throw InvariantViolation(std::string(rule_name(lemma.rule))
                                 + " lemma antecedent false under I: " + a.to_string());
    }
    if (holds(lemma.conclusion))
      throw InvariantViolation(std::string(rule_name(lemma.rule))
                               + " lemma does not exclude I: " + lemma.formula.to_string());
  }
  ++d_stats.lemmas;
  ++d_stats.lemmas_by_rule[lemma.rule];
  if (on_lemma) on_lemma(lemma);
  std::vector<Term> added =
      d_preprocess ? d_preprocess(lemma.formula) : std::vector<Term>{lemma.formula};
  reset();
  for (const Term& f : added) add_formula(f);
}

std::optional<Lemma> ArrayEngine::check_conflicts()
{
  if (!d_has_interp) throw InvariantViolation("conflict check without interpretation");
  std::optional<Lemma> lemma = check_roc();
  if (!lemma) lemma = check_cong_r();
  if (!lemma) lemma = check_dis_eq();
  if (!lemma) lemma = check_cong_c();
  if (!lemma)
  {
    d_state = EngineState::SATURATED;
    return std::nullopt;
  }
  commit_lemma(*lemma);
  return lemma;
}

}  // namespace caext
