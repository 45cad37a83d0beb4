#include "caext/sat.h"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace caext::sat {

Solver::Solver(uint64_t seed) : d_rng(seed), d_random_phase(seed != 0) {}

Var Solver::new_var()
{
  Var v = static_cast<Var>(d_assigns.size());
  d_assigns.push_back(L_UNDEF);
  d_levels.push_back(0);
  d_reasons.push_back(NO_REASON);
  d_phase.push_back(d_random_phase ? (d_rng() & 1) : false);
  d_seen.push_back(false);
  d_model.push_back(false);
  d_activity.push_back(0.0);
  d_heap_pos.push_back(SIZE_MAX);
  d_watches.emplace_back();
  d_watches.emplace_back();
  heap_insert(v);
  return v;
}

bool Solver::add_clause(std::vector<Lit> lits)
{
  if (!d_ok) return false;
  cancel_until(0);
  std::sort(lits.begin(), lits.end(), [](Lit a, Lit b) { return a.x < b.x; });
  std::vector<Lit> kept;
  Lit prev{UINT32_MAX};
  for (Lit l : lits)
  {
    if (value(l) == L_TRUE || l == ~prev) return true;
    if (value(l) != L_FALSE && !(l == prev)) kept.push_back(l);
    prev = l;
  }
  if (kept.empty())
  {
    d_ok = false;
    return false;
  }
  if (kept.size() == 1)
  {
    enqueue(kept[0], NO_REASON);
    if (propagate() != NO_REASON) d_ok = false;
    return d_ok;
  }
  attach(std::move(kept), false);
  return true;
}

uint32_t Solver::attach(std::vector<Lit> lits, bool learnt)
{
  uint32_t ci = static_cast<uint32_t>(d_clauses.size());
  d_watches[(~lits[0]).x].push_back(Watcher{ci, lits[1]});
  d_watches[(~lits[1]).x].push_back(Watcher{ci, lits[0]});
  d_clauses.push_back(Clause{std::move(lits), learnt, false, 0});
  if (learnt) d_learnts.push_back(ci);
  return ci;
}

void Solver::enqueue(Lit l, uint32_t reason)
{
  assert(value(l) == L_UNDEF);
  d_assigns[l.var()] = l.negative() ? L_FALSE : L_TRUE;
  d_levels[l.var()] = level();
  d_reasons[l.var()] = reason;
  d_trail.push_back(l);
}

uint32_t Solver::propagate()
{
  uint32_t confl = NO_REASON;
  while (d_qhead < d_trail.size())
  {
    Lit p = d_trail[d_qhead++];
    ++d_stats.propagations;
    std::vector<Watcher>& ws = d_watches[p.x];
    size_t i = 0, j = 0;
    Lit false_lit = ~p;
    while (i < ws.size())
    {
      Watcher w = ws[i];
      if (d_clauses[w.clause].deleted)
      {
        ++i;
        continue;
      }
      if (value(w.blocker) == L_TRUE)
      {
        ws[j++] = ws[i++];
        continue;
      }
      Clause& c = d_clauses[w.clause];
      if (c.lits[0] == false_lit) std::swap(c.lits[0], c.lits[1]);
      ++i;
      Lit first = c.lits[0];
      if (first != w.blocker && value(first) == L_TRUE)
      {
        ws[j++] = Watcher{w.clause, first};
        continue;
      }
      bool found = false;
      for (size_t k = 2; k < c.lits.size(); ++k)
      {
        if (value(c.lits[k]) != L_FALSE)
        {
          std::swap(c.lits[1], c.lits[k]);
          d_watches[(~c.lits[1]).x].push_back(Watcher{w.clause, first});
          found = true;
          break;
        }
      }
      if (found) continue;
      ws[j++] = Watcher{w.clause, first};
      if (value(first) == L_FALSE)
      {
        confl = w.clause;
        d_qhead = d_trail.size();
        while (i < ws.size()) ws[j++] = ws[i++];
      }
      else
      {
        enqueue(first, w.clause);
      }
    }
    ws.resize(j);
    if (confl != NO_REASON) break;
  }
  return confl;
}

void Solver::analyze(uint32_t confl, std::vector<Lit>& learnt, uint32_t& bt_level)
{
  int path = 0;
  Lit p{UINT32_MAX};
  learnt.clear();
  learnt.push_back(Lit{});
  size_t index = d_trail.size();
  do
  {
    Clause& c = d_clauses[confl];
    if (c.learnt) bump_clause(c);
    for (size_t k = (p.x == UINT32_MAX ? 0 : 1); k < c.lits.size(); ++k)
    {
      Lit q = c.lits[k];
      Var v = q.var();
      if (!d_seen[v] && d_levels[v] > 0)
      {
        bump_var(v);
        d_seen[v] = true;
        if (d_levels[v] >= level())
          ++path;
        else
          learnt.push_back(q);
      }
    }
    while (!d_seen[d_trail[--index].var()])
    {
    }
    p = d_trail[index];
    confl = d_reasons[p.var()];
    d_seen[p.var()] = false;
    --path;
    if (path > 0)
    {
      // The reason clause keeps its implied literal at position 0.
      Clause& rc = d_clauses[confl];
      if (!(rc.lits[0] == p))
      {
        auto it = std::find(rc.lits.begin(), rc.lits.end(), p);
        std::swap(*it, rc.lits[0]);
      }
    }
  } while (path > 0);
  learnt[0] = ~p;

  // Recursive minimization.
  d_analyze_clear.clear();
  for (size_t k = 1; k < learnt.size(); ++k) d_analyze_clear.push_back(learnt[k].var());
  uint32_t abstract_levels = 0;
  for (size_t k = 1; k < learnt.size(); ++k)
    abstract_levels |= 1u << (d_levels[learnt[k].var()] & 31);
  size_t j = 1;
  for (size_t k = 1; k < learnt.size(); ++k)
  {
    if (d_reasons[learnt[k].var()] == NO_REASON || !lit_redundant(learnt[k], abstract_levels))
      learnt[j++] = learnt[k];
  }
  learnt.resize(j);
  for (Var v : d_analyze_clear) d_seen[v] = false;

  if (learnt.size() == 1)
  {
    bt_level = 0;
  }
  else
  {
    size_t max_i = 1;
    for (size_t k = 2; k < learnt.size(); ++k)
      if (d_levels[learnt[k].var()] > d_levels[learnt[max_i].var()]) max_i = k;
    std::swap(learnt[1], learnt[max_i]);
    bt_level = d_levels[learnt[1].var()];
  }
}

bool Solver::lit_redundant(Lit l, uint32_t abstract_levels)
{
  d_analyze_stack.clear();
  d_analyze_stack.push_back(l);
  size_t top = d_analyze_clear.size();
  while (!d_analyze_stack.empty())
  {
    Lit q = d_analyze_stack.back();
    d_analyze_stack.pop_back();
    const Clause& c = d_clauses[d_reasons[q.var()]];
    for (size_t k = 0; k < c.lits.size(); ++k)
    {
      Lit r = c.lits[k];
      Var v = r.var();
      if (v == q.var() || d_seen[v] || d_levels[v] == 0) continue;
      if (d_reasons[v] != NO_REASON && (abstract_levels & (1u << (d_levels[v] & 31))))
      {
        d_seen[v] = true;
        d_analyze_stack.push_back(r);
        d_analyze_clear.push_back(v);
      }
      else
      {
        for (size_t m = top; m < d_analyze_clear.size(); ++m) d_seen[d_analyze_clear[m]] = false;
        d_analyze_clear.resize(top);
        return false;
      }
    }
  }
  return true;
}

void Solver::cancel_until(uint32_t lvl)
{
  if (level() <= lvl) return;
  for (size_t c = d_trail.size(); c-- > d_trail_lim[lvl];)
  {
    Var v = d_trail[c].var();
    d_assigns[v] = L_UNDEF;
    d_reasons[v] = NO_REASON;
    d_phase[v] = !d_trail[c].negative();
    if (!heap_contains(v)) heap_insert(v);
  }
  d_trail.resize(d_trail_lim[lvl]);
  d_trail_lim.resize(lvl);
  d_qhead = d_trail.size();
}

bool Solver::locked(uint32_t ci) const
{
  const Clause& c = d_clauses[ci];
  Var v = c.lits[0].var();
  return d_reasons[v] == ci && value(c.lits[0]) == L_TRUE;
}

void Solver::reduce_db()
{
  std::sort(d_learnts.begin(), d_learnts.end(), [this](uint32_t a, uint32_t b) {
    const Clause& ca = d_clauses[a];
    const Clause& cb = d_clauses[b];
    if ((ca.lits.size() > 2) != (cb.lits.size() > 2)) return ca.lits.size() > 2;
    return ca.activity < cb.activity;
  });
  size_t half = d_learnts.size() / 2;
  std::vector<uint32_t> kept;
  for (size_t k = 0; k < d_learnts.size(); ++k)
  {
    uint32_t ci = d_learnts[k];
    Clause& c = d_clauses[ci];
    if (k < half && c.lits.size() > 2 && !locked(ci))
    {
      c.deleted = true;
      c.lits.shrink_to_fit();
    }
    else
    {
      kept.push_back(ci);
    }
  }
  d_learnts = std::move(kept);
}

Lit Solver::pick_branch()
{
  while (!d_heap.empty())
  {
    Var v = heap_pop();
    if (d_assigns[v] == L_UNDEF) return Lit::make(v, !d_phase[v]);
  }
  return Lit{UINT32_MAX};
}

void Solver::bump_var(Var v)
{
  d_activity[v] += d_var_inc;
  if (d_activity[v] > 1e100)
  {
    for (double& a : d_activity) a *= 1e-100;
    d_var_inc *= 1e-100;
  }
  if (heap_contains(v)) heap_up(d_heap_pos[v]);
}

void Solver::bump_clause(Clause& c)
{
  c.activity += d_cla_inc;
  if (c.activity > 1e20)
  {
    for (uint32_t ci : d_learnts) d_clauses[ci].activity *= 1e-20;
    d_cla_inc *= 1e-20;
  }
}

void Solver::decay()
{
  d_var_inc /= 0.95;
  d_cla_inc /= 0.999;
}

void Solver::heap_insert(Var v)
{
  d_heap_pos[v] = d_heap.size();
  d_heap.push_back(v);
  heap_up(d_heap.size() - 1);
}

void Solver::heap_up(size_t pos)
{
  Var v = d_heap[pos];
  while (pos > 0)
  {
    size_t parent = (pos - 1) / 2;
    Var pv = d_heap[parent];
    if (d_activity[pv] > d_activity[v] || (d_activity[pv] == d_activity[v] && pv < v)) break;
    d_heap[pos] = pv;
    d_heap_pos[pv] = pos;
    pos = parent;
  }
  d_heap[pos] = v;
  d_heap_pos[v] = pos;
}

void Solver::heap_down(size_t pos)
{
  Var v = d_heap[pos];
  auto better = [this](Var a, Var b) {
    return d_activity[a] > d_activity[b] || (d_activity[a] == d_activity[b] && a < b);
  };
  for (;;)
  {
    size_t child = 2 * pos + 1;
    if (child >= d_heap.size()) break;
    if (child + 1 < d_heap.size() && better(d_heap[child + 1], d_heap[child])) ++child;
    if (!better(d_heap[child], v)) break;
    d_heap[pos] = d_heap[child];
    d_heap_pos[d_heap[pos]] = pos;
    pos = child;
  }
  d_heap[pos] = v;
  d_heap_pos[v] = pos;
}

Var Solver::heap_pop()
{
  Var top = d_heap[0];
  d_heap_pos[top] = SIZE_MAX;
  Var last = d_heap.back();
  d_heap.pop_back();
  if (!d_heap.empty())
  {
    d_heap[0] = last;
    d_heap_pos[last] = 0;
    heap_down(0);
  }
  return top;
}

double Solver::luby(double y, uint64_t x)
{
  uint64_t size = 1;
  int seq = 0;
  while (size < x + 1)
  {
    ++seq;
    size = 2 * size + 1;
  }
  while (size - 1 != x)
  {
    size = (size - 1) >> 1;
    --seq;
    x = x % size;
  }
  return std::pow(y, seq);
}

Status Solver::solve(uint64_t conflict_budget)
{
  ++d_stats.solves;
  if (!d_ok) return Status::UNSAT;
  cancel_until(0);
  if (propagate() != NO_REASON)
  {
    d_ok = false;
    return Status::UNSAT;
  }
  if (d_max_learnts < 1) d_max_learnts = std::max<double>(1000, d_clauses.size() / 3.0);

  uint64_t conflicts_this_call = 0;
  uint64_t restart_count = 0;
  std::vector<Lit> learnt;
  for (;;)
  {
    uint64_t restart_limit = static_cast<uint64_t>(luby(2, restart_count) * 100);
    uint64_t conflicts_in_restart = 0;
    for (;;)
    {
      uint32_t confl = propagate();
      if (confl != NO_REASON)
      {
        ++d_stats.conflicts;
        ++conflicts_this_call;
        ++conflicts_in_restart;
        if (level() == 0)
        {
          d_ok = false;
          return Status::UNSAT;
        }
        uint32_t bt_level = 0;
        analyze(confl, learnt, bt_level);
        cancel_until(bt_level);
        if (learnt.size() == 1)
        {
          enqueue(learnt[0], NO_REASON);
        }
        else
        {
          uint32_t ci = attach(learnt, true);
          bump_clause(d_clauses[ci]);
          enqueue(learnt[0], ci);
        }
        decay();
        if (conflict_budget && conflicts_this_call >= conflict_budget)
        {
          cancel_until(0);
          return Status::UNKNOWN;
        }
        continue;
      }
      if (conflicts_in_restart >= restart_limit)
      {
        ++d_stats.restarts;
        cancel_until(0);
        break;
      }
      if (d_learnts.size() >= d_max_learnts + d_trail.size())
      {
        reduce_db();
        d_max_learnts *= 1.1;
      }
      Lit next = pick_branch();
      if (next.x == UINT32_MAX)
      {
        for (Var v = 0; v < d_assigns.size(); ++v) d_model[v] = d_assigns[v] == L_TRUE;
        cancel_until(0);
        return Status::SAT;
      }
      ++d_stats.decisions;
      d_trail_lim.push_back(d_trail.size());
      enqueue(next, NO_REASON);
    }
    ++restart_count;
  }
}

}  // namespace caext::sat
