#include "caext/ground_solver.h"

#include <algorithm>
#include <bit>
#include <unordered_set>

#include "caext/error.h"

namespace caext {

uint64_t Interpretation::value(Term t) const
{
  if (t.kind() == Kind::VALUE) return t.value();
  auto it = d_values.find(t);
  if (it != d_values.end()) return it->second;
  switch (t.kind())
  {
    case Kind::EQUAL: return value(t[0]) == value(t[1]);
    case Kind::NOT: return !value(t[0]);
    case Kind::AND:
      for (const Term& c : t.children())
        if (!value(c)) return 0;
      return 1;
    case Kind::OR:
      for (const Term& c : t.children())
        if (value(c)) return 1;
      return 0;
    case Kind::IMPLIES: return !value(t[0]) || value(t[1]);
    case Kind::ITE: return value(t[0]) ? value(t[1]) : value(t[2]);
    case Kind::DISTINCT_N:
    {
      std::unordered_set<uint64_t> seen;
      for (const Term& c : t.children()) seen.insert(value(c));
      return seen.size() >= t.distinct_n();
    }
    default: break;
  }
  throw UnassignedConstant("no value for " + t.to_string());
}

bool eval_atom(const Interpretation& interp, Term atom) { return interp.value(atom) != 0; }

/* -------------------------------------------------------------------------- */

GroundSolver::GroundSolver(TermManager& tm, GroundOptions options)
    : d_tm(tm), d_options(options), d_sat(options.seed)
{
  sat::Var v = d_sat.new_var();
  d_true = sat::Lit::make(v);
  d_sat.add_clause({d_true});
}

void GroundSolver::add_clause(std::vector<sat::Lit> lits)
{
  if (!d_sat.add_clause(std::move(lits))) d_unsat = true;
}

GroundSolver::Bits GroundSolver::fresh_bits(uint32_t n)
{
  Bits b(n);
  for (auto& l : b) l = sat::Lit::make(d_sat.new_var());
  return b;
}

uint32_t GroundSolver::width_of(Sort sort)
{
  if (!sort.is_array()) return value_bits(sort);
  auto it = d_array_width.find(sort);
  if (it == d_array_width.end())
    throw InvariantViolation("array sort without reserved class width: " + sort.to_string());
  return it->second;
}

void GroundSolver::reserve(std::span<const Term> formulas)
{
  std::unordered_map<Sort, uint64_t> count;
  for (const Term& t : subterms_postorder(formulas))
    if (t.sort().is_array() && !d_array_width.count(t.sort())) ++count[t.sort()];
  for (auto& [sort, n] : count)
  {
    uint32_t w = std::max<uint32_t>(8, std::bit_width(n) + 3);
    d_array_width.emplace(sort, std::min<uint32_t>(w, 30));
  }
}

void GroundSolver::reserve_array_classes(Term formula)
{
  std::unordered_map<Sort, uint64_t> fresh;
  Term roots[] = {formula};
  for (const Term& t : subterms_postorder(roots))
  {
    if (t.sort().is_array() && !d_bits.count(t)) ++fresh[t.sort()];
  }
  for (auto& [sort, n] : fresh)
  {
    uint64_t total = d_array_count[sort] += n;
    auto it = d_array_width.find(sort);
    if (it == d_array_width.end())
    {
      // Room for eight times the initial number of array terms.
      uint32_t w = std::max<uint32_t>(8, std::bit_width(total) + 3);
      d_array_width.emplace(sort, std::min<uint32_t>(w, 30));
    }
    else if (total > (uint64_t{1} << it->second))
    {
      throw ResourceLimit("too many array terms of sort " + sort.to_string());
    }
  }
}

sat::Lit GroundSolver::lit_and(std::vector<sat::Lit> lits)
{
  std::vector<sat::Lit> kept;
  for (sat::Lit l : lits)
  {
    if (l == false_lit()) return false_lit();
    if (l == true_lit()) continue;
    kept.push_back(l);
  }
  if (kept.empty()) return true_lit();
  if (kept.size() == 1) return kept[0];
  sat::Lit g = sat::Lit::make(d_sat.new_var());
  std::vector<sat::Lit> back{g};
  for (sat::Lit l : kept)
  {
    add_clause({~g, l});
    back.push_back(~l);
  }
  add_clause(std::move(back));
  return g;
}

sat::Lit GroundSolver::lit_or(std::vector<sat::Lit> lits)
{
  for (auto& l : lits) l = ~l;
  return ~lit_and(std::move(lits));
}

sat::Lit GroundSolver::lit_xnor(sat::Lit a, sat::Lit b)
{
  if (a == b) return true_lit();
  if (a == ~b) return false_lit();
  if (a == true_lit()) return b;
  if (a == false_lit()) return ~b;
  if (b == true_lit()) return a;
  if (b == false_lit()) return ~a;
  sat::Lit x = sat::Lit::make(d_sat.new_var());
  add_clause({~x, ~a, b});
  add_clause({~x, a, ~b});
  add_clause({x, a, b});
  add_clause({x, ~a, ~b});
  return x;
}

sat::Lit GroundSolver::lit_ite(sat::Lit c, sat::Lit t, sat::Lit e)
{
  if (c == true_lit() || t == e) return t;
  if (c == false_lit()) return e;
  sat::Lit m = sat::Lit::make(d_sat.new_var());
  add_clause({~c, ~t, m});
  add_clause({~c, t, ~m});
  add_clause({c, ~e, m});
  add_clause({c, e, ~m});
  return m;
}

sat::Lit GroundSolver::lit_eq_bits(const Bits& a, const Bits& b)
{
  std::vector<sat::Lit> xs;
  for (size_t k = 0; k < a.size(); ++k) xs.push_back(lit_xnor(a[k], b[k]));
  return lit_and(std::move(xs));
}

sat::Lit GroundSolver::lit_eq(Term a, Term b)
{
  if (a == b) return true_lit();
  std::pair<uint64_t, uint64_t> key = std::minmax(a.id(), b.id());
  auto it = d_eq_cache.find(key);
  if (it != d_eq_cache.end()) return it->second;
  const Bits& ba = encode(a);
  const Bits& bb = encode(b);
  sat::Lit l = lit_eq_bits(ba, bb);
  d_eq_cache.emplace(key, l);
  return l;
}

sat::Lit GroundSolver::encode_distinct(Term t)
{
  uint64_t n = t.distinct_n();
  size_t k = t.num_children();
  if (n > k) return false_lit();
  if (n <= 1) return true_lit();
  // x[m]: t_m differs from every earlier term, i.e. it is the first
  // occurrence of its value. The number of distinct values is the number of
  // set indicators, counted by a sequential at-least-c circuit.
  std::vector<sat::Lit> count(n + 1, false_lit());
  count[0] = true_lit();
  for (size_t m = 0; m < k; ++m)
  {
    std::vector<sat::Lit> diffs;
    for (size_t l = 0; l < m; ++l) diffs.push_back(~lit_eq(t[l], t[m]));
    sat::Lit x = lit_and(std::move(diffs));
    for (size_t c = std::min<size_t>(n, m + 1); c >= 1; --c)
    {
      count[c] = lit_or({count[c], lit_and({x, count[c - 1]})});
    }
  }
  return count[n];
}

const GroundSolver::Bits& GroundSolver::encode(Term t)
{
  auto it = d_bits.find(t);
  if (it != d_bits.end()) return it->second;
  for (const Term& c : t.children()) encode(c);
  Bits bits = encode_node(t);
  auto [pos, inserted] = d_bits.emplace(t, std::move(bits));
  (void)inserted;

  // Congruence with every earlier application of the same symbol.
  switch (t.kind())
  {
    case Kind::SELECT:
    {
      auto& others = d_selects[t[0].sort()];
      for (const Term& o : others)
      {
        add_clause({~lit_eq(t[0], o[0]), ~lit_eq(t[1], o[1]), lit_eq(t, o)});
      }
      others.push_back(t);
      break;
    }
    case Kind::STORE:
    {
      auto& others = d_stores[t.sort()];
      for (const Term& o : others)
      {
        add_clause(
            {~lit_eq(t[0], o[0]), ~lit_eq(t[1], o[1]), ~lit_eq(t[2], o[2]), lit_eq(t, o)});
      }
      others.push_back(t);
      Term read = d_tm.mk_select(t, t[1]);
      Term vr = d_tm.mk_eq(read, t[2]);
      add_clause({lit_eq(read, t[2])});
      d_virtual_reads.push_back(vr);
      break;
    }
    case Kind::CONST_ARRAY:
    {
      auto& others = d_consts[t.sort()];
      for (const Term& o : others) add_clause({~lit_eq(t[0], o[0]), lit_eq(t, o)});
      others.push_back(t);
      break;
    }
    default: break;
  }
  return d_bits.at(t);
}

GroundSolver::Bits GroundSolver::encode_node(Term t)
{
  switch (t.kind())
  {
    case Kind::CONSTANT:
      d_leaves.push_back(t);
      return fresh_bits(width_of(t.sort()));
    case Kind::VALUE:
    {
      uint32_t w = value_bits(t.sort());
      Bits b(w);
      for (uint32_t k = 0; k < w; ++k) b[k] = ((t.value() >> k) & 1) ? true_lit() : false_lit();
      return b;
    }
    case Kind::SELECT:
    case Kind::STORE:
    case Kind::CONST_ARRAY:
      d_leaves.push_back(t);
      return fresh_bits(width_of(t.sort()));
    case Kind::EQUAL: return {lit_eq(t[0], t[1])};
    case Kind::NOT: return {~d_bits.at(t[0])[0]};
    case Kind::AND:
    case Kind::OR:
    {
      std::vector<sat::Lit> ls;
      for (const Term& c : t.children()) ls.push_back(d_bits.at(c)[0]);
      return {t.kind() == Kind::AND ? lit_and(std::move(ls)) : lit_or(std::move(ls))};
    }
    case Kind::IMPLIES: return {lit_or({~d_bits.at(t[0])[0], d_bits.at(t[1])[0]})};
    case Kind::ITE:
    {
      sat::Lit c = d_bits.at(t[0])[0];
      const Bits& bt = d_bits.at(t[1]);
      const Bits& be = d_bits.at(t[2]);
      Bits out(bt.size());
      for (size_t k = 0; k < bt.size(); ++k) out[k] = lit_ite(c, bt[k], be[k]);
      return out;
    }
    case Kind::DISTINCT_N: return {encode_distinct(t)};
  }
  throw Unsupported(std::string("cannot encode ") + kind_name(t.kind()));
}

void GroundSolver::assert_formula(Term formula)
{
  if (!formula.sort().is_bool()) throw SortMismatch("assertion must be Bool", 0);
  reserve_array_classes(formula);
  d_assertions.push_back(formula);
  add_clause({encode(formula)[0]});
}

GroundResult GroundSolver::solve()
{
  ++d_num_solves;
  d_interp = Interpretation();
  if (d_unsat) return GroundResult::UNSAT;
  sat::Status st = d_sat.solve(d_options.conflict_budget);
  if (st == sat::Status::UNSAT)
  {
    d_unsat = true;
    return GroundResult::UNSAT;
  }
  if (st == sat::Status::UNKNOWN) return GroundResult::UNKNOWN;
  for (const Term& t : d_leaves)
  {
    const Bits& b = d_bits.at(t);
    uint64_t v = 0;
    for (size_t k = 0; k < b.size(); ++k)
      if (d_sat.model_value(b[k])) v |= uint64_t{1} << k;
    d_interp.set(t, v);
  }
  if (d_options.check_interpretations) check_interpretation();
  return GroundResult::SAT;
}

void GroundSolver::check_interpretation() const
{
  for (const Term& f : d_assertions)
  {
    if (!eval_atom(d_interp, f))
      throw InvariantViolation("ground interpretation falsifies " + f.to_string());
  }
  for (const Term& f : d_virtual_reads)
  {
    if (!eval_atom(d_interp, f))
      throw InvariantViolation("ground interpretation falsifies virtual read " + f.to_string());
  }
  auto congruent = [this](const std::vector<Term>& apps) {
    for (size_t x = 0; x < apps.size(); ++x)
    {
      for (size_t y = x + 1; y < apps.size(); ++y)
      {
        bool args_equal = true;
        for (size_t k = 0; k < apps[x].num_children(); ++k)
        {
          if (d_interp.value(apps[x][k]) != d_interp.value(apps[y][k])) args_equal = false;
        }
        if (args_equal && d_interp.value(apps[x]) != d_interp.value(apps[y]))
          throw InvariantViolation("ground interpretation violates congruence on "
                                   + apps[x].to_string() + " and " + apps[y].to_string());
      }
    }
  };
  for (const auto& [s, apps] : d_selects) congruent(apps);
  for (const auto& [s, apps] : d_stores) congruent(apps);
  for (const auto& [s, apps] : d_consts) congruent(apps);
}

}  // namespace caext
