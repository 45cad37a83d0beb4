#include "caext/benchgen.h"

#include <random>
#include <sstream>
#include <unordered_map>

#include "caext/error.h"
#include "caext/smtlib.h"

namespace caext {

std::vector<Term> gen_crafted(TermManager& tm, const CraftedParams& p)
{
  if (p.counts.size() != p.z + 2)
    throw Error("crafted family needs z + 2 chain lengths, got " + std::to_string(p.counts.size()));
  if (p.index_sort.is_null() || p.element_sort.is_null() || p.index_sort.is_array()
      || p.element_sort.is_array())
  {
    throw Error("crafted family needs scalar index and element sorts");
  }
  Sort array_sort = tm.mk_array_sort(p.index_sort, p.element_sort);

  std::vector<Term> bases;
  bases.push_back(tm.mk_const_array(array_sort, tm.mk_const(p.element_sort, "v")));
  for (uint32_t k = 1; k <= p.z; ++k)
    bases.push_back(tm.mk_const(array_sort, p.z == 1 ? "a" : "a" + std::to_string(k)));
  bases.push_back(tm.mk_const_array(array_sort, tm.mk_const(p.element_sort, "w")));

  uint32_t next_i = 0, next_j = 0, next_u = 0;
  auto chain = [&](Term base, uint32_t length, bool left) {
    for (uint32_t k = 0; k < length; ++k)
    {
      std::string idx = left ? "i" + std::to_string(++next_i) : "j" + std::to_string(++next_j);
      Term i = tm.mk_const(p.index_sort, idx);
      Term u = tm.mk_const(p.element_sort, "u" + std::to_string(++next_u));
      base = tm.mk_store(base, i, u);
    }
    return base;
  };

  std::vector<Term> out;
  for (uint32_t link = 0; link <= p.z; ++link)
  {
    Term left = chain(bases[link], p.counts[link], true);
    Term right = chain(bases[link + 1], p.counts[link + 1], false);
    out.push_back(tm.mk_eq(left, right));
  }
  return out;
}

uint64_t crafted_free_constants(const CraftedParams& p)
{
  uint64_t stores = 0;
  for (size_t k = 0; k < p.counts.size(); ++k)
  {
    bool end = k == 0 || k + 1 == p.counts.size();
    stores += (end ? 1 : 2) * uint64_t{p.counts[k]};
  }
  return 2 + p.z + 2 * stores;
}

std::string sort_tag(Sort sort)
{
  if (sort.is_bool()) return "bool";
  if (sort.is_bv()) return "bv" + std::to_string(sort.bv_width());
  return "array";
}

std::string crafted_filename(const CraftedParams& p, bool quantified)
{
  std::string counts;
  for (size_t k = 0; k < p.counts.size(); ++k)
    counts += (k ? "-" : "") + std::to_string(p.counts[k]);
  return "crafted_z" + std::to_string(p.z) + "_" + counts + "_" + sort_tag(p.index_sort) + "_"
         + sort_tag(p.element_sort) + "_" + std::to_string(p.seed)
         + (quantified ? "_forall" : "") + ".smt2";
}

std::string emit_quantified(TermManager& tm, std::span<const Term> assertions)
{
  std::unordered_map<Term, Term> replaced;
  std::vector<std::pair<Term, Term>> axioms;
  std::vector<Term> rewritten;
  for (const Term& t : subterms_postorder(assertions))
  {
    std::vector<Term> ch;
    bool changed = false;
    for (const Term& c : t.children())
    {
      auto it = replaced.find(c);
      ch.push_back(it == replaced.end() ? c : it->second);
      changed = changed || it != replaced.end();
    }
    Term r = changed ? rebuild(tm, t, ch) : t;
    if (t.kind() == Kind::CONST_ARRAY)
    {
      Term c = tm.mk_fresh_const(t.sort(), "c");
      axioms.emplace_back(c, r[0]);
      r = c;
    }
    if (r != t) replaced.emplace(t, r);
  }
  for (const Term& a : assertions)
  {
    auto it = replaced.find(a);
    rewritten.push_back(it == replaced.end() ? a : it->second);
  }

  std::vector<Term> declared;
  for (const auto& [c, v] : axioms) declared.push_back(c);
  std::ostringstream out;
  out << "(set-logic ALL)\n";
  std::vector<Term> roots = rewritten;
  for (const auto& [c, v] : axioms) roots.push_back(v);
  for (const Term& c : free_constants(roots)) declared.push_back(c);
  std::unordered_map<Term, bool> seen;
  for (const Term& c : declared)
  {
    if (seen.emplace(c, true).second)
      out << "(declare-const " << c.symbol() << " " << print_sort(c.sort()) << ")\n";
  }
  for (const auto& [c, v] : axioms)
  {
    out << "(assert (forall ((__i " << print_sort(c.sort().array_index()) << ")) (= (select "
        << c.symbol() << " __i) " << print_term(v) << ")))\n";
  }
  for (const Term& a : rewritten) out << "(assert " << print_term(a) << ")\n";
  out << "(check-sat)\n";
  return out.str();
}

/* -------------------------------------------------------------------------- */

namespace {

class FuzzBuilder
{
 public:
  FuzzBuilder(TermManager& tm, uint64_t seed) : d_tm(tm), d_rng(seed) {}

  std::vector<Term> build(const FuzzOptions& opt)
  {
    // Smallest instance: Bool sorts, one array, one index and one element constant.
    const OracleBounds& ob = opt.bounds;
    if (ob.max_index_domain < 2 || ob.max_element_domain < 2 || ob.max_array_constants < 1
        || ob.max_free_constants < 3 || opt.max_assertions < 1 || opt.max_space < 2)
    {
      throw BoundsExceeded("fuzz bounds admit no instance");
    }
    bool bias = pick(2) == 0;
    for (uint64_t tries = 0;; ++tries)
    {
      if (tries == kMaxAttempts)
        throw BoundsExceeded("no fuzz instance within bounds after " + std::to_string(tries)
                             + " attempts");
      std::vector<Term> out = attempt(opt, bias);
      if (out.empty()) continue;
      if (!within_oracle_bounds(out, opt.bounds)) continue;
      OracleBounds b = opt.bounds;
      if (oracle_space(out, b) > opt.max_space) continue;
      return out;
    }
  }

 private:
  static constexpr uint64_t kMaxAttempts = 100'000;

  uint64_t pick(uint64_t n) { return d_rng() % n; }
  bool chance(uint64_t percent) { return pick(100) < percent; }

  Sort small_sort()
  {
    switch (pick(3))
    {
      case 0: return d_tm.mk_bool_sort();
      case 1: return d_tm.mk_bv_sort(1);
      default: return d_tm.mk_bv_sort(2);
    }
  }

  std::vector<Term> attempt(const FuzzOptions& opt, bool bias)
  {
    d_index_sort = small_sort();
    d_element_sort = small_sort();
    if (domain_size(d_index_sort) > opt.bounds.max_index_domain
        || domain_size(d_element_sort) > opt.bounds.max_element_domain)
    {
      return {};
    }
    d_array_sort = d_tm.mk_array_sort(d_index_sort, d_element_sort);
    std::string tag = "_" + sort_tag(d_index_sort) + sort_tag(d_element_sort);
    size_t num_arrays = 1 + pick(std::min<size_t>(2, opt.bounds.max_array_constants));
    size_t num_index = 1 + pick(3);
    size_t num_elem = 1 + pick(3);
    if (num_arrays + num_index + num_elem > opt.bounds.max_free_constants) return {};
    d_arrays.clear();
    d_indices.clear();
    d_elements.clear();
    for (size_t k = 0; k < num_arrays; ++k)
      d_arrays.push_back(d_tm.mk_const(d_array_sort, "a" + std::to_string(k) + tag));
    for (size_t k = 0; k < num_index; ++k)
      d_indices.push_back(d_tm.mk_const(d_index_sort, "i" + std::to_string(k) + tag));
    for (size_t k = 0; k < num_elem; ++k)
      d_elements.push_back(d_tm.mk_const(d_element_sort, "e" + std::to_string(k) + tag));

    std::vector<Term> out;
    // The biased equality takes one of the assertion slots.
    size_t n = (bias ? 0 : 1) + pick(opt.max_assertions);
    for (size_t k = 0; k < n; ++k) out.push_back(formula());
    if (bias)
    {
      Term c = d_tm.mk_const_array(d_array_sort, element_leaf());
      Term other = array_term(2);
      Term eq = chance(50) ? d_tm.mk_eq(other, c) : d_tm.mk_eq(c, other);
      out.push_back(chance(70) ? eq : d_tm.mk_not(eq));
    }
    return out;
  }

  Term value_of(Sort s) { return d_tm.mk_value(s, pick(domain_size(s))); }

  Term index_term() { return chance(80) ? d_indices[pick(d_indices.size())] : value_of(d_index_sort); }

  Term element_leaf()
  {
    return chance(75) ? d_elements[pick(d_elements.size())] : value_of(d_element_sort);
  }

  Term element_term(int depth)
  {
    if (depth > 0 && chance(30))
    {
      Term a = array_term(depth - 1);
      return d_tm.mk_select(a, index_term());
    }
    return element_leaf();
  }

  Term array_term(int depth)
  {
    uint64_t r = pick(100);
    if (depth > 0 && r < 35)
    {
      // Arguments are drawn in a fixed order so instances do not depend on
      // the compiler's evaluation order.
      Term a = array_term(depth - 1);
      Term i = index_term();
      return d_tm.mk_store(a, i, element_term(depth - 1));
    }
    if (r < 60) return d_tm.mk_const_array(d_array_sort, element_leaf());
    return d_arrays[pick(d_arrays.size())];
  }

  Term atom()
  {
    uint64_t r = pick(100);
    Term lhs, rhs;
    if (r < 35)
    {
      lhs = array_term(2);
      rhs = array_term(2);
    }
    else if (r < 65)
    {
      Term a = array_term(2);
      lhs = d_tm.mk_select(a, index_term());
      rhs = element_term(1);
    }
    else if (r < 78)
    {
      lhs = index_term();
      rhs = index_term();
    }
    else if (r < 90)
    {
      lhs = element_term(1);
      rhs = element_term(1);
    }
    if (!lhs.is_null()) return d_tm.mk_eq(lhs, rhs);
    // Distinct over three scalar terms of one sort.
    bool idx = chance(50);
    std::vector<Term> ts;
    for (int k = 0; k < 3; ++k) ts.push_back(idx ? index_term() : element_term(1));
    if (chance(50))
    {
      std::vector<Term> neqs;
      for (size_t k = 0; k < ts.size(); ++k)
        for (size_t l = k + 1; l < ts.size(); ++l)
          neqs.push_back(d_tm.mk_not(d_tm.mk_eq(ts[k], ts[l])));
      return d_tm.mk_and(neqs);
    }
    return d_tm.mk_distinct_n(1 + pick(ts.size() + 1), ts);
  }

  Term literal() { return chance(40) ? d_tm.mk_not(atom()) : atom(); }

  Term formula()
  {
    uint64_t r = pick(100);
    if (r < 75) return literal();
    if (r < 90) return d_tm.mk_or({literal(), literal()});
    if (r < 95) return d_tm.mk_and({literal(), literal()});
    Term premise = literal();
    return d_tm.mk_implies(premise, literal());
  }

  TermManager& d_tm;
  std::mt19937_64 d_rng;
  Sort d_index_sort, d_element_sort, d_array_sort;
  std::vector<Term> d_arrays, d_indices, d_elements;
};

}  // namespace

std::vector<Term> gen_fuzz(TermManager& tm, uint64_t seed, const FuzzOptions& options)
{
  return FuzzBuilder(tm, seed).build(options);
}

}  // namespace caext
