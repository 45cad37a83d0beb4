#include "caext/flatten.h"

#include "caext/error.h"

namespace caext {

namespace {

constexpr const char* FLAT_PREFIX = "__flat_";

bool is_app(Term t)
{
  Kind k = t.kind();
  return k == Kind::SELECT || k == Kind::STORE || k == Kind::CONST_ARRAY;
}

bool all_leaves(Term t)
{
  for (const Term& c : t.children())
    if (!c.is_leaf()) return false;
  return true;
}

}  // namespace

Term Flattener::name(Term defining, FlatLiteralSet& out)
{
  auto it = d_leaf_memo.find(defining);
  if (it != d_leaf_memo.end()) return it->second;
  Term x = d_tm.mk_fresh_const(defining.sort(), FLAT_PREFIX);
  out.formulas.push_back(d_tm.mk_eq(x, defining));
  out.definitions.emplace_back(x, defining);
  d_leaf_memo.emplace(defining, x);
  return x;
}

Term Flattener::leaf(Term t, FlatLiteralSet& out)
{
  if (t.is_leaf()) return t;
  auto it = d_leaf_memo.find(t);
  if (it != d_leaf_memo.end()) return it->second;

  Term result;
  if (is_app(t))
  {
    std::vector<Term> ch;
    for (const Term& c : t.children()) ch.push_back(leaf(c, out));
    result = name(rebuild(d_tm, t, ch), out);
  }
  else if (t.sort().is_bool())
  {
    Term f = formula(t, out);
    if (f.is_leaf())
    {
      result = f;
    }
    else
    {
      Term b = d_tm.mk_fresh_const(t.sort(), FLAT_PREFIX);
      out.formulas.push_back(d_tm.mk_or({d_tm.mk_not(b), f}));
      out.formulas.push_back(d_tm.mk_or({b, d_tm.mk_not(f)}));
      out.definitions.emplace_back(b, f);
      result = b;
    }
  }
  else if (t.kind() == Kind::ITE)
  {
    Term c = formula(t[0], out);
    Term a = leaf(t[1], out);
    Term e = leaf(t[2], out);
    Term x = d_tm.mk_fresh_const(t.sort(), FLAT_PREFIX);
    out.formulas.push_back(d_tm.mk_or({d_tm.mk_not(c), d_tm.mk_eq(x, a)}));
    out.formulas.push_back(d_tm.mk_or({c, d_tm.mk_eq(x, e)}));
    out.definitions.emplace_back(x, d_tm.mk_ite(c, a, e));
    result = x;
  }
  else
  {
    throw Unsupported(std::string("cannot flatten term of kind ") + kind_name(t.kind()));
  }
  d_leaf_memo.emplace(t, result);
  return result;
}

Term Flattener::formula(Term t, FlatLiteralSet& out)
{
  if (!t.sort().is_bool()) throw SortMismatch("formula expected, got " + t.to_string(), 0);
  if (t.is_leaf()) return t;
  auto it = d_formula_memo.find(t);
  if (it != d_formula_memo.end()) return it->second;

  Term result;
  switch (t.kind())
  {
    case Kind::NOT:
    case Kind::AND:
    case Kind::OR:
    case Kind::IMPLIES:
    case Kind::ITE:
    {
      std::vector<Term> ch;
      for (const Term& c : t.children()) ch.push_back(formula(c, out));
      result = rebuild(d_tm, t, ch);
      break;
    }
    case Kind::EQUAL:
      result = d_tm.mk_eq(leaf(t[0], out), leaf(t[1], out));
      break;
    case Kind::DISTINCT_N:
    {
      std::vector<Term> ch;
      for (const Term& c : t.children()) ch.push_back(leaf(c, out));
      result = rebuild(d_tm, t, ch);
      break;
    }
    case Kind::SELECT: result = leaf(t, out); break;
    default:
      throw Unsupported(std::string("cannot flatten formula of kind ") + kind_name(t.kind()));
  }
  d_formula_memo.emplace(t, result);
  return result;
}

Term Flattener::flatten_formula(Term f, FlatLiteralSet& out) { return formula(f, out); }

void Flattener::add(Term f, FlatLiteralSet& out)
{
  Term flat = formula(f, out);
  out.formulas.push_back(flat);
}

FlatLiteralSet flatten(TermManager& tm, std::span<const Term> assertions)
{
  Flattener fl(tm);
  FlatLiteralSet out;
  for (const Term& a : assertions) fl.add(a, out);
  return out;
}

bool is_flat_atom(Term atom)
{
  if (!atom.sort().is_bool()) return false;
  if (atom.is_leaf()) return true;
  switch (atom.kind())
  {
    case Kind::EQUAL:
    {
      Term l = atom[0], r = atom[1];
      if (l.is_leaf() && r.is_leaf()) return true;
      if (l.is_leaf() && is_app(r) && all_leaves(r)) return true;
      if (r.is_leaf() && is_app(l) && all_leaves(l)) return true;
      return false;
    }
    case Kind::DISTINCT_N: return all_leaves(atom);
    default: return false;
  }
}

bool is_flat_literal(Term literal)
{
  if (literal.kind() == Kind::NOT) return is_flat_atom(literal[0]);
  return is_flat_atom(literal);
}

bool is_flat_formula(Term f)
{
  switch (f.kind())
  {
    case Kind::NOT:
    case Kind::AND:
    case Kind::OR:
    case Kind::IMPLIES:
      for (const Term& c : f.children())
        if (!is_flat_formula(c)) return false;
      return true;
    case Kind::ITE:
      if (!f.sort().is_bool()) return false;
      for (const Term& c : f.children())
        if (!is_flat_formula(c)) return false;
      return true;
    default: return is_flat_atom(f);
  }
}

Term unflatten(TermManager& tm, Term t, const std::unordered_map<Term, Term>& definitions)
{
  std::unordered_map<Term, Term> memo;
  std::vector<std::pair<Term, bool>> stack{{t, false}};
  while (!stack.empty())
  {
    auto [cur, expanded] = stack.back();
    stack.pop_back();
    if (memo.count(cur)) continue;
    auto def = cur.is_constant() ? definitions.find(cur) : definitions.end();
    if (!expanded)
    {
      stack.emplace_back(cur, true);
      if (def != definitions.end())
      {
        stack.emplace_back(def->second, false);
      }
      else
      {
        for (const Term& c : cur.children()) stack.emplace_back(c, false);
      }
      continue;
    }
    if (def != definitions.end())
    {
      memo.emplace(cur, memo.at(def->second));
      continue;
    }
    std::vector<Term> ch;
    for (const Term& c : cur.children()) ch.push_back(memo.at(c));
    memo.emplace(cur, rebuild(tm, cur, ch));
  }
  return memo.at(t);
}

}  // namespace caext
