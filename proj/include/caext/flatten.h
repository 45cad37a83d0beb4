#pragma once

#include <span>
#include <unordered_map>
#include <utility>
#include <vector>

#include "caext/term.h"

namespace caext {

/// Flattened assertions. `formulas` keeps the Boolean structure of the input
/// over flat atoms and contains one defining literal per introduced name;
/// `definitions` maps each introduced constant to the term it names, in
/// introduction order.
struct FlatLiteralSet
{
  std::vector<Term> formulas;
  std::vector<std::pair<Term, Term>> definitions;
};

/// Incremental flattener. Every select/store/const application and every
/// non-leaf Boolean term in term position receives a fresh `__flat_<k>`
/// constant; ite in term position becomes a fresh constant with two guarded
/// equalities. Repeated subterms share one name across all calls.
class Flattener
{
 public:
  explicit Flattener(TermManager& tm) : d_tm(tm) {}

  /// Flattens one Boolean formula; the returned formula and every new
  /// defining literal are appended to `out`.
  void add(Term formula, FlatLiteralSet& out);

  /// Returns the flat version of `formula` and appends definitions only.
  Term flatten_formula(Term formula, FlatLiteralSet& out);

 private:
  Term formula(Term t, FlatLiteralSet& out);
  Term leaf(Term t, FlatLiteralSet& out);
  Term name(Term defining, FlatLiteralSet& out);

  TermManager& d_tm;
  std::unordered_map<Term, Term> d_formula_memo;
  std::unordered_map<Term, Term> d_leaf_memo;
};

FlatLiteralSet flatten(TermManager& tm, std::span<const Term> assertions);

/// A flat atom: Bool leaf, x = y, x = f(x1..xn) or f(x1..xn) = x with f in
/// {select, store, const}, or distinct_n over leaves. All x are constants or
/// values.
bool is_flat_atom(Term atom);

/// A flat literal: true, false, a flat atom or its negation.
bool is_flat_literal(Term literal);

/// A formula built with not/and/or/=>/ite over flat atoms.
bool is_flat_formula(Term formula);

/// Replaces every introduced constant by its defining term, recursively.
Term unflatten(TermManager& tm,
               Term t,
               const std::unordered_map<Term, Term>& definitions);

}  // namespace caext
