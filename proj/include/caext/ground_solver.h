#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "caext/sat.h"
#include "caext/term.h"

namespace caext {

/// Empty-theory interpretation: a value for every constant and every
/// select term, and an equivalence-class id for every array term. Compound
/// Boolean terms are evaluated from these on demand.
class Interpretation
{
 public:
  bool empty() const { return d_values.empty(); }
  void set(Term t, uint64_t value) { d_values[t] = value; }
  bool has_value(Term t) const { return d_values.count(t) > 0; }

  /// Value of `t`: the bit pattern of a scalar, the class id of an array,
  /// 0/1 for formulas. Throws UnassignedConstant if a leaf has no value.
  uint64_t value(Term t) const;

  const std::unordered_map<Term, uint64_t>& assignments() const { return d_values; }

 private:
  std::unordered_map<Term, uint64_t> d_values;
};

/// Truth value of a Boolean term under `interp`. Array equalities compare
/// class ids. Throws UnassignedConstant.
bool eval_atom(const Interpretation& interp, Term atom);

struct GroundOptions
{
  uint64_t seed = 0;
  /// Conflicts allowed per solve() call; 0 is unlimited.
  uint64_t conflict_budget = 0;
  /// Check the returned interpretation against all assertions, virtual reads
  /// and congruence after every solve.
  bool check_interpretations = true;
};

enum class GroundResult
{
  SAT,
  UNSAT,
  UNKNOWN,
};

/// Finite-domain model finder for the empty theory over Bool/BV scalars and
/// array terms treated as uninterpreted. Bit-blasts to the incremental CDCL
/// solver: select, store and const are encoded as uninterpreted functions via
/// pairwise congruence constraints, arrays receive class-id bits, and every
/// store s = store(a,i,u) contributes the virtual read select(s,i) = u.
class GroundSolver
{
 public:
  explicit GroundSolver(TermManager& tm, GroundOptions options = {});

  /// Sizes the array class ids for the array terms of `formulas`. Later
  /// formulas may add up to eight times as many array terms per sort.
  void reserve(std::span<const Term> formulas);
  /// Adds a Boolean formula permanently.
  void assert_formula(Term formula);
  GroundResult solve();

  /// Interpretation from the last SAT result.
  const Interpretation& interpretation() const { return d_interp; }
  const std::vector<Term>& assertions() const { return d_assertions; }
  /// Equalities select(s,i) = u for every store term encoded so far.
  const std::vector<Term>& virtual_reads() const { return d_virtual_reads; }

  /// Encoding mode of distinct_n constraints.
  static const char* distinct_mode() { return "eager"; }
  const sat::SolverStats& sat_stats() const { return d_sat.stats(); }
  uint64_t num_solves() const { return d_num_solves; }

  /// Re-checks the current interpretation. Throws InvariantViolation.
  void check_interpretation() const;

 private:
  using Bits = std::vector<sat::Lit>;

  const Bits& encode(Term t);
  Bits encode_node(Term t);
  uint32_t width_of(Sort sort);
  void reserve_array_classes(Term formula);

  sat::Lit true_lit() const { return d_true; }
  sat::Lit false_lit() const { return ~d_true; }
  Bits fresh_bits(uint32_t n);
  sat::Lit lit_and(std::vector<sat::Lit> lits);
  sat::Lit lit_or(std::vector<sat::Lit> lits);
  sat::Lit lit_xnor(sat::Lit a, sat::Lit b);
  sat::Lit lit_ite(sat::Lit c, sat::Lit t, sat::Lit e);
  sat::Lit lit_eq(Term a, Term b);
  sat::Lit lit_eq_bits(const Bits& a, const Bits& b);
  sat::Lit encode_distinct(Term t);
  void add_clause(std::vector<sat::Lit> lits);

  TermManager& d_tm;
  GroundOptions d_options;
  sat::Solver d_sat;
  sat::Lit d_true;

  std::unordered_map<Term, Bits> d_bits;
  std::map<std::pair<uint64_t, uint64_t>, sat::Lit> d_eq_cache;
  std::unordered_map<Sort, uint32_t> d_array_width;
  std::unordered_map<Sort, uint64_t> d_array_count;
  std::unordered_map<Sort, std::vector<Term>> d_selects;
  std::unordered_map<Sort, std::vector<Term>> d_stores;
  std::unordered_map<Sort, std::vector<Term>> d_consts;

  std::vector<Term> d_assertions;
  std::vector<Term> d_virtual_reads;
  std::vector<Term> d_leaves;
  Interpretation d_interp;
  uint64_t d_num_solves = 0;
  bool d_unsat = false;
};

}  // namespace caext
