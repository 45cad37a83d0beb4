#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "caext/ground_solver.h"
#include "caext/term.h"

namespace caext {

enum class Rule
{
  INIT_R,
  INIT_W,
  INIT_C,
  ROW_D,
  ROW_U,
  EQ_R,
  EQ_L,
  COW_D,
  COW_U,
  CEQ_R,
  CEQ_L,
  ROC,
  CONG_R,
  DIS_EQ,
  CONG_C,
};

const char* rule_name(Rule rule);

/// One entry of the propagation map: `t` reached `dest` from `source` because
/// of `reason` (the true term for unconditional steps). With reason replay
/// enabled, stored steps carry only the rule; reason and source are rebuilt
/// on demand.
struct Step
{
  Term reason;
  Term source;
  Rule rule;
};

struct StepKey
{
  Term dest;
  Term term;
  friend bool operator==(const StepKey&, const StepKey&) = default;
};

struct StepKeyHash
{
  size_t operator()(const StepKey& k) const noexcept
  {
    return std::hash<Term>{}(k.dest) * 1000003u ^ std::hash<Term>{}(k.term);
  }
};

using PropagationMap = std::unordered_map<StepKey, Step, StepKeyHash>;

/// Lemma produced by a conflict rule: conjunction of `antecedents` implies
/// `conclusion`. `formula` is the implication as added to the formula set.
struct Lemma
{
  Rule rule;
  std::vector<Term> antecedents;
  Term conclusion;
  Term formula;
};

struct EngineOptions
{
  /// Drop reasons and sources from stored steps and rebuild them by
  /// replaying the breadth-first propagation of the term.
  bool replay_reasons = true;
  /// Check write-once, reason currency and lemma exclusion on the fly.
  bool check_invariants = true;
};

struct EngineStats
{
  uint64_t lemmas = 0;
  std::map<Rule, uint64_t> lemmas_by_rule;
  uint64_t steps = 0;
  uint64_t max_map_size = 0;
  uint64_t replays = 0;
};

enum class EngineState
{
  RUNNING,
  SATURATED,
  UNSAT,
};

/// Propagation and conflict rules over a formula set A, a ground
/// interpretation I and the propagation map. Rules that set a map entry only
/// fire on unset entries; conflict rules append a lemma to A and reset I and
/// the map. Each propagated term is explored breadth first from its initial
/// step, which fixes the order in which entries are set.
class ArrayEngine
{
 public:
  explicit ArrayEngine(TermManager& tm, EngineOptions options = {});

  /// Appends a formula to A and indexes its array terms.
  void add_formula(Term formula);
  const std::vector<Term>& formulas() const { return d_formulas; }

  /// Lemmas are passed through this function before being appended to A.
  void set_lemma_preprocessor(std::function<std::vector<Term>(Term)> fn)
  {
    d_preprocess = std::move(fn);
  }

  /// Installs I. The map must be empty.
  void set_interpretation(const Interpretation& interp);
  const Interpretation& interpretation() const { return d_interp; }
  bool has_interpretation() const { return d_has_interp; }
  /// Back to the initial configuration: no interpretation, empty map.
  void reset();
  void mark_unsat() { d_state = EngineState::UNSAT; }
  EngineState state() const { return d_state; }

  /// Initial self-steps for every read, every store's virtual read and every
  /// constant array.
  void init_steps();
  /// Runs all propagation rules to fixpoint.
  void propagate_fixpoint();
  /// First applicable conflict in the order Roc, CongR, DisEq, CongC. On a hit
  /// the lemma is appended to A and the configuration is reset.
  std::optional<Lemma> check_conflicts();

  bool has_step(Term dest, Term t) const;
  /// Step with reason and source, rebuilt by replay if needed.
  Step step(Term dest, Term t) const;
  /// Literals of R(dest, t) from the initial step outwards, without
  /// duplicates; empty for the true reason. Throws UndefinedStep.
  std::vector<Term> compute_reason(Term dest, Term t) const;
  Term compute_reason_term(Term dest, Term t) const;
  /// Updated indices I(dest, c) for a constant array c. Throws UndefinedStep.
  std::vector<Term> compute_updated_indices(Term dest, Term const_array) const;

  /// True iff fewer than |sort| distinct values occur among `indices` in I.
  static bool exists_fresh_index(const Interpretation& interp,
                                 std::span<const Term> indices,
                                 Sort sort);

  const PropagationMap& propagation_map() const { return d_map; }
  /// Terms propagated to `dest`, in the order their steps were set.
  const std::vector<Term>& propagated_to(Term dest) const;

  /// Array terms of T(A) in order of first occurrence.
  const std::vector<Term>& arrays() const { return d_arrays; }
  const std::vector<Term>& reads() const { return d_reads; }
  const std::vector<Term>& stores() const { return d_stores; }
  const std::vector<Term>& const_arrays() const { return d_consts; }
  const std::vector<Term>& array_equalities() const { return d_array_eqs; }
  /// select(s, i) for every store s = store(a, i, u) of T(A).
  Term virtual_read(Term store) const;

  const EngineStats& stats() const { return d_stats; }
  const EngineOptions& options() const { return d_options; }

  /// Called after every newly set entry.
  std::function<void(const StepKey&, const Step&)> on_step;
  /// Called for every lemma before it is appended.
  std::function<void(const Lemma&)> on_lemma;

 private:
  struct Explored
  {
    PropagationMap steps;
    std::unordered_map<Term, std::vector<Term>> updated;
    std::vector<Term> order;
  };

  void index_term(Term t);
  bool holds(Term literal) const;
  Term neq(Term a, Term b);

  /// Breadth-first exploration of one propagated term under I.
  void explore(Term t, Explored& out) const;
  void explore_read(Term read, Explored& out) const;
  void explore_const(Term c, Explored& out) const;
  const Explored& replay(Term t) const;

  std::vector<Term> updated_indices_cached(Term dest, Term c) const;
  std::vector<std::pair<Term, Step>> path(Term dest, Term t) const;

  std::optional<Lemma> check_roc();
  std::optional<Lemma> check_cong_r();
  std::optional<Lemma> check_dis_eq();
  std::optional<Lemma> check_cong_c();
  Lemma make_lemma(Rule rule, std::vector<Term> antecedents, Term conclusion);
  void commit_lemma(const Lemma& lemma);

  TermManager& d_tm;
  EngineOptions d_options;
  std::function<std::vector<Term>(Term)> d_preprocess;

  std::vector<Term> d_formulas;
  std::unordered_set<Term> d_indexed;
  std::vector<Term> d_arrays;
  std::unordered_set<Term> d_array_set;
  std::vector<Term> d_reads;
  std::vector<Term> d_stores;
  std::vector<Term> d_consts;
  std::vector<Term> d_array_eqs;
  std::unordered_map<Term, std::vector<Term>> d_eqs_by_array;
  std::unordered_map<Term, std::vector<Term>> d_stores_by_base;
  std::unordered_map<Term, Term> d_virtual_reads;
  std::unordered_set<Term> d_witnessed;

  Interpretation d_interp;
  bool d_has_interp = false;
  bool d_at_fixpoint = false;
  EngineState d_state = EngineState::RUNNING;

  PropagationMap d_map;
  std::unordered_map<StepKey, std::vector<Term>, StepKeyHash> d_updated;
  std::unordered_map<Term, std::vector<Term>> d_by_dest;
  std::vector<Term> d_propagated_terms;
  mutable std::unordered_map<Term, Explored> d_replay_cache;

  EngineStats d_stats;
};

}  // namespace caext
