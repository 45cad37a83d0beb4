#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "caext/array_engine.h"
#include "caext/flatten.h"
#include "caext/ground_solver.h"
#include "caext/model.h"
#include "caext/term.h"

namespace caext {

struct SolverOptions
{
  uint64_t seed = 0;
  /// Conflicts allowed per ground solve; 0 is unlimited.
  uint64_t conflict_budget = 0;
  /// Refinement iterations allowed; 0 is unlimited.
  uint64_t max_refinements = 0;
  bool replay_reasons = true;
  bool check_invariants = true;
  /// Validate every built model against the input assertions.
  bool check_model = true;
  ModelConstruction model_construction = ModelConstruction::PER_INDEX;
};

enum class Verdict
{
  SAT,
  UNSAT,
  UNKNOWN,
};

const char* verdict_name(Verdict v);

struct SolverStats
{
  uint64_t refinements = 0;
  uint64_t ground_solves = 0;
  uint64_t sat_conflicts = 0;
  EngineStats engine;
  bool replay_reasons = true;
  std::string distinct_mode;

  std::string to_string() const;
};

/// Lemmas-on-demand loop: flatten the input, find an empty-theory
/// interpretation, saturate the propagation rules under it and add the first
/// conflict lemma until no conflict remains (sat) or the ground solver fails
/// (unsat). One check per solver object.
class Solver
{
 public:
  explicit Solver(TermManager& tm, SolverOptions options = {});
  ~Solver();

  void assert_formula(Term formula);
  Verdict check_sat();

  /// Model over the free constants of the input and every flattening name.
  /// Throws Error unless the last verdict was sat.
  const Model& model() const;
  /// Model restricted to the given constants; unassigned ones get zero.
  Model model_for(std::span<const Term> constants) const;

  const std::vector<Term>& assertions() const { return d_assertions; }
  const SolverStats& stats() const { return d_stats; }
  const ArrayEngine& engine() const { return *d_engine; }

  /// Every lemma emitted so far, in order.
  const std::vector<Lemma>& lemmas() const { return d_lemmas; }
  /// `t` with flattening names replaced by the terms they stand for.
  Term unflatten(Term t) const;

  /// Called with each lemma before it is added.
  std::function<void(const Lemma&)> on_lemma;
  /// Called after propagation reached its fixpoint, before the conflict scan.
  std::function<void(const ArrayEngine&)> on_fixpoint;

 private:
  TermManager& d_tm;
  SolverOptions d_options;
  std::vector<Term> d_assertions;
  Flattener d_flattener;
  std::unordered_map<Term, Term> d_definitions;
  std::unique_ptr<ArrayEngine> d_engine;
  std::unique_ptr<GroundSolver> d_ground;
  std::vector<Lemma> d_lemmas;
  std::optional<Model> d_model;
  std::optional<Verdict> d_verdict;
  SolverStats d_stats;
};

}  // namespace caext
