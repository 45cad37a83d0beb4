#pragma once

#include <cstdint>
#include <random>
#include <vector>

namespace caext::sat {

using Var = uint32_t;

/// Literal encoded as 2*var + sign, sign set for the negative literal.
struct Lit
{
  uint32_t x = 0;

  static Lit make(Var v, bool negative = false) { return Lit{2 * v + (negative ? 1u : 0u)}; }
  Var var() const { return x >> 1; }
  bool negative() const { return x & 1; }
  Lit operator~() const { return Lit{x ^ 1u}; }
  friend bool operator==(Lit a, Lit b) = default;
};

enum class Status
{
  SAT,
  UNSAT,
  UNKNOWN,
};

struct SolverStats
{
  uint64_t conflicts = 0;
  uint64_t decisions = 0;
  uint64_t propagations = 0;
  uint64_t restarts = 0;
  uint64_t solves = 0;
};

/// Incremental CDCL solver: two watched literals, first-UIP learning, VSIDS
/// with phase saving and Luby restarts. Clauses may be added between calls to
/// solve(); they are asserted permanently.
class Solver
{
 public:
  explicit Solver(uint64_t seed = 0);

  Var new_var();
  size_t num_vars() const { return d_assigns.size(); }

  /// Adds a permanent clause. Returns false once the clause set is known to
  /// be unsatisfiable.
  bool add_clause(std::vector<Lit> lits);
  bool add_clause(std::initializer_list<Lit> lits) { return add_clause(std::vector<Lit>(lits)); }

  /// `conflict_budget` of 0 means unlimited; UNKNOWN when exhausted.
  Status solve(uint64_t conflict_budget = 0);

  /// Value of `v` in the last satisfying assignment.
  bool model_value(Var v) const { return d_model[v]; }
  bool model_value(Lit l) const { return d_model[l.var()] != l.negative(); }

  bool okay() const { return d_ok; }
  const SolverStats& stats() const { return d_stats; }

 private:
  static constexpr uint8_t L_TRUE = 0;
  static constexpr uint8_t L_FALSE = 1;
  static constexpr uint8_t L_UNDEF = 2;
  static constexpr uint32_t NO_REASON = UINT32_MAX;

  struct Clause
  {
    std::vector<Lit> lits;
    bool learnt = false;
    bool deleted = false;
    double activity = 0;
  };
  struct Watcher
  {
    uint32_t clause;
    Lit blocker;
  };

  uint8_t value(Lit l) const
  {
    uint8_t a = d_assigns[l.var()];
    return a == L_UNDEF ? L_UNDEF : static_cast<uint8_t>(a ^ static_cast<uint8_t>(l.negative()));
  }
  uint32_t level() const { return static_cast<uint32_t>(d_trail_lim.size()); }

  void enqueue(Lit l, uint32_t reason);
  uint32_t propagate();
  void analyze(uint32_t confl, std::vector<Lit>& learnt, uint32_t& bt_level);
  bool lit_redundant(Lit l, uint32_t abstract_levels);
  void cancel_until(uint32_t lvl);
  uint32_t attach(std::vector<Lit> lits, bool learnt);
  void reduce_db();
  bool locked(uint32_t ci) const;
  Lit pick_branch();

  void bump_var(Var v);
  void bump_clause(Clause& c);
  void decay();

  void heap_insert(Var v);
  void heap_up(size_t pos);
  void heap_down(size_t pos);
  Var heap_pop();
  bool heap_contains(Var v) const { return d_heap_pos[v] != SIZE_MAX; }

  static double luby(double y, uint64_t x);

  std::vector<Clause> d_clauses;
  std::vector<uint32_t> d_learnts;
  std::vector<std::vector<Watcher>> d_watches;
  std::vector<uint8_t> d_assigns;
  std::vector<uint32_t> d_levels;
  std::vector<uint32_t> d_reasons;
  std::vector<bool> d_phase;
  std::vector<bool> d_seen;
  std::vector<Lit> d_trail;
  std::vector<size_t> d_trail_lim;
  size_t d_qhead = 0;
  std::vector<bool> d_model;

  std::vector<double> d_activity;
  std::vector<Var> d_heap;
  std::vector<size_t> d_heap_pos;
  double d_var_inc = 1.0;
  double d_cla_inc = 1.0;
  double d_max_learnts = 0;

  bool d_ok = true;
  std::mt19937_64 d_rng;
  bool d_random_phase;
  SolverStats d_stats;
  std::vector<Lit> d_analyze_stack;
  std::vector<Var> d_analyze_clear;
};

}  // namespace caext::sat
