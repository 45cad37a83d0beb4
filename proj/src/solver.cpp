#include "caext/solver.h"

#include <sstream>

#include "caext/error.h"

namespace caext {

const char* verdict_name(Verdict v)
{
  switch (v)
  {
    case Verdict::SAT: return "sat";
    case Verdict::UNSAT: return "unsat";
    case Verdict::UNKNOWN: return "unknown";
  }
  return "unknown";
}

std::string SolverStats::to_string() const
{
  std::ostringstream out;
  out << "refinements: " << refinements << "\n";
  out << "ground solves: " << ground_solves << "\n";
  out << "sat conflicts: " << sat_conflicts << "\n";
  out << "lemmas: " << engine.lemmas << "\n";
  for (const auto& [rule, n] : engine.lemmas_by_rule)
    out << "  " << rule_name(rule) << ": " << n << "\n";
  out << "propagation steps: " << engine.steps << "\n";
  out << "max map size: " << engine.max_map_size << "\n";
  out << "reason replay: " << (replay_reasons ? "on" : "off") << " (" << engine.replays
      << " replays)\n";
  out << "distinct_n encoding: " << distinct_mode << "\n";
  return out.str();
}

Solver::Solver(TermManager& tm, SolverOptions options)
    : d_tm(tm), d_options(options), d_flattener(tm)
{
  EngineOptions eo;
  eo.replay_reasons = options.replay_reasons;
  eo.check_invariants = options.check_invariants;
  d_engine = std::make_unique<ArrayEngine>(tm, eo);
  GroundOptions go;
  go.seed = options.seed;
  go.conflict_budget = options.conflict_budget;
  go.check_interpretations = options.check_invariants;
  d_ground = std::make_unique<GroundSolver>(tm, go);
  d_stats.replay_reasons = options.replay_reasons;
  d_stats.distinct_mode = GroundSolver::distinct_mode();

  d_engine->set_lemma_preprocessor([this](Term lemma) {
    FlatLiteralSet flat;
    d_flattener.add(lemma, flat);
    for (const auto& [name, def] : flat.definitions) d_definitions.emplace(name, def);
    for (const Term& f : flat.formulas) d_ground->assert_formula(f);
    return flat.formulas;
  });
  d_engine->on_lemma = [this](const Lemma& l) {
    d_lemmas.push_back(l);
    if (on_lemma) on_lemma(l);
  };
}

Solver::~Solver() = default;

void Solver::assert_formula(Term formula)
{
  if (d_verdict) throw Error("solver already checked; assertions are not incremental");
  if (!formula.sort().is_bool()) throw SortMismatch("assertion must be Bool", 0);
  d_assertions.push_back(formula);
}

Verdict Solver::check_sat()
{
  if (d_verdict) throw Error("solver already checked");
  FlatLiteralSet flat;
  for (const Term& a : d_assertions) d_flattener.add(a, flat);
  for (const auto& [name, def] : flat.definitions) d_definitions.emplace(name, def);
  d_ground->reserve(flat.formulas);
  for (const Term& f : flat.formulas)
  {
    d_engine->add_formula(f);
    d_ground->assert_formula(f);
  }

  for (;;)
  {
    GroundResult r = d_ground->solve();
    ++d_stats.ground_solves;
    d_stats.sat_conflicts = d_ground->sat_stats().conflicts;
    d_stats.engine = d_engine->stats();
    if (r == GroundResult::UNSAT)
    {
      d_engine->mark_unsat();
      d_verdict = Verdict::UNSAT;
      break;
    }
    if (r == GroundResult::UNKNOWN)
    {
      d_verdict = Verdict::UNKNOWN;
      break;
    }
    d_engine->set_interpretation(d_ground->interpretation());
    d_engine->init_steps();
    d_engine->propagate_fixpoint();
    if (on_fixpoint) on_fixpoint(*d_engine);
    if (d_engine->check_conflicts())
    {
      ++d_stats.refinements;
      if (d_options.max_refinements && d_stats.refinements >= d_options.max_refinements)
      {
        d_verdict = Verdict::UNKNOWN;
        break;
      }
      continue;
    }
    d_model = build_model(*d_engine, d_options.model_construction);
    if (d_options.check_model)
    {
      Model m = model_for(free_constants(d_assertions));
      Validation v = validate_model(m, d_assertions);
      if (!v.valid)
        throw InvariantViolation("built model falsifies " + v.failing.to_string());
    }
    d_verdict = Verdict::SAT;
    break;
  }
  d_stats.engine = d_engine->stats();
  return *d_verdict;
}

const Model& Solver::model() const
{
  if (!d_model) throw Error("no model: last verdict was not sat");
  return *d_model;
}

Model Solver::model_for(std::span<const Term> constants) const
{
  const Model& full = model();
  Model m;
  for (const Term& c : constants)
    m.set(c, full.has(c) ? full.get(c) : zero_value(c.sort()));
  return m;
}

Term Solver::unflatten(Term t) const { return caext::unflatten(d_tm, t, d_definitions); }

}  // namespace caext
