#include "caext/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "caext/benchgen.h"
#include "caext/error.h"
#include "caext/oracle.h"
#include "caext/smtlib.h"
#include "caext/solver.h"

namespace caext {

namespace {

struct UsageError : Error
{
  using Error::Error;
};

std::string read_file(const std::string& path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Sort parse_sort_tag(TermManager& tm, const std::string& tag)
{
  if (tag == "bool") return tm.mk_bool_sort();
  if (tag.size() > 2 && tag.rfind("bv", 0) == 0
      && tag.find_first_not_of("0123456789", 2) == std::string::npos)
  {
    return tm.mk_bv_sort(static_cast<uint32_t>(std::stoul(tag.substr(2))));
  }
  throw UsageError("unknown sort '" + tag + "' (expected bool or bv<w>)");
}

std::vector<uint64_t> parse_list(const std::string& text)
{
  std::vector<uint64_t> r;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ','))
  {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw UsageError("bad number list '" + text + "'");
    r.push_back(std::stoull(item));
  }
  return r;
}

struct SolveArgs
{
  std::string file;
  bool check_model = false;
  bool check_invariants = false;
  bool stats = false;
  std::string replay = "on";
  uint64_t budget = 0;
};

int cmd_solve(const SolveArgs& a, uint64_t seed, std::ostream& out, std::ostream& err)
{
  TermManager tm;
  Script script = parse_script(tm, read_file(a.file));
  SolverOptions opt;
  opt.seed = seed;
  opt.conflict_budget = a.budget;
  opt.replay_reasons = a.replay == "on";
  opt.check_invariants = a.check_invariants;
  opt.check_model = false;
  Solver solver(tm, opt);
  for (const Term& f : script.assertions()) solver.assert_formula(f);
  Verdict v = solver.check_sat();
  if (v == Verdict::SAT && a.check_model)
  {
    std::vector<Term> assertions = script.assertions();
    Model m = solver.model_for(free_constants(assertions));
    Validation val = validate_model(m, assertions);
    if (!val.valid)
    {
      err << "error: model falsifies " << val.failing.to_string() << "\n";
      return EXIT_INTERNAL;
    }
  }
  out << verdict_name(v) << "\n";
  if (v == Verdict::SAT && script.has_get_model())
  {
    std::vector<Term> shown = script.declared();
    out << "(\n" << print_model(solver.model_for(shown), shown) << ")\n";
  }
  if (a.stats) err << solver.stats().to_string();
  return EXIT_VERDICT;
}

int cmd_validate(const std::string& file, const std::string& model_file, std::ostream& out)
{
  TermManager tm;
  Script script = parse_script(tm, read_file(file));
  Model model = parse_model(tm, read_file(model_file));
  Validation v = validate_model(model, script.assertions());
  if (v.valid)
    out << "valid\n";
  else
    out << "invalid " << v.failing.to_string() << "\n";
  return EXIT_VERDICT;
}

struct FuzzArgs
{
  uint64_t count = 100;
  std::string bounds;
  std::string replay = "on";
};

int cmd_fuzz(const FuzzArgs& a, uint64_t seed, std::ostream& out, std::ostream& err)
{
  FuzzOptions fo;
  if (!a.bounds.empty())
  {
    std::vector<uint64_t> b = parse_list(a.bounds);
    if (b.size() != 4) throw UsageError("--bounds needs four numbers");
    fo.bounds.max_index_domain = b[0];
    fo.bounds.max_element_domain = b[1];
    fo.bounds.max_free_constants = b[2];
    fo.bounds.max_array_constants = b[3];
  }
  uint64_t agree = 0, sat = 0, lemmas = 0, mismatches = 0;
  auto start = std::chrono::steady_clock::now();
  for (uint64_t k = 0; k < a.count; ++k)
  {
    TermManager tm;
    std::vector<Term> inst = gen_fuzz(tm, seed + k, fo);
    SolverOptions so;
    so.seed = seed + k;
    so.replay_reasons = a.replay == "on";
    Solver solver(tm, so);
    for (const Term& f : inst) solver.assert_formula(f);
    Verdict v = solver.check_sat();
    OracleResult o = oracle_solve(inst, fo.bounds);
    lemmas += solver.lemmas().size();
    bool same = (v == Verdict::SAT) == o.sat && v != Verdict::UNKNOWN;
    if (same)
    {
      ++agree;
      sat += o.sat;
    }
    else
    {
      ++mismatches;
      err << "mismatch at seed " << seed + k << ": solver " << verdict_name(v) << ", oracle "
          << (o.sat ? "sat" : "unsat") << "\n"
          << print_script(inst);
    }
  }
  double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  out << "fuzz: " << a.count << " instances, " << agree << " agree with the oracle (" << sat
      << " sat, " << agree - sat << " unsat), " << mismatches << " mismatches, " << lemmas
      << " lemmas, " << secs << " s\n";
  return mismatches ? EXIT_INTERNAL : EXIT_VERDICT;
}

struct GenArgs
{
  std::string crafted;
  std::string index_sort = "bv2";
  std::string element_sort = "bool";
  bool quantified = false;
  std::string dir = ".";
};

int cmd_gen(const GenArgs& a, uint64_t seed, std::ostream& out)
{
  TermManager tm;
  std::vector<uint64_t> list = parse_list(a.crafted);
  if (list.size() < 3) throw UsageError("--crafted needs z followed by z + 2 chain lengths");
  CraftedParams p;
  p.z = static_cast<uint32_t>(list[0]);
  p.counts.assign(list.begin() + 1, list.end());
  if (p.counts.size() != p.z + 2) throw UsageError("--crafted needs z + 2 chain lengths");
  p.index_sort = parse_sort_tag(tm, a.index_sort);
  p.element_sort = parse_sort_tag(tm, a.element_sort);
  p.seed = seed;
  std::vector<Term> phi = gen_crafted(tm, p);

  std::filesystem::create_directories(a.dir);
  auto write = [&](bool quantified, const std::string& text) {
    std::filesystem::path path = std::filesystem::path(a.dir) / crafted_filename(p, quantified);
    std::ofstream f(path);
    if (!f) throw UsageError("cannot write '" + path.string() + "'");
    f << text;
    out << path.string() << "\n";
  };
  write(false, print_script(phi));
  if (a.quantified) write(true, emit_quantified(tm, phi));
  return EXIT_VERDICT;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
  CLI::App app{"Decision procedure for extensional arrays with constant arrays", "caext"};
  app.require_subcommand(1);
  uint64_t seed = 0;
  if (const char* env = std::getenv("CAEXT_SEED")) seed = std::strtoull(env, nullptr, 10);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "Decide the assertions of an SMT-LIB file");
  solve->add_option("file", sa.file, "Input file")->required();
  solve->add_flag("--check-model", sa.check_model, "Validate the model of every sat verdict");
  solve->add_flag("--check-invariants", sa.check_invariants, "Check engine invariants on the fly");
  solve->add_flag("--stats", sa.stats, "Print statistics to the error stream");
  solve->add_option("--seed", seed, "Random seed (overrides CAEXT_SEED)");
  solve->add_option("--budget", sa.budget, "Conflicts per ground solve, 0 for no limit");
  solve->add_option("--replay-reasons", sa.replay, "Rebuild reasons by replay")
      ->check(CLI::IsMember({"on", "off"}));

  std::string vfile, vmodel;
  CLI::App* validate = app.add_subcommand("validate", "Check a model against an SMT-LIB file");
  validate->add_option("file", vfile, "Input file")->required();
  validate->add_option("model", vmodel, "Model file of define-fun lines")->required();

  FuzzArgs fa;
  CLI::App* fuzz = app.add_subcommand("fuzz", "Compare the solver with the oracle on random instances");
  fuzz->add_option("--count", fa.count, "Number of instances");
  fuzz->add_option("--seed", seed, "First seed (overrides CAEXT_SEED)");
  fuzz->add_option("--bounds", fa.bounds, "index,element,constants,arrays oracle bounds");
  fuzz->add_option("--replay-reasons", fa.replay, "Rebuild reasons by replay")
      ->check(CLI::IsMember({"on", "off"}));

  GenArgs ga;
  CLI::App* gen = app.add_subcommand("gen", "Write crafted benchmarks");
  gen->add_option("--crafted", ga.crafted, "z,n,s1,...,sz,m")->required();
  gen->add_option("--index-sort", ga.index_sort, "bool or bv<w>");
  gen->add_option("--element-sort", ga.element_sort, "bool or bv<w>");
  gen->add_option("--seed", seed, "Seed recorded in the file name (overrides CAEXT_SEED)");
  gen->add_flag("--quantified", ga.quantified, "Also write the quantified form");
  gen->add_option("--out", ga.dir, "Output directory");

  try
  {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  }
  catch (const CLI::ParseError& e)
  {
    int code = app.exit(e, out, err);
    return code == 0 ? EXIT_VERDICT : EXIT_USAGE;
  }

  try
  {
    if (solve->parsed()) return cmd_solve(sa, seed, out, err);
    if (validate->parsed()) return cmd_validate(vfile, vmodel, out);
    if (fuzz->parsed()) return cmd_fuzz(fa, seed, out, err);
    if (gen->parsed()) return cmd_gen(ga, seed, out);
  }
  catch (const ParseError& e)
  {
    err << "parse error: " << e.what() << "\n";
    return EXIT_USAGE;
  }
  catch (const UsageError& e)
  {
    err << "error: " << e.what() << "\n";
    return EXIT_USAGE;
  }
  catch (const ResourceLimit& e)
  {
    err << "resource limit: " << e.what() << "\n";
    return EXIT_RESOURCE;
  }
  catch (const BoundsExceeded& e)
  {
    err << "resource limit: " << e.what() << "\n";
    return EXIT_RESOURCE;
  }
  catch (const Unsupported& e)
  {
    err << "unsupported: " << e.what() << "\n";
    return EXIT_USAGE;
  }
  catch (const SortMismatch& e)
  {
    err << "sort error: " << e.what() << "\n";
    return EXIT_USAGE;
  }
  catch (const std::exception& e)
  {
    err << "internal error: " << e.what() << "\n";
    return EXIT_INTERNAL;
  }
  return EXIT_USAGE;
}

}  // namespace caext
