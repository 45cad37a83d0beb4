#include "caext/oracle.h"

#include <bit>
#include <unordered_map>

#include "caext/error.h"

namespace caext {

namespace {

/// Straight-line evaluator over packed values: scalars are their bit
/// patterns, arrays are their cells concatenated (cell k at bits k*width).
class Program
{
 public:
  Program(std::span<const Term> roots, const OracleBounds& bounds)
  {
    d_constants = free_constants(roots);
    if (d_constants.size() > bounds.max_free_constants)
      throw BoundsExceeded(std::to_string(d_constants.size()) + " free constants");
    size_t num_arrays = 0;
    for (const Term& c : d_constants) num_arrays += c.sort().is_array();
    if (num_arrays > bounds.max_array_constants)
      throw BoundsExceeded(std::to_string(num_arrays) + " array constants");

    std::vector<Term> all = subterms_postorder(roots);
    for (const Term& t : all) check_sort(t.sort(), bounds);

    uint32_t offset = 0;
    for (size_t k = d_constants.size(); k-- > 0;)
    {
      uint32_t bits = packed_bits(d_constants[k].sort());
      d_fields.emplace(d_constants[k], std::make_pair(offset, bits));
      offset += bits;
      if (offset > 62) throw BoundsExceeded("interpretation space exceeds 2^62");
    }
    d_total_bits = offset;
    if ((uint64_t{1} << d_total_bits) > bounds.ceiling)
      throw BoundsExceeded(std::to_string(uint64_t{1} << d_total_bits)
                           + " interpretations exceed the ceiling");

    std::unordered_map<Term, uint32_t> reg;
    for (const Term& t : all)
    {
      Instr in;
      in.kind = t.kind();
      for (const Term& c : t.children()) in.args.push_back(reg.at(c));
      switch (t.kind())
      {
        case Kind::CONSTANT:
        {
          auto [off, bits] = d_fields.at(t);
          in.shift = off;
          in.mask = bits == 64 ? ~uint64_t{0} : (uint64_t{1} << bits) - 1;
          break;
        }
        case Kind::VALUE: in.imm = t.value(); break;
        case Kind::SELECT:
        case Kind::STORE:
          in.shift = value_bits(t.sort().is_array() ? t.sort().array_element() : t.sort());
          in.mask = (uint64_t{1} << in.shift) - 1;
          break;
        case Kind::CONST_ARRAY:
        {
          uint32_t w = value_bits(t.sort().array_element());
          uint64_t cells = domain_size(t.sort().array_index());
          for (uint64_t k = 0; k < cells; ++k) in.imm |= uint64_t{1} << (k * w);
          break;
        }
        case Kind::DISTINCT_N: in.imm = t.distinct_n(); break;
        default: break;
      }
      reg.emplace(t, static_cast<uint32_t>(d_code.size()));
      d_code.push_back(std::move(in));
    }
    d_regs.resize(d_code.size());
    for (const Term& r : roots) d_roots.push_back(reg.at(r));
  }

  uint64_t space() const { return uint64_t{1} << d_total_bits; }

  /// Value of root `k` under the interpretation numbered `n`.
  bool eval_root(size_t k, uint64_t n)
  {
    uint32_t target = d_roots[k];
    if (n != d_current)
    {
      d_current = n;
      d_done = 0;
    }
    // Registers below the target in postorder cover all its subterms.
    for (; d_done <= target; ++d_done) d_regs[d_done] = step(d_code[d_done], n);
    return d_regs[target] != 0;
  }

  Model model_of(uint64_t n) const
  {
    Model m;
    for (const Term& c : d_constants)
    {
      auto [off, bits] = d_fields.at(c);
      uint64_t packed = (n >> off) & ((uint64_t{1} << bits) - 1);
      Sort s = c.sort();
      if (!s.is_array())
      {
        m.set(c, Value::of_scalar(packed));
        continue;
      }
      uint32_t w = value_bits(s.array_element());
      uint64_t cells = domain_size(s.array_index());
      ArrayValue a;
      for (uint64_t k = 0; k < cells; ++k) a.overrides[k] = (packed >> (k * w)) & ((uint64_t{1} << w) - 1);
      a.default_value = a.overrides.begin()->second;
      m.set(c, Value::of_array(a));
    }
    return m;
  }

 private:
  struct Instr
  {
    Kind kind;
    std::vector<uint32_t> args;
    uint64_t imm = 0;
    uint64_t mask = 0;
    uint32_t shift = 0;
  };

  static void check_sort(Sort s, const OracleBounds& bounds)
  {
    if (s.is_array())
    {
      if (domain_size(s.array_index()) > bounds.max_index_domain)
        throw BoundsExceeded("index domain of " + s.to_string());
      if (domain_size(s.array_element()) > bounds.max_element_domain)
        throw BoundsExceeded("element domain of " + s.to_string());
      if (packed_bits(s) > 62) throw BoundsExceeded("array sort too wide: " + s.to_string());
    }
    else if (domain_size(s) > std::max(bounds.max_index_domain, bounds.max_element_domain))
    {
      throw BoundsExceeded("scalar domain of " + s.to_string());
    }
  }

  static uint32_t packed_bits(Sort s)
  {
    if (!s.is_array()) return value_bits(s);
    uint64_t cells = domain_size(s.array_index());
    uint64_t bits = cells * value_bits(s.array_element());
    return bits > 64 ? 64 : static_cast<uint32_t>(bits);
  }

  uint64_t step(const Instr& in, uint64_t n) const
  {
    auto arg = [&](size_t k) { return d_regs[in.args[k]]; };
    switch (in.kind)
    {
      case Kind::CONSTANT: return (n >> in.shift) & in.mask;
      case Kind::VALUE: return in.imm;
      case Kind::SELECT: return (arg(0) >> (arg(1) * in.shift)) & in.mask;
      case Kind::STORE:
      {
        uint32_t at = static_cast<uint32_t>(arg(1) * in.shift);
        return (arg(0) & ~(in.mask << at)) | (arg(2) << at);
      }
      case Kind::CONST_ARRAY: return arg(0) * in.imm;
      case Kind::EQUAL: return arg(0) == arg(1);
      case Kind::NOT: return !arg(0);
      case Kind::AND:
        for (size_t k = 0; k < in.args.size(); ++k)
          if (!arg(k)) return 0;
        return 1;
      case Kind::OR:
        for (size_t k = 0; k < in.args.size(); ++k)
          if (arg(k)) return 1;
        return 0;
      case Kind::IMPLIES: return !arg(0) || arg(1);
      case Kind::ITE: return arg(0) ? arg(1) : arg(2);
      case Kind::DISTINCT_N:
      {
        // Domains are at most 64 values wide here.
        uint64_t seen = 0;
        for (size_t k = 0; k < in.args.size(); ++k) seen |= uint64_t{1} << (arg(k) & 63);
        return static_cast<uint64_t>(std::popcount(seen)) >= in.imm;
      }
    }
    return 0;
  }

  std::vector<Term> d_constants;
  std::unordered_map<Term, std::pair<uint32_t, uint32_t>> d_fields;
  uint32_t d_total_bits = 0;
  std::vector<Instr> d_code;
  std::vector<uint64_t> d_regs;
  std::vector<uint32_t> d_roots;
  uint64_t d_current = ~uint64_t{0};
  uint32_t d_done = 0;
};

}  // namespace

uint64_t oracle_space(std::span<const Term> formulas, const OracleBounds& bounds)
{
  return Program(formulas, bounds).space();
}

bool within_oracle_bounds(std::span<const Term> formulas, const OracleBounds& bounds)
{
  try
  {
    oracle_space(formulas, bounds);
    return true;
  }
  catch (const BoundsExceeded&)
  {
    return false;
  }
}

OracleResult oracle_solve(std::span<const Term> assertions, const OracleBounds& bounds)
{
  for (const Term& a : assertions)
    if (!a.sort().is_bool()) throw SortMismatch("assertion must be Bool", 0);
  Program prog(assertions, bounds);
  OracleResult result;
  for (uint64_t n = 0; n < prog.space(); ++n)
  {
    ++result.enumerated;
    bool all = true;
    for (size_t k = 0; k < assertions.size() && all; ++k) all = prog.eval_root(k, n);
    if (all)
    {
      result.sat = true;
      result.witness = prog.model_of(n);
      return result;
    }
  }
  return result;
}

OracleValidity oracle_valid(Term formula, const OracleBounds& bounds)
{
  if (!formula.sort().is_bool()) throw SortMismatch("formula must be Bool", 0);
  Term roots[] = {formula};
  Program prog(roots, bounds);
  for (uint64_t n = 0; n < prog.space(); ++n)
  {
    if (!prog.eval_root(0, n)) return OracleValidity{false, prog.model_of(n)};
  }
  return OracleValidity{};
}

}  // namespace caext
