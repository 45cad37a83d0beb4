#include "caext/model.h"

#include <algorithm>
#include <numeric>
#include <set>
#include <unordered_map>

#include "caext/error.h"

namespace caext {

uint64_t ArrayValue::at(uint64_t index) const
{
  auto it = overrides.find(index);
  return it == overrides.end() ? default_value : it->second;
}

ArrayValue canonical(ArrayValue value, Sort index_sort)
{
  uint64_t size = domain_size(index_sort);
  if (!value.overrides.empty() && size <= (uint64_t{1} << 16))
  {
    std::vector<uint64_t> cells(size);
    std::map<uint64_t, uint64_t> counts;
    for (uint64_t i = 0; i < size; ++i) ++counts[cells[i] = value.at(i)];
    uint64_t best = counts.begin()->first;
    for (const auto& [e, n] : counts)
      if (n > counts.at(best)) best = e;
    value.default_value = best;
    value.overrides.clear();
    for (uint64_t i = 0; i < size; ++i)
      if (cells[i] != best) value.overrides.emplace(i, cells[i]);
    return value;
  }
  std::erase_if(value.overrides, [&](const auto& kv) { return kv.second == value.default_value; });
  return value;
}

Value zero_value(Sort sort)
{
  if (sort.is_array()) return Value::of_array(ArrayValue{});
  return Value::of_scalar(0);
}

void Model::set(Term constant, Value value)
{
  if (!constant.is_constant()) throw Error("model assigns a non-constant: " + constant.to_string());
  if (constant.sort().is_array() != value.is_array())
    throw SortMismatch("model value sort differs for " + constant.symbol(), 0);
  if (value.is_array()) value.array = canonical(*value.array, constant.sort().array_index());
  d_values[constant] = std::move(value);
}

const Value& Model::get(Term constant) const
{
  auto it = d_values.find(constant);
  if (it == d_values.end()) throw UnassignedConstant("no model value for " + constant.to_string());
  return it->second;
}

Value eval_term(const Model& model, Term t)
{
  Term roots[] = {t};
  std::unordered_map<Term, Value> memo;
  for (const Term& n : subterms_postorder(roots))
  {
    auto val = [&](size_t i) -> const Value& { return memo.at(n[i]); };
    auto truth = [&](size_t i) { return val(i).scalar != 0; };
    Value r;
    switch (n.kind())
    {
      case Kind::CONSTANT: r = model.get(n); break;
      case Kind::VALUE: r = Value::of_scalar(n.value()); break;
      case Kind::SELECT: r = Value::of_scalar(val(0).array->at(val(1).scalar)); break;
      case Kind::STORE:
      {
        ArrayValue a = *val(0).array;
        a.overrides[val(1).scalar] = val(2).scalar;
        r = Value::of_array(canonical(std::move(a), n.sort().array_index()));
        break;
      }
      case Kind::CONST_ARRAY: r = Value::of_array(ArrayValue{val(0).scalar, {}}); break;
      case Kind::EQUAL: r = Value::of_scalar(val(0) == val(1)); break;
      case Kind::NOT: r = Value::of_scalar(!truth(0)); break;
      case Kind::AND:
      {
        bool b = true;
        for (size_t i = 0; i < n.num_children(); ++i) b = b && truth(i);
        r = Value::of_scalar(b);
        break;
      }
      case Kind::OR:
      {
        bool b = false;
        for (size_t i = 0; i < n.num_children(); ++i) b = b || truth(i);
        r = Value::of_scalar(b);
        break;
      }
      case Kind::IMPLIES: r = Value::of_scalar(!truth(0) || truth(1)); break;
      case Kind::ITE: r = truth(0) ? val(1) : val(2); break;
      case Kind::DISTINCT_N:
      {
        std::set<uint64_t> seen;
        for (size_t i = 0; i < n.num_children(); ++i) seen.insert(val(i).scalar);
        r = Value::of_scalar(seen.size() >= n.distinct_n());
        break;
      }
    }
    memo.emplace(n, std::move(r));
  }
  return memo.at(t);
}

bool eval_formula(const Model& model, Term formula)
{
  if (!formula.sort().is_bool()) throw SortMismatch("formula expected: " + formula.to_string(), 0);
  return eval_term(model, formula).scalar != 0;
}

Validation validate_model(const Model& model, std::span<const Term> assertions)
{
  for (const Term& a : assertions)
  {
    bool ok = false;
    try
    {
      ok = eval_formula(model, a);
    }
    catch (const UnassignedConstant&)
    {
      ok = false;
    }
    if (!ok) return Validation{false, a};
  }
  return Validation{};
}

/* -------------------------------------------------------------------------- */

namespace {

struct UnionFind
{
  std::vector<size_t> parent;
  explicit UnionFind(size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  size_t find(size_t x)
  {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(size_t a, size_t b) { parent[find(a)] = find(b); }
};

class Builder
{
 public:
  Builder(const ArrayEngine& engine, ModelConstruction mode)
      : d_engine(engine), d_interp(engine.interpretation()), d_mode(mode)
  {
  }

  Model build()
  {
    for (const Term& a : d_engine.arrays()) d_by_sort[a.sort()].push_back(a);
    for (auto& [sort, arrays] : d_by_sort) build_sort(sort, arrays);

    Model model;
    for (const Term& c : free_constants(d_engine.formulas()))
    {
      if (c.sort().is_array())
        model.set(c, Value::of_array(d_tables.at(c)));
      else
        model.set(c, Value::of_scalar(d_interp.value(c)));
    }
    for (const Term& a : d_engine.arrays())
    {
      if (a.is_constant()) continue;
      Value v = eval_term(model, a);
      if (*v.array != d_tables.at(a))
      {
        auto show = [](const ArrayValue& x) {
          std::string r = "{default " + std::to_string(x.default_value);
          for (const auto& [i, e] : x.overrides) r += ", " + std::to_string(i) + "->" + std::to_string(e);
          return r + "}";
        };
        throw IllDefined("built table of " + a.to_string() + " " + show(d_tables.at(a))
                         + " differs from its evaluation " + show(*v.array));
      }
    }
    return model;
  }

 private:
  void build_sort(Sort sort, const std::vector<Term>& arrays)
  {
    Sort index_sort = sort.array_index();
    std::set<uint64_t> specific;
    for (const Term& a : arrays)
    {
      if (a.kind() == Kind::STORE) specific.insert(d_interp.value(a[1]));
      for (const Term& t : d_engine.propagated_to(a))
        if (t.kind() == Kind::SELECT) specific.insert(d_interp.value(t[1]));
    }
    bool has_generic = specific.size() < domain_size(index_sort);

    std::unordered_map<Term, ArrayValue> tables;
    for (const Term& a : arrays) tables[a];
    for (uint64_t iota : specific)
    {
      std::vector<uint64_t> cells = cells_at(arrays, iota, false);
      for (size_t k = 0; k < arrays.size(); ++k) tables[arrays[k]].overrides[iota] = cells[k];
    }
    if (has_generic)
    {
      std::vector<uint64_t> cells = cells_at(arrays, 0, true);
      for (size_t k = 0; k < arrays.size(); ++k) tables[arrays[k]].default_value = cells[k];
    }
    else if (!specific.empty())
    {
      for (auto& [a, table] : tables) table.default_value = table.overrides.begin()->second;
    }
    for (auto& [a, table] : tables) d_tables.emplace(a, canonical(std::move(table), index_sort));
  }

  std::vector<uint64_t> cells_at(const std::vector<Term>& arrays, uint64_t iota, bool generic)
  {
    std::vector<std::optional<uint64_t>> cells(arrays.size());
    auto assign = [&](size_t k, uint64_t v, const char* what) {
      if (cells[k] && *cells[k] != v)
        throw IllDefined(std::string(what) + " disagree at " + arrays[k].to_string() + "["
                         + std::to_string(iota) + "]");
      cells[k] = v;
    };

    // Propagated reads.
    if (!generic)
    {
      for (size_t k = 0; k < arrays.size(); ++k)
      {
        for (const Term& t : d_engine.propagated_to(arrays[k]))
          if (t.kind() == Kind::SELECT && d_interp.value(t[1]) == iota)
            assign(k, d_interp.value(t), "reads");
      }
    }

    std::vector<std::optional<uint64_t>> defaults(arrays.size());
    if (d_mode == ModelConstruction::PER_INDEX)
    {
      std::unordered_map<Term, size_t> pos;
      for (size_t k = 0; k < arrays.size(); ++k) pos.emplace(arrays[k], k);
      UnionFind uf(arrays.size());
      for (const Term& e : d_engine.array_equalities())
        if (pos.count(e[0]) && eval_atom(d_interp, e)) uf.unite(pos.at(e[0]), pos.at(e[1]));
      for (size_t k = 0; k < arrays.size(); ++k)
      {
        const Term& s = arrays[k];
        if (s.kind() == Kind::STORE && (generic || d_interp.value(s[1]) != iota))
          uf.unite(k, pos.at(s[0]));
      }
      std::unordered_map<size_t, uint64_t> root_default;
      for (size_t k = 0; k < arrays.size(); ++k)
      {
        if (arrays[k].kind() != Kind::CONST_ARRAY) continue;
        uint64_t v = d_interp.value(arrays[k][0]);
        auto [it, fresh] = root_default.emplace(uf.find(k), v);
        if (!fresh && it->second != v)
          throw IllDefined("constant arrays " + std::to_string(it->second) + " and "
                           + std::to_string(v) + " meet at index " + std::to_string(iota));
      }
      for (size_t k = 0; k < arrays.size(); ++k)
      {
        auto it = root_default.find(uf.find(k));
        if (it != root_default.end()) defaults[k] = it->second;
      }
    }
    else
    {
      for (size_t k = 0; k < arrays.size(); ++k)
      {
        for (const Term& c : d_engine.propagated_to(arrays[k]))
        {
          if (c.kind() != Kind::CONST_ARRAY) continue;
          bool fresh = true;
          if (!generic)
          {
            for (const Term& j : d_engine.compute_updated_indices(arrays[k], c))
              if (d_interp.value(j) == iota) fresh = false;
          }
          if (!fresh) continue;
          uint64_t v = d_interp.value(c[0]);
          if (defaults[k] && *defaults[k] != v)
            throw IllDefined("default values disagree at " + arrays[k].to_string());
          defaults[k] = v;
        }
      }
    }

    std::vector<uint64_t> result(arrays.size(), 0);
    for (size_t k = 0; k < arrays.size(); ++k)
    {
      if (defaults[k]) assign(k, *defaults[k], "read and default value");
      if (cells[k]) result[k] = *cells[k];
    }
    return result;
  }

  const ArrayEngine& d_engine;
  const Interpretation& d_interp;
  ModelConstruction d_mode;
  std::unordered_map<Sort, std::vector<Term>> d_by_sort;
  std::unordered_map<Term, ArrayValue> d_tables;
};

}  // namespace

Model build_model(const ArrayEngine& engine, ModelConstruction mode)
{
  if (engine.state() != EngineState::SATURATED || !engine.has_interpretation())
    throw InvariantViolation("model requested from a configuration that is not saturated");
  return Builder(engine, mode).build();
}

}  // namespace caext
