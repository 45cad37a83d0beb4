#include "caext/term.h"

#include <algorithm>
#include <cassert>
#include <ostream>
#include <sstream>
#include <unordered_set>

#include "caext/error.h"

namespace caext {

namespace detail {

struct SortNode
{
  SortKind kind;
  uint32_t width;
  const SortNode* index;
  const SortNode* element;
  uint64_t id;
};

struct TermNode
{
  Kind kind;
  Sort sort;
  std::vector<Term> children;
  uint64_t payload;
  std::string symbol;
  uint64_t id;
};

}  // namespace detail

/* -------------------------------------------------------------------------- */

SortKind Sort::kind() const
{
  assert(d_node);
  return d_node->kind;
}

uint32_t Sort::bv_width() const
{
  assert(d_node && d_node->kind == SortKind::BV);
  return d_node->width;
}

Sort Sort::array_index() const
{
  assert(d_node && d_node->kind == SortKind::ARRAY);
  return Sort(d_node->index);
}

Sort Sort::array_element() const
{
  assert(d_node && d_node->kind == SortKind::ARRAY);
  return Sort(d_node->element);
}

uint64_t Sort::id() const { return d_node->id; }

std::string Sort::to_string() const
{
  if (is_null()) return "<null>";
  switch (kind())
  {
    case SortKind::BOOL: return "Bool";
    case SortKind::BV: return "(_ BitVec " + std::to_string(bv_width()) + ")";
    case SortKind::ARRAY:
      return "(Array " + array_index().to_string() + " "
             + array_element().to_string() + ")";
  }
  return "";
}

std::ostream& operator<<(std::ostream& out, const Sort& sort)
{
  return out << sort.to_string();
}

uint64_t domain_size(const Sort& sort)
{
  switch (sort.kind())
  {
    case SortKind::BOOL: return 2;
    case SortKind::BV:
      if (sort.bv_width() >= 64) return UINT64_MAX;
      return uint64_t{1} << sort.bv_width();
    case SortKind::ARRAY:
      throw Unsupported("domain size of array sort " + sort.to_string());
  }
  return 0;
}

uint32_t value_bits(const Sort& sort)
{
  switch (sort.kind())
  {
    case SortKind::BOOL: return 1;
    case SortKind::BV: return sort.bv_width();
    case SortKind::ARRAY:
      throw Unsupported("value bits of array sort " + sort.to_string());
  }
  return 0;
}

const char* kind_name(Kind kind)
{
  switch (kind)
  {
    case Kind::CONSTANT: return "constant";
    case Kind::VALUE: return "value";
    case Kind::SELECT: return "select";
    case Kind::STORE: return "store";
    case Kind::CONST_ARRAY: return "const";
    case Kind::EQUAL: return "=";
    case Kind::NOT: return "not";
    case Kind::AND: return "and";
    case Kind::OR: return "or";
    case Kind::IMPLIES: return "=>";
    case Kind::ITE: return "ite";
    case Kind::DISTINCT_N: return "distinct_n";
  }
  return "?";
}

/* -------------------------------------------------------------------------- */

Kind Term::kind() const
{
  assert(d_node);
  return d_node->kind;
}

Sort Term::sort() const { return d_node->sort; }

size_t Term::num_children() const { return d_node->children.size(); }

Term Term::operator[](size_t i) const
{
  assert(i < d_node->children.size());
  return d_node->children[i];
}

std::span<const Term> Term::children() const { return d_node->children; }

const std::string& Term::symbol() const
{
  assert(d_node->kind == Kind::CONSTANT);
  return d_node->symbol;
}

uint64_t Term::value() const
{
  assert(d_node->kind == Kind::VALUE);
  return d_node->payload;
}

uint64_t Term::distinct_n() const
{
  assert(d_node->kind == Kind::DISTINCT_N);
  return d_node->payload;
}

uint64_t Term::id() const { return d_node->id; }

bool Term::is_true() const
{
  return kind() == Kind::VALUE && sort().is_bool() && value() == 1;
}

bool Term::is_false() const
{
  return kind() == Kind::VALUE && sort().is_bool() && value() == 0;
}

namespace {

std::string value_to_string(Sort sort, uint64_t bits)
{
  if (sort.is_bool()) return bits ? "true" : "false";
  std::string s = "#b";
  for (uint32_t i = sort.bv_width(); i-- > 0;) s += ((bits >> i) & 1) ? '1' : '0';
  return s;
}

void print(std::ostream& out, const Term& t)
{
  switch (t.kind())
  {
    case Kind::CONSTANT: out << t.symbol(); return;
    case Kind::VALUE: out << value_to_string(t.sort(), t.value()); return;
    case Kind::CONST_ARRAY:
      out << "((as const " << t.sort() << ") ";
      print(out, t[0]);
      out << ")";
      return;
    case Kind::DISTINCT_N: out << "((_ distinct_n " << t.distinct_n() << ")"; break;
    default: out << "(" << kind_name(t.kind()); break;
  }
  for (const Term& c : t.children())
  {
    out << " ";
    print(out, c);
  }
  out << ")";
}

}  // namespace

std::string Term::to_string() const
{
  if (is_null()) return "<null>";
  std::ostringstream ss;
  print(ss, *this);
  return ss.str();
}

std::ostream& operator<<(std::ostream& out, const Term& term)
{
  if (term.is_null()) return out << "<null>";
  print(out, term);
  return out;
}

/* -------------------------------------------------------------------------- */

size_t TermManager::KeyHash::operator()(const Key& k) const noexcept
{
  size_t h = std::hash<int>{}(static_cast<int>(k.kind));
  auto mix = [&h](uint64_t v) {
    h ^= std::hash<uint64_t>{}(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  };
  mix(reinterpret_cast<uintptr_t>(k.sort));
  for (uint64_t c : k.children) mix(c);
  mix(k.payload);
  if (!k.symbol.empty()) mix(std::hash<std::string>{}(k.symbol));
  return h;
}

size_t TermManager::SortKeyHash::operator()(const SortKey& k) const noexcept
{
  size_t h = std::hash<int>{}(static_cast<int>(k.kind));
  h = h * 31 + k.width;
  h = h * 31 + std::hash<const void*>{}(k.index);
  h = h * 31 + std::hash<const void*>{}(k.element);
  return h;
}

TermManager::TermManager() = default;
TermManager::~TermManager() = default;

size_t TermManager::num_terms() const { return d_terms.size(); }

Sort TermManager::intern_sort(const SortKey& key)
{
  auto it = d_sort_table.find(key);
  if (it != d_sort_table.end()) return Sort(it->second);
  d_sorts.push_back(
      detail::SortNode{key.kind, key.width, key.index, key.element, d_sorts.size()});
  const detail::SortNode* node = &d_sorts.back();
  d_sort_table.emplace(key, node);
  return Sort(node);
}

Sort TermManager::mk_bool_sort()
{
  return intern_sort(SortKey{SortKind::BOOL, 0, nullptr, nullptr});
}

Sort TermManager::mk_bv_sort(uint32_t width)
{
  if (width == 0 || width > 64)
  {
    throw Unsupported("bit-vector width " + std::to_string(width)
                      + " outside [1, 64]");
  }
  return intern_sort(SortKey{SortKind::BV, width, nullptr, nullptr});
}

Sort TermManager::mk_array_sort(Sort index, Sort element)
{
  if (index.is_array() || element.is_array())
  {
    throw Unsupported("nested array sorts are not supported");
  }
  return intern_sort(SortKey{SortKind::ARRAY, 0, index.d_node, element.d_node});
}

Term TermManager::intern(Kind kind,
                         Sort sort,
                         std::vector<Term> children,
                         uint64_t payload,
                         std::string symbol)
{
  Key key{kind, sort.d_node, {}, payload, symbol};
  key.children.reserve(children.size());
  for (const Term& c : children) key.children.push_back(c.id());
  auto it = d_term_table.find(key);
  if (it != d_term_table.end()) return Term(it->second);
  d_terms.push_back(detail::TermNode{
      kind, sort, std::move(children), payload, std::move(symbol), d_terms.size()});
  const detail::TermNode* node = &d_terms.back();
  d_term_table.emplace(std::move(key), node);
  return Term(node);
}

Term TermManager::mk_const(Sort sort, const std::string& symbol)
{
  auto it = d_symbols.find(symbol);
  if (it != d_symbols.end())
  {
    if (it->second.sort() != sort)
    {
      throw SortMismatch("symbol '" + symbol + "' already declared with sort "
                             + it->second.sort().to_string(),
                         0);
    }
    return it->second;
  }
  Term t = intern(Kind::CONSTANT, sort, {}, 0, symbol);
  d_symbols.emplace(symbol, t);
  return t;
}

Term TermManager::mk_fresh_const(Sort sort, const std::string& prefix)
{
  for (;;)
  {
    std::string name = prefix + std::to_string(d_fresh_counter++);
    if (!d_symbols.count(name)) return mk_const(sort, name);
  }
}

std::optional<Term> TermManager::lookup_const(const std::string& symbol) const
{
  auto it = d_symbols.find(symbol);
  if (it == d_symbols.end()) return std::nullopt;
  return it->second;
}

Term TermManager::mk_value(Sort sort, uint64_t bits)
{
  if (sort.is_array()) throw Unsupported("array values cannot be built directly");
  uint32_t w = value_bits(sort);
  if (w < 64) bits &= (uint64_t{1} << w) - 1;
  return intern(Kind::VALUE, sort, {}, bits, "");
}

Term TermManager::mk_true() { return mk_value(mk_bool_sort(), 1); }

Term TermManager::mk_false() { return mk_value(mk_bool_sort(), 0); }

namespace {

void require_arity(Kind kind, std::span<const Term> children, size_t lo, size_t hi)
{
  if (children.size() < lo || children.size() > hi)
  {
    throw SortMismatch(std::string("wrong number of arguments to ") + kind_name(kind),
                       children.size());
  }
  for (size_t i = 0; i < children.size(); ++i)
  {
    if (children[i].is_null())
    {
      throw SortMismatch(std::string("null argument to ") + kind_name(kind), i);
    }
  }
}

void require_bool(Kind kind, std::span<const Term> children)
{
  for (size_t i = 0; i < children.size(); ++i)
  {
    if (!children[i].sort().is_bool())
    {
      throw SortMismatch(std::string("argument of ") + kind_name(kind)
                             + " must be Bool, got " + children[i].sort().to_string(),
                         i);
    }
  }
}

}  // namespace

Term TermManager::mk_term(Kind kind, std::span<const Term> children)
{
  std::vector<Term> ch(children.begin(), children.end());
  switch (kind)
  {
    case Kind::SELECT:
    {
      require_arity(kind, children, 2, 2);
      Sort as = ch[0].sort();
      if (!as.is_array())
        throw SortMismatch("select on non-array " + as.to_string(), 0);
      if (ch[1].sort() != as.array_index())
        throw SortMismatch("select index sort " + ch[1].sort().to_string()
                               + " differs from " + as.array_index().to_string(),
                           1);
      return intern(kind, as.array_element(), std::move(ch), 0, "");
    }
    case Kind::STORE:
    {
      require_arity(kind, children, 3, 3);
      Sort as = ch[0].sort();
      if (!as.is_array())
        throw SortMismatch("store on non-array " + as.to_string(), 0);
      if (ch[1].sort() != as.array_index())
        throw SortMismatch("store index sort " + ch[1].sort().to_string()
                               + " differs from " + as.array_index().to_string(),
                           1);
      if (ch[2].sort() != as.array_element())
        throw SortMismatch("store element sort " + ch[2].sort().to_string()
                               + " differs from " + as.array_element().to_string(),
                           2);
      return intern(kind, as, std::move(ch), 0, "");
    }
    case Kind::EQUAL:
      require_arity(kind, children, 2, 2);
      if (ch[0].sort() != ch[1].sort())
        throw SortMismatch("equality between " + ch[0].sort().to_string() + " and "
                               + ch[1].sort().to_string(),
                           1);
      return intern(kind, mk_bool_sort(), std::move(ch), 0, "");
    case Kind::NOT:
      require_arity(kind, children, 1, 1);
      require_bool(kind, children);
      return intern(kind, mk_bool_sort(), std::move(ch), 0, "");
    case Kind::AND:
    case Kind::OR:
      require_arity(kind, children, 2, SIZE_MAX);
      require_bool(kind, children);
      return intern(kind, mk_bool_sort(), std::move(ch), 0, "");
    case Kind::IMPLIES:
      require_arity(kind, children, 2, 2);
      require_bool(kind, children);
      return intern(kind, mk_bool_sort(), std::move(ch), 0, "");
    case Kind::ITE:
      require_arity(kind, children, 3, 3);
      require_bool(kind, children.subspan(0, 1));
      if (ch[1].sort() != ch[2].sort())
        throw SortMismatch("ite branches of sort " + ch[1].sort().to_string() + " and "
                               + ch[2].sort().to_string(),
                           2);
    {
      Sort sort = ch[1].sort();
      return intern(kind, sort, std::move(ch), 0, "");
    }
    case Kind::CONST_ARRAY:
    case Kind::DISTINCT_N:
    case Kind::CONSTANT:
    case Kind::VALUE:
      break;
  }
  throw Unsupported(std::string("mk_term cannot build ") + kind_name(kind));
}

Term TermManager::mk_const_array(Sort array_sort, Term element)
{
  if (!array_sort.is_array())
    throw SortMismatch("const array of non-array sort " + array_sort.to_string(), 0);
  if (element.is_null() || element.sort() != array_sort.array_element())
    throw SortMismatch("const array default must have sort "
                           + array_sort.array_element().to_string(),
                       0);
  return intern(Kind::CONST_ARRAY, array_sort, {element}, 0, "");
}

Term TermManager::mk_distinct_n(uint64_t n, std::span<const Term> terms)
{
  if (n == 0) throw SortMismatch("distinct_n bound must be positive", 0);
  if (terms.empty()) throw SortMismatch("distinct_n needs at least one term", 0);
  for (size_t i = 0; i < terms.size(); ++i)
  {
    if (terms[i].is_null() || terms[i].sort() != terms[0].sort())
      throw SortMismatch("distinct_n arguments must share one sort", i);
    if (terms[i].sort().is_array())
      throw SortMismatch("distinct_n over array sort", i);
  }
  return intern(Kind::DISTINCT_N,
                mk_bool_sort(),
                std::vector<Term>(terms.begin(), terms.end()),
                n,
                "");
}

Term TermManager::mk_and(std::span<const Term> args)
{
  if (args.empty()) return mk_true();
  if (args.size() == 1) return args[0];
  return mk_term(Kind::AND, args);
}

Term TermManager::mk_or(std::span<const Term> args)
{
  if (args.empty()) return mk_false();
  if (args.size() == 1) return args[0];
  return mk_term(Kind::OR, args);
}

/* -------------------------------------------------------------------------- */

std::vector<Term> subterms_postorder(std::span<const Term> roots)
{
  std::vector<Term> order;
  std::unordered_set<Term> visited;
  std::vector<std::pair<Term, bool>> stack;
  for (auto it = roots.rbegin(); it != roots.rend(); ++it) stack.emplace_back(*it, false);
  while (!stack.empty())
  {
    auto [t, expanded] = stack.back();
    stack.pop_back();
    if (expanded)
    {
      order.push_back(t);
      continue;
    }
    if (!visited.insert(t).second) continue;
    stack.emplace_back(t, true);
    auto ch = t.children();
    for (auto it = ch.rbegin(); it != ch.rend(); ++it)
    {
      if (!visited.count(*it)) stack.emplace_back(*it, false);
    }
  }
  return order;
}

Term rebuild(TermManager& tm, Term t, std::span<const Term> children)
{
  switch (t.kind())
  {
    case Kind::CONSTANT:
    case Kind::VALUE: return t;
    case Kind::CONST_ARRAY: return tm.mk_const_array(t.sort(), children[0]);
    case Kind::DISTINCT_N: return tm.mk_distinct_n(t.distinct_n(), children);
    case Kind::AND: return tm.mk_and(children);
    case Kind::OR: return tm.mk_or(children);
    default: return tm.mk_term(t.kind(), children);
  }
}

std::vector<Term> free_constants(std::span<const Term> roots)
{
  std::vector<Term> result;
  for (const Term& t : subterms_postorder(roots))
  {
    if (t.is_constant()) result.push_back(t);
  }
  std::sort(result.begin(), result.end(), TermIdLess{});
  return result;
}

}  // namespace caext
