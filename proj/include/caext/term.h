#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace caext {

namespace detail {
struct SortNode;
struct TermNode;
}  // namespace detail

enum class SortKind
{
  BOOL,
  BV,
  ARRAY,
};

/// Handle to an interned sort. Structurally equal sorts share one node, so
/// handle equality is sort equality.
class Sort
{
 public:
  Sort() = default;

  bool is_null() const { return d_node == nullptr; }
  SortKind kind() const;
  bool is_bool() const { return kind() == SortKind::BOOL; }
  bool is_bv() const { return kind() == SortKind::BV; }
  bool is_array() const { return kind() == SortKind::ARRAY; }

  /// Width of a bit-vector sort.
  uint32_t bv_width() const;
  /// Index sort of an array sort.
  Sort array_index() const;
  /// Element sort of an array sort.
  Sort array_element() const;

  uint64_t id() const;
  std::string to_string() const;

  friend bool operator==(const Sort& a, const Sort& b) = default;

 private:
  friend class TermManager;
  explicit Sort(const detail::SortNode* node) : d_node(node) {}
  const detail::SortNode* d_node = nullptr;
};

std::ostream& operator<<(std::ostream& out, const Sort& sort);

/// Number of elements in the domain of a Bool or bit-vector sort. Saturates
/// at UINT64_MAX for 64-bit vectors. Throws Unsupported for array sorts.
uint64_t domain_size(const Sort& sort);

/// Number of bits needed to represent one value of a Bool or BV sort.
uint32_t value_bits(const Sort& sort);

enum class Kind
{
  CONSTANT,
  VALUE,
  SELECT,
  STORE,
  CONST_ARRAY,
  EQUAL,
  NOT,
  AND,
  OR,
  IMPLIES,
  ITE,
  DISTINCT_N,
};

const char* kind_name(Kind kind);

/// Handle to an interned, immutable term node.
class Term
{
 public:
  Term() = default;

  bool is_null() const { return d_node == nullptr; }
  Kind kind() const;
  Sort sort() const;
  size_t num_children() const;
  Term operator[](size_t i) const;
  std::span<const Term> children() const;

  /// Symbol of an uninterpreted constant.
  const std::string& symbol() const;
  /// Bit pattern of a value (0/1 for Bool).
  uint64_t value() const;
  /// Lower bound `n` of a DISTINCT_N node.
  uint64_t distinct_n() const;

  /// Creation index; unique per manager and stable across runs.
  uint64_t id() const;

  bool is_constant() const { return kind() == Kind::CONSTANT; }
  bool is_value() const { return kind() == Kind::VALUE; }
  /// Constants and values: the leaves of flat literals.
  bool is_leaf() const { return is_constant() || is_value(); }
  bool is_true() const;
  bool is_false() const;

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b) = default;

 private:
  friend class TermManager;
  explicit Term(const detail::TermNode* node) : d_node(node) {}
  const detail::TermNode* d_node = nullptr;
};

std::ostream& operator<<(std::ostream& out, const Term& term);

/// Orders terms by creation index.
struct TermIdLess
{
  bool operator()(const Term& a, const Term& b) const { return a.id() < b.id(); }
};

}  // namespace caext

template <>
struct std::hash<caext::Term>
{
  size_t operator()(const caext::Term& t) const noexcept
  {
    return t.is_null() ? 0 : std::hash<uint64_t>{}(t.id());
  }
};

template <>
struct std::hash<caext::Sort>
{
  size_t operator()(const caext::Sort& s) const noexcept
  {
    return s.is_null() ? 0 : std::hash<uint64_t>{}(s.id());
  }
};

namespace caext {

/// Owns all sorts and terms. Construction is single-threaded; the resulting
/// nodes are immutable.
class TermManager
{
 public:
  TermManager();
  ~TermManager();
  TermManager(const TermManager&) = delete;
  TermManager& operator=(const TermManager&) = delete;

  Sort mk_bool_sort();
  Sort mk_bv_sort(uint32_t width);
  Sort mk_array_sort(Sort index, Sort element);

  /// Uninterpreted constant. Repeated calls with the same symbol and sort
  /// return the same node; reusing a symbol at another sort is an error.
  Term mk_const(Sort sort, const std::string& symbol);
  /// Constant with a fresh symbol `<prefix><counter>`, skipping taken names.
  Term mk_fresh_const(Sort sort, const std::string& prefix);
  std::optional<Term> lookup_const(const std::string& symbol) const;

  Term mk_value(Sort sort, uint64_t bits);
  Term mk_true();
  Term mk_false();
  Term mk_bool(bool value) { return value ? mk_true() : mk_false(); }

  /// Generic interning constructor for SELECT, STORE, EQUAL, NOT, AND, OR,
  /// IMPLIES and ITE. Throws SortMismatch on ill-sorted children.
  Term mk_term(Kind kind, std::span<const Term> children);
  Term mk_term(Kind kind, std::initializer_list<Term> children)
  {
    return mk_term(kind, std::span<const Term>(children.begin(), children.size()));
  }

  Term mk_const_array(Sort array_sort, Term element);
  Term mk_distinct_n(uint64_t n, std::span<const Term> terms);

  Term mk_select(Term array, Term index) { return mk_term(Kind::SELECT, {array, index}); }
  Term mk_store(Term array, Term index, Term element)
  {
    return mk_term(Kind::STORE, {array, index, element});
  }
  Term mk_eq(Term a, Term b) { return mk_term(Kind::EQUAL, {a, b}); }
  Term mk_not(Term a) { return mk_term(Kind::NOT, {a}); }
  Term mk_implies(Term a, Term b) { return mk_term(Kind::IMPLIES, {a, b}); }
  Term mk_ite(Term c, Term t, Term e) { return mk_term(Kind::ITE, {c, t, e}); }
  /// n-ary conjunction; 0 args yield true and 1 arg yields the arg itself.
  Term mk_and(std::span<const Term> args);
  Term mk_and(std::initializer_list<Term> args)
  {
    return mk_and(std::span<const Term>(args.begin(), args.size()));
  }
  /// n-ary disjunction; 0 args yield false and 1 arg yields the arg itself.
  Term mk_or(std::span<const Term> args);
  Term mk_or(std::initializer_list<Term> args)
  {
    return mk_or(std::span<const Term>(args.begin(), args.size()));
  }

  size_t num_terms() const;

 private:
  struct Key
  {
    Kind kind;
    const detail::SortNode* sort;
    std::vector<uint64_t> children;
    uint64_t payload;
    std::string symbol;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash
  {
    size_t operator()(const Key& k) const noexcept;
  };
  struct SortKey
  {
    SortKind kind;
    uint32_t width;
    const detail::SortNode* index;
    const detail::SortNode* element;
    bool operator==(const SortKey&) const = default;
  };
  struct SortKeyHash
  {
    size_t operator()(const SortKey& k) const noexcept;
  };

  Sort intern_sort(const SortKey& key);
  Term intern(Kind kind,
              Sort sort,
              std::vector<Term> children,
              uint64_t payload,
              std::string symbol);

  std::deque<detail::SortNode> d_sorts;
  std::unordered_map<SortKey, const detail::SortNode*, SortKeyHash> d_sort_table;
  std::deque<detail::TermNode> d_terms;
  std::unordered_map<Key, const detail::TermNode*, KeyHash> d_term_table;
  std::unordered_map<std::string, Term> d_symbols;
  uint64_t d_fresh_counter = 0;
};

/// Collects all distinct subterms of `roots` (including the roots) in
/// post-order: children before parents, each term once.
std::vector<Term> subterms_postorder(std::span<const Term> roots);

/// Node of the same kind (and payload) as `t` over new children.
Term rebuild(TermManager& tm, Term t, std::span<const Term> children);

/// Uninterpreted constants occurring in `roots`, ordered by creation index.
std::vector<Term> free_constants(std::span<const Term> roots);

}  // namespace caext
