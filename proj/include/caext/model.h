#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "caext/array_engine.h"
#include "caext/term.h"

namespace caext {

/// Total function over an index domain: `default_value` everywhere except at
/// `overrides`. Canonical values have no override equal to the default and,
/// for index domains of at most 2^16 elements, the most frequent element
/// (smallest on ties) as default.
struct ArrayValue
{
  uint64_t default_value = 0;
  std::map<uint64_t, uint64_t> overrides;

  uint64_t at(uint64_t index) const;
  friend bool operator==(const ArrayValue&, const ArrayValue&) = default;
};

ArrayValue canonical(ArrayValue value, Sort index_sort);

/// Scalar bit pattern (0/1 for Bool) or array table.
struct Value
{
  uint64_t scalar = 0;
  std::optional<ArrayValue> array;

  static Value of_scalar(uint64_t bits) { return Value{bits, std::nullopt}; }
  static Value of_array(ArrayValue a) { return Value{0, std::move(a)}; }
  bool is_array() const { return array.has_value(); }
  friend bool operator==(const Value&, const Value&) = default;
};

/// Assignment of values to uninterpreted constants.
class Model
{
 public:
  void set(Term constant, Value value);
  bool has(Term constant) const { return d_values.count(constant) > 0; }
  const Value& get(Term constant) const;
  /// Constants in creation order.
  const std::map<Term, Value, TermIdLess>& values() const { return d_values; }
  size_t size() const { return d_values.size(); }

 private:
  std::map<Term, Value, TermIdLess> d_values;
};

/// Value of `t` under `model`. Throws UnassignedConstant.
Value eval_term(const Model& model, Term t);
bool eval_formula(const Model& model, Term formula);

struct Validation
{
  bool valid = true;
  /// First assertion that evaluates to false, if any.
  Term failing;
};

/// Evaluates every assertion; unassigned constants count as failures.
Validation validate_model(const Model& model, std::span<const Term> assertions);

enum class ModelConstruction
{
  /// Per index value, an array takes the read value propagated to it at that
  /// index, else the default of a constant array connected to it through
  /// equalities true in I and stores at other indices, else the zero element.
  PER_INDEX,
  /// Index ι of a takes the value of a propagated read at ι, else v when
  /// π(a,⟨v⟩) is set and ι avoids the values of I(a,⟨v⟩), else zero.
  RECORDED_DEFAULTS,
};

/// Model of a saturated engine: scalar constants of T(A) copied from I and a
/// table for every array constant of T(A). Throws IllDefined if two cases
/// assign different values to one cell, or if a built table disagrees with
/// the evaluation of an array term of T(A).
Model build_model(const ArrayEngine& engine,
                  ModelConstruction mode = ModelConstruction::PER_INDEX);

/// Zero scalar or constant-zero array.
Value zero_value(Sort sort);

}  // namespace caext
