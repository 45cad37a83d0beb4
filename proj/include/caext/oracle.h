#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "caext/model.h"
#include "caext/term.h"

namespace caext {

struct OracleBounds
{
  uint64_t max_index_domain = 4;
  uint64_t max_element_domain = 4;
  size_t max_free_constants = 6;
  size_t max_array_constants = 3;
  /// Upper limit on the number of enumerated interpretations.
  uint64_t ceiling = 10'000'000;
};

/// Number of interpretations of the free constants of `formulas`. Throws
/// BoundsExceeded if the instance is outside `bounds`.
uint64_t oracle_space(std::span<const Term> formulas, const OracleBounds& bounds);

bool within_oracle_bounds(std::span<const Term> formulas, const OracleBounds& bounds);

struct OracleResult
{
  bool sat = false;
  /// First satisfying interpretation in enumeration order.
  std::optional<Model> witness;
  uint64_t enumerated = 0;
};

/// Exhaustive search over all interpretations, in lexicographic order of the
/// free constants (creation order, later constants vary fastest; an array
/// counts up as a base-|element| number over its cells).
OracleResult oracle_solve(std::span<const Term> assertions, const OracleBounds& bounds = {});

struct OracleValidity
{
  bool valid = true;
  std::optional<Model> counterexample;
};

OracleValidity oracle_valid(Term formula, const OracleBounds& bounds = {});

}  // namespace caext
