#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "caext/oracle.h"
#include "caext/term.h"

namespace caext {

struct CraftedParams
{
  /// Number of middle array constants a1..az.
  uint32_t z = 1;
  /// Store-chain lengths (n, s1, ..., sz, m); z + 2 entries.
  std::vector<uint32_t> counts{1, 1, 1};
  Sort index_sort;
  Sort element_sort;
  uint64_t seed = 0;
};

/// Chained equalities between store chains over ⟨v⟩, a1, ..., az, ⟨w⟩. Link
/// k relates a chain over base k with a chain over base k+1, each store with
/// fresh index and element constants: left chains use i<n> and right chains
/// j<n>, elements u<n>, numbered in order of creation. A single middle array
/// is named `a`. Throws Error on malformed parameters.
std::vector<Term> gen_crafted(TermManager& tm, const CraftedParams& params);

/// Free constants of gen_crafted: v, w, the z middle arrays and two per store.
uint64_t crafted_free_constants(const CraftedParams& params);

/// `crafted_z<z>_<c1-c2-...>_<idx>_<elem>_<seed>.smt2`, with `_forall`
/// before the extension for the quantified form.
std::string crafted_filename(const CraftedParams& params, bool quantified);

/// Short sort tag used in file names: bool, bv<w>.
std::string sort_tag(Sort sort);

/// SMT-LIB text in which every constant array ⟨v⟩ of sort S is replaced by a
/// fresh array constant c with `(forall ((i σ)) (= (select c i) v))`.
std::string emit_quantified(TermManager& tm, std::span<const Term> assertions);

struct FuzzOptions
{
  OracleBounds bounds;
  /// Upper limit on the oracle search space of a generated instance.
  uint64_t max_space = uint64_t{1} << 18;
  size_t max_assertions = 4;
};

/// Random well-sorted assertions over Bool/BV1/BV2 sorts mixing select,
/// store, constant arrays, equalities, disequalities and distinct; within
/// the oracle bounds and `max_space`. Half of the seeds include an equality
/// on a constant array. Deterministic per seed. Throws BoundsExceeded when
/// the bounds leave no room for an instance.
std::vector<Term> gen_fuzz(TermManager& tm, uint64_t seed, const FuzzOptions& options = {});

}  // namespace caext
