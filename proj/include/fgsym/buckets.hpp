#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fgsym/factor_graph.hpp"

namespace fgsym {

/// Argument positions of one factor that share a range, ascending.
struct ArgumentGroup {
  std::vector<std::size_t> positions;
  RangePtr range;

  std::size_t size() const noexcept { return positions.size(); }
};

/// Groups positions by equal range; groups are ordered by first position.
std::vector<ArgumentGroup> partition_args_by_range(const Factor& factor);

/// Occurrence counts per range value, aligned to the range's value order.
struct Bucket {
  std::vector<std::uint32_t> counts;

  std::string to_string() const;  // "[2,1]"

  friend bool operator==(const Bucket&, const Bucket&) = default;
  friend auto operator<=>(const Bucket&, const Bucket&) = default;
};

/// One bucket per argument group, in the group order of a BucketIndex.
using BucketKey = std::vector<Bucket>;

Bucket bucket_of(const ArgumentGroup& group, std::span<const std::size_t> assignment);

/// All count vectors summing to `positions` over `values` values, in
/// lexicographically descending order: [3,0], [2,1], [1,2], [0,3].
std::vector<Bucket> enumerate_buckets(std::size_t positions, std::size_t values);
std::vector<Bucket> enumerate_buckets(const ArgumentGroup& group);

/// Potentials of the rows falling into `bucket`, in table order. Throws
/// kUnknownBucket if `bucket` cannot be entailed by `group`.
std::vector<Potential> ordered_potentials(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket);

/// The same potentials as a sorted multiset.
std::vector<Potential> multiset_potentials(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket);

/// Degrees of freedom saturate at the maximum instead of overflowing.
using Dof = std::uint64_t;
inline constexpr Dof kDofSaturated = std::numeric_limits<Dof>::max();

/// Product over distinct values of (multiplicity)!; input in any order.
Dof degree_of_freedom(std::span<const Potential> potentials);

Dof dof_bucket(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket);

/// Minimum bucket dof over every group's buckets holding more than one
/// potential; 1 when no such bucket exists.
Dof dof_factor(const Factor& factor);

/// Precomputed composite bucket of every row of one factor.
///
/// Composite buckets are numbered in lexicographic order of their per-group
/// bucket indices, first group most significant. Rows of each composite
/// bucket are kept in canonical table order.
class BucketIndex {
 public:
  explicit BucketIndex(const Factor& factor);

  /// Uses the given group order, which must partition the factor's
  /// positions into same-range groups (throws kRangeMismatch otherwise).
  BucketIndex(const Factor& factor, std::vector<ArgumentGroup> groups);

  const Factor& factor() const noexcept { return *factor_; }
  std::span<const ArgumentGroup> groups() const noexcept { return groups_; }

  std::size_t bucket_count() const noexcept { return offsets_.size() - 1; }
  BucketKey key(std::size_t composite) const;
  /// Throws kUnknownBucket.
  std::size_t composite_of(const BucketKey& key) const;

  std::span<const std::uint32_t> rows(std::size_t composite) const {
    return {rows_.data() + offsets_[composite], offsets_[composite + 1] - offsets_[composite]};
  }
  std::uint32_t bucket_of_row(std::size_t row) const { return row_bucket_[row]; }

  std::vector<Potential> ordered(std::size_t composite) const;
  std::vector<Potential> multiset(std::size_t composite) const;

 private:
  const Factor* factor_;
  std::vector<ArgumentGroup> groups_;
  std::vector<std::vector<Bucket>> per_group_;
  std::vector<std::size_t> group_weight_;
  std::vector<std::uint32_t> row_bucket_;
  std::vector<std::size_t> offsets_;
  std::vector<std::uint32_t> rows_;
};

}  // namespace fgsym
