#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgsym/potential.hpp"

namespace fgsym {

/// Candidate maps and argument groups use 64-bit position masks.
inline constexpr std::size_t kMaxArity = 64;

/// Default cap on the number of joint states enumerated by brute force.
inline constexpr std::uint64_t kDefaultStateCap = std::uint64_t{1} << 20;

/// A named, ordered set of value labels. Two ranges are equal iff their
/// value sequences are identical; the name is only a label.
struct Range {
  std::string name;
  std::vector<std::string> values;

  std::size_t size() const noexcept { return values.size(); }
  std::optional<std::size_t> index_of(std::string_view label) const;

  friend bool operator==(const Range& a, const Range& b) { return a.values == b.values; }
};

using RangePtr = std::shared_ptr<const Range>;

/// Validates (non-empty, pairwise distinct labels) and shares a range.
RangePtr make_range(std::string name, std::vector<std::string> values);

/// The `bool` range with values `true`, `false` in that order.
RangePtr boolean_range();

struct RandomVariable {
  std::string name;
  RangePtr range;
};

/// Per-argument value indices into each argument's range.
using Assignment = std::vector<std::size_t>;

/// A bijection on argument positions, 0-based. `target(i)` is the new
/// position of the argument currently at position i.
class Permutation {
 public:
  Permutation() = default;
  explicit Permutation(std::vector<std::size_t> targets);

  static Permutation identity(std::size_t n);

  std::size_t size() const noexcept { return targets_.size(); }
  std::size_t operator[](std::size_t i) const { return targets_[i]; }
  std::span<const std::size_t> targets() const noexcept { return targets_; }

  Permutation inverse() const;
  bool is_identity() const noexcept;

  friend bool operator==(const Permutation&, const Permutation&) = default;

 private:
  std::vector<std::size_t> targets_;
};

/// A factor with a dense potential table in canonical row order: the first
/// argument is most significant, the last one varies fastest.
class Factor {
 public:
  /// Throws kUnknownRv for an argument without a range, kLengthMismatch
  /// when the table size is not the product of the range sizes and
  /// kArityTooLarge beyond kMaxArity arguments.
  Factor(std::string name, std::vector<RandomVariable> args, std::vector<Potential> table);

  const std::string& name() const noexcept { return name_; }
  std::size_t arity() const noexcept { return args_.size(); }
  std::span<const RandomVariable> args() const noexcept { return args_; }
  const RandomVariable& arg(std::size_t pos) const { return args_.at(pos); }
  const Range& range(std::size_t pos) const { return *args_.at(pos).range; }
  std::size_t radix(std::size_t pos) const { return args_.at(pos).range->size(); }
  std::size_t stride(std::size_t pos) const { return strides_.at(pos); }

  std::span<const Potential> table() const noexcept { return table_; }
  std::size_t size() const noexcept { return table_.size(); }

  /// Mixed-radix row address; throws kIndexOutOfRange for invalid input.
  std::size_t row_index(std::span<const std::size_t> assignment) const;
  Assignment assignment_of(std::size_t row) const;

  const Potential& lookup(std::span<const std::size_t> assignment) const {
    return table_[row_index(assignment)];
  }
  const Potential& at(std::size_t row) const { return table_.at(row); }

  Factor renamed(std::string name) const;

 private:
  std::string name_;
  std::vector<RandomVariable> args_;
  std::vector<Potential> table_;
  std::vector<std::size_t> strides_;
};

/// Builds a factor from decimal text, interning every value through
/// `policy`.
Factor build_factor(std::string name, std::vector<RandomVariable> args,
                    std::span<const std::string> potentials, const PotentialPolicy& policy = {});

/// Reorders the argument list so that argument i moves to position
/// `perm[i]`, rearranging the table so each row keeps its potential.
Factor permute_args(const Factor& factor, const Permutation& perm);

/// Advances `assignment` to the next row in canonical order; returns false
/// after the last row.
inline bool next_assignment(Assignment& assignment, std::span<const std::size_t> radices) {
  for (std::size_t i = assignment.size(); i-- > 0;) {
    if (++assignment[i] < radices[i]) return true;
    assignment[i] = 0;
  }
  return false;
}

class FactorGraph {
 public:
  FactorGraph() = default;

  /// Throws kDuplicateName for repeated rv or factor names and kUnknownRv
  /// when a factor argument is not among `rvs` (or disagrees on its range).
  FactorGraph(std::vector<RandomVariable> rvs, std::vector<Factor> factors);

  std::span<const RandomVariable> rvs() const noexcept { return rvs_; }
  std::span<const Factor> factors() const noexcept { return factors_; }

  std::optional<std::size_t> find_rv(std::string_view name) const;
  std::optional<std::size_t> find_factor(std::string_view name) const;

  /// Copy of this graph with factor `index` replaced.
  FactorGraph with_factor(std::size_t index, Factor factor) const;

 private:
  std::vector<RandomVariable> rvs_;
  std::vector<Factor> factors_;
};

/// Unnormalised joint potentials over all rvs of a graph, states in
/// canonical order over the graph's rv declaration order.
struct JointTable {
  std::vector<std::string> rv_names;
  std::vector<double> values;
};

/// Throws kStateSpaceTooLarge when the state space exceeds `state_cap`.
JointTable joint_table(const FactorGraph& graph, std::uint64_t state_cap = kDefaultStateCap);

/// True iff both graphs define the same normalised distribution. Throws
/// kRvMismatch when rv names or ranges differ. Normalised values are
/// compared with relative tolerance `rel_tol`.
bool semantics_equivalent(const FactorGraph& a, const FactorGraph& b,
                          std::uint64_t state_cap = kDefaultStateCap, double rel_tol = 1e-12);

}  // namespace fgsym
