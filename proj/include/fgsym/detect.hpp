#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fgsym/buckets.hpp"
#include "fgsym/factor_graph.hpp"

namespace fgsym {

/// Bit j set = target position j admissible.
using PositionSet = std::uint64_t;

inline constexpr PositionSet position_bit(std::size_t pos) { return PositionSet{1} << pos; }

/// For every argument position i of the second factor, the positions of
/// the first factor's argument list it may be moved to.
class CandidateMap {
 public:
  CandidateMap() = default;
  explicit CandidateMap(std::vector<PositionSet> targets) : targets_(std::move(targets)) {}

  /// 0-based target lists, mostly for tests.
  static CandidateMap from_lists(const std::vector<std::vector<std::size_t>>& lists);

  /// i -> every position of `first` whose range equals that of
  /// `second`'s argument i.
  static CandidateMap range_preserving(const Factor& first, const Factor& second);

  std::size_t size() const noexcept { return targets_.size(); }
  PositionSet operator[](std::size_t i) const { return targets_[i]; }
  PositionSet& operator[](std::size_t i) { return targets_[i]; }
  std::vector<std::size_t> targets_of(std::size_t i) const;

  bool has_empty() const noexcept;
  void intersect_with(const CandidateMap& other);

  /// 1-based rendering such as `{1->{3}, 2->{1}, 3->{2}}`.
  std::string to_string() const;

  friend bool operator==(const CandidateMap&, const CandidateMap&) = default;

 private:
  std::vector<PositionSet> targets_;
};

enum class Verdict { kExchangeable, kNotExchangeable, kBudgetExhausted };
std::string_view to_string(Verdict verdict);

struct Counters {
  std::uint64_t table_comparisons = 0;   // full-table verifications
  std::uint64_t bucket_comparisons = 0;  // multiset or ordered checks of one bucket
  std::uint64_t candidates = 0;          // permutations enumerated
};

/// Limits on one detection. Both are checked before every full-table
/// verification, and the deadline is also polled while candidates are
/// being rejected; hitting either ends the search with kBudgetExhausted.
struct Budget {
  std::optional<std::uint64_t> max_table_comparisons;
  std::optional<std::chrono::nanoseconds> deadline;
};

struct DetectionResult {
  Verdict verdict = Verdict::kNotExchangeable;
  std::optional<Permutation> witness;
  Counters counters;
  std::chrono::nanoseconds elapsed{0};
  /// DEFT only: the intersected candidate map, when it was computed.
  std::optional<CandidateMap> candidate_map;

  bool exchangeable() const noexcept { return verdict == Verdict::kExchangeable; }
};

/// One table comparison: true iff rearranging `second` by `perm` gives a
/// table identical to `first`'s. Throws kArityMismatch, kNotAPermutation
/// and kRangeMismatch when `perm` moves an argument onto another range.
bool verify_permutation(const Factor& first, const Factor& second, const Permutation& perm,
                        Counters* counters = nullptr);

/// `second`'s argument groups reordered to line up with `first`'s groups
/// by range and size, or nullopt if the group structures differ.
std::optional<std::vector<ArgumentGroup>> align_groups(const Factor& first, const Factor& second);

/// Scans every range-preserving permutation in lexicographic order.
DetectionResult naive_exchangeable(const Factor& first, const Factor& second, const Budget& budget = {});

/// Necessary condition: equal arity, aligned groups and equal potential
/// multisets in every composite bucket.
bool bucket_filter(const Factor& first, const Factor& second, Counters* counters = nullptr);

/// Bucket filter followed by the full permutation scan.
DetectionResult acp_exchangeable(const Factor& first, const Factor& second, const Budget& budget = {});

/// Candidate targets that make the ordered potentials of composite bucket
/// `bucket` agree. `first` and `second` must share the group layout (see
/// align_groups). Throws kMultisetMismatch if the multisets differ.
CandidateMap candidate_swaps(const BucketIndex& first, const BucketIndex& second, std::size_t bucket);

/// The constraints contributed by a single entry `entry` (0-based) of
/// second's ordered potentials, before intersecting over the bucket.
CandidateMap candidate_swaps_at(const BucketIndex& first, const BucketIndex& second, std::size_t bucket,
                                std::size_t entry);

/// Positionwise intersection; nullopt when some position has no target
/// left (the factors are then not exchangeable).
std::optional<CandidateMap> intersect_candidates(std::span<const CandidateMap> maps);

/// Depth-first enumeration of the bijections allowed by a candidate map:
/// positions ascending, targets ascending, no target used twice.
class RearrangementEnumerator {
 public:
  explicit RearrangementEnumerator(CandidateMap map);

  /// Writes the next permutation; false once the search is exhausted.
  bool next(Permutation& out);

 private:
  CandidateMap map_;
  std::vector<PositionSet> untried_;
  std::vector<std::size_t> chosen_;
  PositionSet used_ = 0;
  std::size_t depth_ = 0;
  bool started_ = false;
  bool done_ = false;
};

std::vector<Permutation> enumerate_rearrangements(const CandidateMap& map);

struct DeftOptions {
  /// Only this many lowest-dof buckets feed the candidate intersection.
  std::size_t bucket_cap = 5;
};

DetectionResult deft_exchangeable(const Factor& first, const Factor& second, const Budget& budget = {},
                                  const DeftOptions& options = {});

enum class Algorithm { kNaive, kAcp, kDeft };
std::string_view to_string(Algorithm algorithm);
std::optional<Algorithm> parse_algorithm(std::string_view name);

DetectionResult detect(Algorithm algorithm, const Factor& first, const Factor& second, const Budget& budget = {});

}  // namespace fgsym
