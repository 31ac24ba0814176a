#include "fgsym/detect.hpp"

#include <algorithm>
#include <bit>
#include <unordered_map>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

using Clock = std::chrono::steady_clock;

PositionSet same_range_mask(const Factor& first, const Range& range) {
  PositionSet mask = 0;
  for (std::size_t j = 0; j < first.arity(); ++j) {
    if (first.range(j) == range) mask |= position_bit(j);
  }
  return mask;
}

// Search state shared by the permutation-scanning detectors.
class Search {
 public:
  Search(const Budget& budget) : budget_(budget), start_(Clock::now()) {}

  bool past_deadline() const { return budget_.deadline && Clock::now() - start_ >= *budget_.deadline; }

  bool out_of_budget() const {
    if (budget_.max_table_comparisons && result.counters.table_comparisons >= *budget_.max_table_comparisons) {
      return true;
    }
    return past_deadline();
  }

  DetectionResult finish(Verdict verdict) {
    result.verdict = verdict;
    result.elapsed = std::chrono::duration_cast<std::chrono::nanoseconds>(Clock::now() - start_);
    return std::move(result);
  }

  // Verifies every enumerated permutation that passes `precheck`.
  template <class Precheck>
  DetectionResult scan(const Factor& first, const Factor& second, CandidateMap map, Precheck&& precheck) {
    RearrangementEnumerator candidates(std::move(map));
    Permutation perm;
    while (candidates.next(perm)) {
      ++result.counters.candidates;
      if (!precheck(perm)) {
        // Rejected candidates cost no verification but still take time.
        if (result.counters.candidates % 4096 == 0 && past_deadline()) return finish(Verdict::kBudgetExhausted);
        continue;
      }
      if (out_of_budget()) return finish(Verdict::kBudgetExhausted);
      if (verify_permutation(first, second, perm, &result.counters)) {
        result.witness = perm;
        return finish(Verdict::kExchangeable);
      }
    }
    return finish(Verdict::kNotExchangeable);
  }

  DetectionResult result;

 private:
  Budget budget_;
  Clock::time_point start_;
};

bool multisets_agree(const BucketIndex& first, const BucketIndex& second, std::size_t bucket) {
  auto a = first.rows(bucket);
  auto b = second.rows(bucket);
  if (a.size() != b.size()) return false;
  return first.multiset(bucket) == second.multiset(bucket);
}

}  // namespace

CandidateMap CandidateMap::from_lists(const std::vector<std::vector<std::size_t>>& lists) {
  std::vector<PositionSet> targets;
  for (const auto& list : lists) {
    PositionSet s = 0;
    for (auto t : list) s |= position_bit(t);
    targets.push_back(s);
  }
  return CandidateMap(std::move(targets));
}

CandidateMap CandidateMap::range_preserving(const Factor& first, const Factor& second) {
  std::vector<PositionSet> targets;
  for (std::size_t i = 0; i < second.arity(); ++i) targets.push_back(same_range_mask(first, second.range(i)));
  return CandidateMap(std::move(targets));
}

std::vector<std::size_t> CandidateMap::targets_of(std::size_t i) const {
  std::vector<std::size_t> out;
  for (PositionSet s = targets_.at(i); s; s &= s - 1) out.push_back(static_cast<std::size_t>(std::countr_zero(s)));
  return out;
}

bool CandidateMap::has_empty() const noexcept {
  return std::any_of(targets_.begin(), targets_.end(), [](PositionSet s) { return s == 0; });
}

void CandidateMap::intersect_with(const CandidateMap& other) {
  if (other.size() != size()) throw Error(ErrorCode::kArityMismatch, "candidate maps of different arity");
  for (std::size_t i = 0; i < targets_.size(); ++i) targets_[i] &= other.targets_[i];
}

std::string CandidateMap::to_string() const {
  std::string s = "{";
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(i + 1) + "->{";
    bool first = true;
    for (auto t : targets_of(i)) {
      if (!first) s += ',';
      first = false;
      s += std::to_string(t + 1);
    }
    s += '}';
  }
  return s + "}";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::kExchangeable: return "exchangeable";
    case Verdict::kNotExchangeable: return "not_exchangeable";
    case Verdict::kBudgetExhausted: return "budget_exhausted";
  }
  return "unknown";
}

bool verify_permutation(const Factor& first, const Factor& second, const Permutation& perm, Counters* counters) {
  const std::size_t n = first.arity();
  if (second.arity() != n) throw Error(ErrorCode::kArityMismatch, "factors differ in arity");
  if (perm.size() != n) throw Error(ErrorCode::kNotAPermutation, "permutation size does not match arity");
  // Stride in `second` of the argument that lands on each position of `first`.
  std::vector<std::size_t> stride(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!(second.range(i) == first.range(perm[i]))) {
      throw Error(ErrorCode::kRangeMismatch, "permutation moves an argument onto a different range");
    }
    stride[perm[i]] = second.stride(i);
  }
  if (counters) ++counters->table_comparisons;

  const auto t1 = first.table();
  const auto t2 = second.table();
  Assignment a(n, 0);
  std::size_t source = 0;
  for (std::size_t row = 0; row < t1.size(); ++row) {
    if (!(t1[row] == t2[source])) return false;
    for (std::size_t j = n; j-- > 0;) {
      if (++a[j] < first.radix(j)) {
        source += stride[j];
        break;
      }
      source -= (first.radix(j) - 1) * stride[j];
      a[j] = 0;
    }
  }
  return true;
}

std::optional<std::vector<ArgumentGroup>> align_groups(const Factor& first, const Factor& second) {
  if (first.arity() != second.arity()) return std::nullopt;
  const auto g1 = partition_args_by_range(first);
  auto g2 = partition_args_by_range(second);
  if (g1.size() != g2.size()) return std::nullopt;
  std::vector<ArgumentGroup> aligned;
  for (const auto& g : g1) {
    auto it = std::find_if(g2.begin(), g2.end(),
                           [&](const ArgumentGroup& h) { return *h.range == *g.range && h.size() == g.size(); });
    if (it == g2.end()) return std::nullopt;
    aligned.push_back(*it);
  }
  return aligned;
}

DetectionResult naive_exchangeable(const Factor& first, const Factor& second, const Budget& budget) {
  Search search(budget);
  if (first.arity() != second.arity()) return search.finish(Verdict::kNotExchangeable);
  return search.scan(first, second, CandidateMap::range_preserving(first, second),
                     [](const Permutation&) { return true; });
}

bool bucket_filter(const Factor& first, const Factor& second, Counters* counters) {
  auto aligned = align_groups(first, second);
  if (!aligned) return false;
  const BucketIndex idx1(first);
  const BucketIndex idx2(second, std::move(*aligned));
  for (std::size_t b = 0; b < idx1.bucket_count(); ++b) {
    if (counters) ++counters->bucket_comparisons;
    if (!multisets_agree(idx1, idx2, b)) return false;
  }
  return true;
}

DetectionResult acp_exchangeable(const Factor& first, const Factor& second, const Budget& budget) {
  Search search(budget);
  if (!bucket_filter(first, second, &search.result.counters)) return search.finish(Verdict::kNotExchangeable);
  return search.scan(first, second, CandidateMap::range_preserving(first, second),
                     [](const Permutation&) { return true; });
}

namespace {

// For every distinct potential of first's bucket and every value index x:
// the positions j holding x in at least one row mapped to that potential.
struct ValuePositions {
  std::unordered_map<Potential, std::size_t> slot;
  std::vector<PositionSet> masks;  // slot * max_radix + x
  std::size_t max_radix = 0;

  ValuePositions(const BucketIndex& first, std::size_t bucket) {
    const Factor& f = first.factor();
    for (std::size_t j = 0; j < f.arity(); ++j) max_radix = std::max(max_radix, f.radix(j));
    for (auto row : first.rows(bucket)) {
      auto [it, inserted] = slot.emplace(f.at(row), slot.size());
      if (inserted) masks.resize(masks.size() + max_radix, 0);
      PositionSet* m = &masks[it->second * max_radix];
      const Assignment a = f.assignment_of(row);
      for (std::size_t j = 0; j < a.size(); ++j) m[a[j]] |= position_bit(j);
    }
  }
};

// Positions of `second` constrained by an index, and the range masks.
struct Layout {
  std::vector<PositionSet> same_range;
  std::vector<bool> covered;

  Layout(const BucketIndex& first, const BucketIndex& second) {
    const Factor& f1 = first.factor();
    const Factor& f2 = second.factor();
    if (f1.arity() != f2.arity()) throw Error(ErrorCode::kArityMismatch, "factors differ in arity");
    covered.assign(f2.arity(), false);
    for (const auto& g : second.groups()) {
      for (auto pos : g.positions) covered[pos] = true;
    }
    for (std::size_t i = 0; i < f2.arity(); ++i) same_range.push_back(same_range_mask(f1, f2.range(i)));
  }
};

void constrain_entry(const ValuePositions& vp, const Layout& layout, const Factor& second, std::uint32_t row,
                     std::vector<PositionSet>& out) {
  const auto it = vp.slot.find(second.at(row));
  const Assignment a = second.assignment_of(row);
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!layout.covered[i]) {
      out[i] = layout.same_range[i];
      continue;
    }
    out[i] = it == vp.slot.end() ? 0 : vp.masks[it->second * vp.max_radix + a[i]] & layout.same_range[i];
  }
}

void require_same_multiset(const BucketIndex& first, const BucketIndex& second, std::size_t bucket) {
  if (!multisets_agree(first, second, bucket)) {
    throw Error(ErrorCode::kMultisetMismatch, "bucket potentials differ as multisets");
  }
}

}  // namespace

CandidateMap candidate_swaps(const BucketIndex& first, const BucketIndex& second, std::size_t bucket) {
  require_same_multiset(first, second, bucket);
  const Layout layout(first, second);
  const ValuePositions vp(first, bucket);
  const std::size_t n = second.factor().arity();
  std::vector<PositionSet> acc(layout.same_range);
  std::vector<PositionSet> entry(n);
  for (auto row : second.rows(bucket)) {
    constrain_entry(vp, layout, second.factor(), row, entry);
    for (std::size_t i = 0; i < n; ++i) acc[i] &= entry[i];
  }
  return CandidateMap(std::move(acc));
}

CandidateMap candidate_swaps_at(const BucketIndex& first, const BucketIndex& second, std::size_t bucket,
                                std::size_t entry) {
  require_same_multiset(first, second, bucket);
  const auto rows = second.rows(bucket);
  if (entry >= rows.size()) throw Error(ErrorCode::kIndexOutOfRange, "bucket entry out of range");
  const Layout layout(first, second);
  const ValuePositions vp(first, bucket);
  std::vector<PositionSet> out(second.factor().arity());
  constrain_entry(vp, layout, second.factor(), rows[entry], out);
  return CandidateMap(std::move(out));
}

std::optional<CandidateMap> intersect_candidates(std::span<const CandidateMap> maps) {
  if (maps.empty()) return CandidateMap{};
  CandidateMap acc = maps.front();
  for (std::size_t k = 1; k < maps.size(); ++k) {
    acc.intersect_with(maps[k]);
    if (acc.has_empty()) return std::nullopt;
  }
  if (acc.has_empty()) return std::nullopt;
  return acc;
}

RearrangementEnumerator::RearrangementEnumerator(CandidateMap map)
    : map_(std::move(map)), untried_(map_.size(), 0), chosen_(map_.size(), 0) {}

bool RearrangementEnumerator::next(Permutation& out) {
  if (done_) return false;
  const std::size_t n = map_.size();
  if (!started_) {
    started_ = true;
    if (n == 0) {
      done_ = true;
      out = Permutation::identity(0);
      return true;
    }
    untried_[0] = map_[0];
    depth_ = 0;
  } else {
    depth_ = n - 1;
    used_ &= ~position_bit(chosen_[depth_]);
  }

  for (;;) {
    const PositionSet available = untried_[depth_] & ~used_;
    if (available == 0) {
      if (depth_ == 0) {
        done_ = true;
        return false;
      }
      --depth_;
      used_ &= ~position_bit(chosen_[depth_]);
      continue;
    }
    const auto target = static_cast<std::size_t>(std::countr_zero(available));
    untried_[depth_] &= ~position_bit(target);
    chosen_[depth_] = target;
    used_ |= position_bit(target);
    if (++depth_ == n) {
      out = Permutation(chosen_);
      return true;
    }
    untried_[depth_] = map_[depth_];
  }
}

std::vector<Permutation> enumerate_rearrangements(const CandidateMap& map) {
  std::vector<Permutation> out;
  RearrangementEnumerator e(map);
  Permutation p;
  while (e.next(p)) out.push_back(p);
  return out;
}

DetectionResult deft_exchangeable(const Factor& first, const Factor& second, const Budget& budget,
                                  const DeftOptions& options) {
  Search search(budget);
  auto& counters = search.result.counters;

  auto aligned = align_groups(first, second);
  if (!aligned) return search.finish(Verdict::kNotExchangeable);
  const BucketIndex idx1(first);
  const BucketIndex idx2(second, *aligned);

  // Every bucket must carry the same multiset; remember the dof of the
  // buckets that hold more than one potential.
  std::vector<std::pair<Dof, std::size_t>> informative;
  for (std::size_t b = 0; b < idx1.bucket_count(); ++b) {
    ++counters.bucket_comparisons;
    if (idx1.rows(b).size() != idx2.rows(b).size()) return search.finish(Verdict::kNotExchangeable);
    const auto m1 = idx1.multiset(b);
    if (m1 != idx2.multiset(b)) return search.finish(Verdict::kNotExchangeable);
    if (m1.size() > 1) informative.emplace_back(degree_of_freedom(m1), b);
  }
  std::sort(informative.begin(), informative.end());
  if (informative.size() > options.bucket_cap) informative.resize(options.bucket_cap);

  CandidateMap map = CandidateMap::range_preserving(first, second);
  // A group over a single-valued range can be permuted freely without
  // changing the table, so pin it to the order-preserving assignment.
  for (std::size_t g = 0; g < aligned->size(); ++g) {
    const auto& src = (*aligned)[g].positions;
    const auto& dst = idx1.groups()[g].positions;
    if (idx1.groups()[g].range->size() != 1) continue;
    for (std::size_t k = 0; k < src.size(); ++k) map[src[k]] = position_bit(dst[k]);
  }
  for (const auto& [dof, b] : informative) {
    map.intersect_with(candidate_swaps(idx1, idx2, b));
    if (map.has_empty()) {
      search.result.candidate_map = map;
      return search.finish(Verdict::kNotExchangeable);
    }
  }
  search.result.candidate_map = map;

  // Rows of the selected buckets, decoded once for the ordered prechecks.
  struct Row {
    std::uint32_t row;
    Assignment assignment;
  };
  std::vector<std::vector<Row>> selected;
  for (const auto& [dof, b] : informative) {
    std::vector<Row> rows;
    for (auto r : idx1.rows(b)) rows.push_back({r, first.assignment_of(r)});
    selected.push_back(std::move(rows));
  }

  const std::size_t n = first.arity();
  std::vector<std::size_t> stride(n);
  auto ordered_match = [&](const Permutation& perm) {
    for (std::size_t i = 0; i < n; ++i) stride[perm[i]] = second.stride(i);
    for (const auto& rows : selected) {
      ++counters.bucket_comparisons;
      for (const auto& r : rows) {
        std::size_t source = 0;
        for (std::size_t j = 0; j < n; ++j) source += r.assignment[j] * stride[j];
        if (!(first.at(r.row) == second.at(source))) return false;
      }
    }
    return true;
  };
  return search.scan(first, second, std::move(map), ordered_match);
}

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNaive: return "naive";
    case Algorithm::kAcp: return "acp";
    case Algorithm::kDeft: return "deft";
  }
  return "unknown";
}

std::optional<Algorithm> parse_algorithm(std::string_view name) {
  if (name == "naive") return Algorithm::kNaive;
  if (name == "acp") return Algorithm::kAcp;
  if (name == "deft") return Algorithm::kDeft;
  return std::nullopt;
}

DetectionResult detect(Algorithm algorithm, const Factor& first, const Factor& second, const Budget& budget) {
  switch (algorithm) {
    case Algorithm::kNaive: return naive_exchangeable(first, second, budget);
    case Algorithm::kAcp: return acp_exchangeable(first, second, budget);
    case Algorithm::kDeft: break;
  }
  return deft_exchangeable(first, second, budget);
}

}  // namespace fgsym
