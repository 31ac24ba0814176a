#include "fgsym/buckets.hpp"

#include <algorithm>
#include <map>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

Dof saturating_mul(Dof a, Dof b) {
  if (a != 0 && b > kDofSaturated / a) return kDofSaturated;
  return a * b;
}

Dof saturating_factorial(std::size_t n) {
  Dof f = 1;
  for (std::size_t i = 2; i <= n && f != kDofSaturated; ++i) f = saturating_mul(f, i);
  return f;
}

void enumerate_into(std::size_t remaining, std::size_t values, std::vector<std::uint32_t>& prefix,
                    std::vector<Bucket>& out) {
  if (prefix.size() + 1 == values) {
    prefix.push_back(static_cast<std::uint32_t>(remaining));
    out.push_back(Bucket{prefix});
    prefix.pop_back();
    return;
  }
  for (std::size_t c = remaining + 1; c-- > 0;) {
    prefix.push_back(static_cast<std::uint32_t>(c));
    enumerate_into(remaining - c, values, prefix, out);
    prefix.pop_back();
  }
}

bool entailed_by(const ArgumentGroup& group, const Bucket& bucket) {
  if (bucket.counts.size() != group.range->size()) return false;
  std::size_t sum = 0;
  for (auto c : bucket.counts) sum += c;
  return sum == group.size();
}

void require_entailed(const ArgumentGroup& group, const Bucket& bucket) {
  if (!entailed_by(group, bucket)) {
    throw Error(ErrorCode::kUnknownBucket, "bucket " + bucket.to_string() + " is not entailed by the group");
  }
}

}  // namespace

std::vector<ArgumentGroup> partition_args_by_range(const Factor& factor) {
  std::vector<ArgumentGroup> groups;
  for (std::size_t pos = 0; pos < factor.arity(); ++pos) {
    const RangePtr& range = factor.arg(pos).range;
    auto it = std::find_if(groups.begin(), groups.end(),
                           [&](const ArgumentGroup& g) { return *g.range == *range; });
    if (it == groups.end()) {
      groups.push_back(ArgumentGroup{{pos}, range});
    } else {
      it->positions.push_back(pos);
    }
  }
  return groups;
}

std::string Bucket::to_string() const {
  std::string s = "[";
  for (std::size_t i = 0; i < counts.size(); ++i) {
    if (i) s += ',';
    s += std::to_string(counts[i]);
  }
  return s + "]";
}

Bucket bucket_of(const ArgumentGroup& group, std::span<const std::size_t> assignment) {
  Bucket b{std::vector<std::uint32_t>(group.range->size(), 0)};
  for (std::size_t pos : group.positions) ++b.counts.at(assignment[pos]);
  return b;
}

std::vector<Bucket> enumerate_buckets(std::size_t positions, std::size_t values) {
  std::vector<Bucket> out;
  if (values == 0) return out;
  std::vector<std::uint32_t> prefix;
  enumerate_into(positions, values, prefix, out);
  return out;
}

std::vector<Bucket> enumerate_buckets(const ArgumentGroup& group) {
  return enumerate_buckets(group.size(), group.range->size());
}

std::vector<Potential> ordered_potentials(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket) {
  require_entailed(group, bucket);
  std::vector<Potential> out;
  std::vector<std::size_t> radices;
  for (std::size_t i = 0; i < factor.arity(); ++i) radices.push_back(factor.radix(i));
  Assignment a(factor.arity(), 0);
  std::size_t row = 0;
  do {
    if (bucket_of(group, a) == bucket) out.push_back(factor.at(row));
    ++row;
  } while (next_assignment(a, radices));
  return out;
}

std::vector<Potential> multiset_potentials(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket) {
  auto out = ordered_potentials(factor, group, bucket);
  std::sort(out.begin(), out.end());
  return out;
}

Dof degree_of_freedom(std::span<const Potential> potentials) {
  std::vector<Potential> sorted(potentials.begin(), potentials.end());
  std::sort(sorted.begin(), sorted.end());
  Dof dof = 1;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    dof = saturating_mul(dof, saturating_factorial(j - i));
    i = j;
  }
  return dof;
}

Dof dof_bucket(const Factor& factor, const ArgumentGroup& group, const Bucket& bucket) {
  return degree_of_freedom(ordered_potentials(factor, group, bucket));
}

Dof dof_factor(const Factor& factor) {
  Dof best = kDofSaturated;
  bool any = false;
  for (const auto& group : partition_args_by_range(factor)) {
    BucketIndex index(factor, {group});
    for (std::size_t b = 0; b < index.bucket_count(); ++b) {
      if (index.rows(b).size() < 2) continue;
      any = true;
      best = std::min(best, degree_of_freedom(index.ordered(b)));
    }
  }
  return any ? best : 1;
}

BucketIndex::BucketIndex(const Factor& factor) : BucketIndex(factor, partition_args_by_range(factor)) {}

BucketIndex::BucketIndex(const Factor& factor, std::vector<ArgumentGroup> groups)
    : factor_(&factor), groups_(std::move(groups)) {
  std::vector<std::size_t> owner(factor.arity(), groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    for (std::size_t pos : groups_[g].positions) {
      if (pos >= factor.arity() || owner[pos] != groups_.size() || !(factor.range(pos) == *groups_[g].range)) {
        throw Error(ErrorCode::kRangeMismatch, "argument groups do not partition '" + factor.name() + "' by range");
      }
      owner[pos] = g;
    }
  }

  // Groups covering only part of the arguments are allowed: uncovered
  // positions simply do not contribute to the key.
  std::vector<std::map<std::vector<std::uint32_t>, std::uint32_t>> rank(groups_.size());
  group_weight_.assign(groups_.size(), 1);
  std::size_t composite = 1;
  for (std::size_t g = groups_.size(); g-- > 0;) {
    auto buckets = enumerate_buckets(groups_[g]);
    for (std::uint32_t i = 0; i < buckets.size(); ++i) rank[g].emplace(buckets[i].counts, i);
    group_weight_[g] = composite;
    composite *= buckets.size();
    per_group_.insert(per_group_.begin(), std::move(buckets));
  }

  row_bucket_.resize(factor.size());
  std::vector<std::size_t> radices;
  for (std::size_t i = 0; i < factor.arity(); ++i) radices.push_back(factor.radix(i));
  Assignment a(factor.arity(), 0);
  std::vector<std::uint32_t> counts;
  std::size_t row = 0;
  do {
    std::size_t key = 0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      counts.assign(groups_[g].range->size(), 0);
      for (std::size_t pos : groups_[g].positions) ++counts[a[pos]];
      key += rank[g].at(counts) * group_weight_[g];
    }
    row_bucket_[row++] = static_cast<std::uint32_t>(key);
  } while (next_assignment(a, radices));

  offsets_.assign(composite + 1, 0);
  for (auto b : row_bucket_) ++offsets_[b + 1];
  for (std::size_t b = 0; b < composite; ++b) offsets_[b + 1] += offsets_[b];
  rows_.resize(row_bucket_.size());
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (std::uint32_t r = 0; r < row_bucket_.size(); ++r) rows_[fill[row_bucket_[r]]++] = r;
}

BucketKey BucketIndex::key(std::size_t composite) const {
  BucketKey key;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    key.push_back(per_group_[g][(composite / group_weight_[g]) % per_group_[g].size()]);
  }
  return key;
}

std::size_t BucketIndex::composite_of(const BucketKey& key) const {
  if (key.size() != groups_.size()) throw Error(ErrorCode::kUnknownBucket, "bucket key has wrong group count");
  std::size_t composite = 0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto& list = per_group_[g];
    auto it = std::find(list.begin(), list.end(), key[g]);
    if (it == list.end()) {
      throw Error(ErrorCode::kUnknownBucket, "bucket " + key[g].to_string() + " is not entailed by the group");
    }
    composite += static_cast<std::size_t>(it - list.begin()) * group_weight_[g];
  }
  return composite;
}

std::vector<Potential> BucketIndex::ordered(std::size_t composite) const {
  std::vector<Potential> out;
  for (auto r : rows(composite)) out.push_back(factor_->at(r));
  return out;
}

std::vector<Potential> BucketIndex::multiset(std::size_t composite) const {
  auto out = ordered(composite);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace fgsym
