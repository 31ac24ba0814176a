#include "fgsym/factor_graph.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_set>

#include "fgsym/error.hpp"

namespace fgsym {

std::optional<std::size_t> Range::index_of(std::string_view label) const {
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] == label) return i;
  }
  return std::nullopt;
}

RangePtr make_range(std::string name, std::vector<std::string> values) {
  if (values.empty()) {
    throw Error(ErrorCode::kInvalidRange, "range '" + name + "' has no values");
  }
  std::unordered_set<std::string_view> seen;
  for (const auto& v : values) {
    if (!seen.insert(v).second) {
      throw Error(ErrorCode::kInvalidRange, "range '" + name + "' repeats value '" + v + "'");
    }
  }
  return std::make_shared<const Range>(Range{std::move(name), std::move(values)});
}

RangePtr boolean_range() {
  static const RangePtr range = make_range("bool", {"true", "false"});
  return range;
}

Permutation::Permutation(std::vector<std::size_t> targets) : targets_(std::move(targets)) {
  std::vector<bool> hit(targets_.size(), false);
  for (std::size_t t : targets_) {
    if (t >= targets_.size() || hit[t]) {
      throw Error(ErrorCode::kNotAPermutation, "argument mapping is not a bijection");
    }
    hit[t] = true;
  }
}

Permutation Permutation::identity(std::size_t n) {
  std::vector<std::size_t> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = i;
  return Permutation(std::move(targets));
}

Permutation Permutation::inverse() const {
  std::vector<std::size_t> inv(targets_.size());
  for (std::size_t i = 0; i < targets_.size(); ++i) inv[targets_[i]] = i;
  return Permutation(std::move(inv));
}

bool Permutation::is_identity() const noexcept {
  for (std::size_t i = 0; i < targets_.size(); ++i) {
    if (targets_[i] != i) return false;
  }
  return true;
}

Factor::Factor(std::string name, std::vector<RandomVariable> args, std::vector<Potential> table)
    : name_(std::move(name)), args_(std::move(args)), table_(std::move(table)) {
  if (args_.size() > kMaxArity) {
    throw Error(ErrorCode::kArityTooLarge,
                "factor '" + name_ + "' has more than " + std::to_string(kMaxArity) + " arguments");
  }
  std::size_t rows = 1;
  strides_.assign(args_.size(), 1);
  for (std::size_t i = args_.size(); i-- > 0;) {
    if (!args_[i].range) {
      throw Error(ErrorCode::kUnknownRv, "factor '" + name_ + "' argument '" + args_[i].name + "' has no range");
    }
    strides_[i] = rows;
    const std::size_t r = args_[i].range->size();
    if (rows > std::numeric_limits<std::size_t>::max() / r) {
      throw Error(ErrorCode::kLengthMismatch, "factor '" + name_ + "' table size overflows");
    }
    rows *= r;
  }
  if (table_.size() != rows) {
    throw Error(ErrorCode::kLengthMismatch, "factor '" + name_ + "' expects " + std::to_string(rows) +
                                                " potentials, got " + std::to_string(table_.size()));
  }
}

std::size_t Factor::row_index(std::span<const std::size_t> assignment) const {
  if (assignment.size() != args_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "assignment length does not match arity of '" + name_ + "'");
  }
  std::size_t row = 0;
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (assignment[i] >= args_[i].range->size()) {
      throw Error(ErrorCode::kIndexOutOfRange, "value index out of range for argument '" + args_[i].name + "'");
    }
    row += assignment[i] * strides_[i];
  }
  return row;
}

Assignment Factor::assignment_of(std::size_t row) const {
  if (row >= table_.size()) {
    throw Error(ErrorCode::kIndexOutOfRange, "row " + std::to_string(row) + " out of range for '" + name_ + "'");
  }
  Assignment a(args_.size());
  for (std::size_t i = 0; i < args_.size(); ++i) {
    a[i] = row / strides_[i];
    row %= strides_[i];
  }
  return a;
}

Factor Factor::renamed(std::string name) const {
  Factor copy = *this;
  copy.name_ = std::move(name);
  return copy;
}

Factor build_factor(std::string name, std::vector<RandomVariable> args,
                    std::span<const std::string> potentials, const PotentialPolicy& policy) {
  std::vector<Potential> table;
  table.reserve(potentials.size());
  for (const auto& text : potentials) table.push_back(policy.intern(text));
  return Factor(std::move(name), std::move(args), std::move(table));
}

Factor permute_args(const Factor& factor, const Permutation& perm) {
  const std::size_t n = factor.arity();
  if (perm.size() != n) {
    throw Error(ErrorCode::kNotAPermutation, "permutation size does not match arity of '" + factor.name() + "'");
  }
  std::vector<RandomVariable> args(n);
  std::vector<std::size_t> radices(n);
  std::vector<std::size_t> source_stride(n);
  for (std::size_t i = 0; i < n; ++i) {
    args[perm[i]] = factor.arg(i);
    radices[perm[i]] = factor.radix(i);
    source_stride[perm[i]] = factor.stride(i);
  }

  std::vector<Potential> table;
  table.reserve(factor.size());
  Assignment a(n, 0);
  std::size_t source = 0;
  const auto old_table = factor.table();
  for (;;) {
    table.push_back(old_table[source]);
    std::size_t j = n;
    while (j-- > 0) {
      if (++a[j] < radices[j]) {
        source += source_stride[j];
        break;
      }
      source -= (radices[j] - 1) * source_stride[j];
      a[j] = 0;
    }
    if (j == static_cast<std::size_t>(-1)) break;
  }
  return Factor(factor.name(), std::move(args), std::move(table));
}

FactorGraph::FactorGraph(std::vector<RandomVariable> rvs, std::vector<Factor> factors)
    : rvs_(std::move(rvs)), factors_(std::move(factors)) {
  std::unordered_set<std::string_view> names;
  for (const auto& rv : rvs_) {
    if (!rv.range) throw Error(ErrorCode::kUnknownRv, "rv '" + rv.name + "' has no range");
    if (!names.insert(rv.name).second) {
      throw Error(ErrorCode::kDuplicateName, "duplicate rv '" + rv.name + "'");
    }
  }
  std::unordered_set<std::string_view> factor_names;
  for (const auto& f : factors_) {
    if (!factor_names.insert(f.name()).second) {
      throw Error(ErrorCode::kDuplicateName, "duplicate factor '" + f.name() + "'");
    }
    for (const auto& arg : f.args()) {
      auto idx = find_rv(arg.name);
      if (!idx || !(*rvs_[*idx].range == *arg.range)) {
        throw Error(ErrorCode::kUnknownRv, "factor '" + f.name() + "' refers to unknown rv '" + arg.name + "'");
      }
    }
  }
}

std::optional<std::size_t> FactorGraph::find_rv(std::string_view name) const {
  for (std::size_t i = 0; i < rvs_.size(); ++i) {
    if (rvs_[i].name == name) return i;
  }
  return std::nullopt;
}

std::optional<std::size_t> FactorGraph::find_factor(std::string_view name) const {
  for (std::size_t i = 0; i < factors_.size(); ++i) {
    if (factors_[i].name() == name) return i;
  }
  return std::nullopt;
}

FactorGraph FactorGraph::with_factor(std::size_t index, Factor factor) const {
  std::vector<Factor> factors = factors_;
  factors.at(index) = std::move(factor);
  return FactorGraph(rvs_, std::move(factors));
}

namespace {

std::uint64_t state_count(std::span<const RandomVariable> rvs, std::uint64_t cap) {
  std::uint64_t states = 1;
  for (const auto& rv : rvs) {
    states *= rv.range->size();
    if (states > cap) {
      throw Error(ErrorCode::kStateSpaceTooLarge,
                  "joint state space exceeds the cap of " + std::to_string(cap) + " states");
    }
  }
  return states;
}

}  // namespace

JointTable joint_table(const FactorGraph& graph, std::uint64_t state_cap) {
  const auto rvs = graph.rvs();
  const std::uint64_t states = state_count(rvs, state_cap);

  std::vector<std::size_t> radices;
  JointTable out;
  for (const auto& rv : rvs) {
    radices.push_back(rv.range->size());
    out.rv_names.push_back(rv.name);
  }

  // For each factor, the graph index of every argument.
  std::vector<std::vector<std::size_t>> arg_rv;
  for (const auto& f : graph.factors()) {
    std::vector<std::size_t> idx;
    for (const auto& arg : f.args()) idx.push_back(*graph.find_rv(arg.name));
    arg_rv.push_back(std::move(idx));
  }

  out.values.reserve(states);
  Assignment state(rvs.size(), 0);
  do {
    double product = 1.0;
    for (std::size_t k = 0; k < arg_rv.size(); ++k) {
      const Factor& f = graph.factors()[k];
      std::size_t row = 0;
      for (std::size_t i = 0; i < arg_rv[k].size(); ++i) row += state[arg_rv[k][i]] * f.stride(i);
      product *= f.at(row).value();
    }
    out.values.push_back(product);
  } while (next_assignment(state, radices));
  return out;
}

bool semantics_equivalent(const FactorGraph& a, const FactorGraph& b, std::uint64_t state_cap, double rel_tol) {
  if (a.rvs().size() != b.rvs().size()) {
    throw Error(ErrorCode::kRvMismatch, "graphs have different numbers of rvs");
  }
  // Stride of each of a's rvs inside b's state order.
  std::vector<std::size_t> b_stride(b.rvs().size());
  {
    std::size_t s = 1;
    for (std::size_t i = b.rvs().size(); i-- > 0;) {
      b_stride[i] = s;
      s *= b.rvs()[i].range->size();
    }
  }
  std::vector<std::size_t> a_to_b_stride;
  for (const auto& rv : a.rvs()) {
    auto idx = b.find_rv(rv.name);
    if (!idx || !(*b.rvs()[*idx].range == *rv.range)) {
      throw Error(ErrorCode::kRvMismatch, "rv '" + rv.name + "' missing or with a different range");
    }
    a_to_b_stride.push_back(b_stride[*idx]);
  }

  const JointTable ja = joint_table(a, state_cap);
  const JointTable jb = joint_table(b, state_cap);

  double sum_a = 0.0;
  double sum_b = 0.0;
  for (double v : ja.values) sum_a += v;
  for (double v : jb.values) sum_b += v;

  std::vector<std::size_t> radices;
  for (const auto& rv : a.rvs()) radices.push_back(rv.range->size());
  Assignment state(radices.size(), 0);
  std::size_t row_a = 0;
  do {
    std::size_t row_b = 0;
    for (std::size_t i = 0; i < state.size(); ++i) row_b += state[i] * a_to_b_stride[i];
    const double x = ja.values[row_a] / sum_a;
    const double y = jb.values[row_b] / sum_b;
    if (std::abs(x - y) > rel_tol * std::max(std::abs(x), std::abs(y))) return false;
    ++row_a;
  } while (next_assignment(state, radices));
  return true;
}

}  // namespace fgsym
