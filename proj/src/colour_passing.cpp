#include "fgsym/colour_passing.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

// Colour = rank of the signature among the sorted distinct signatures.
template <class Signature>
std::vector<Colour> rank_signatures(const std::vector<Signature>& signatures) {
  std::map<Signature, Colour> rank;
  for (const auto& s : signatures) rank.emplace(s, 0);
  Colour next = 0;
  for (auto& [s, c] : rank) c = next++;
  std::vector<Colour> out;
  out.reserve(signatures.size());
  for (const auto& s : signatures) out.push_back(rank.at(s));
  return out;
}

std::size_t class_count(const std::vector<Colour>& colours) {
  std::vector<Colour> sorted(colours);
  std::sort(sorted.begin(), sorted.end());
  return static_cast<std::size_t>(std::unique(sorted.begin(), sorted.end()) - sorted.begin());
}

struct Fingerprint {
  std::size_t arity;
  std::vector<std::pair<std::vector<std::string>, std::size_t>> groups;
  std::vector<Potential> potentials;

  friend bool operator<(const Fingerprint& a, const Fingerprint& b) {
    return std::tie(a.arity, a.groups, a.potentials) < std::tie(b.arity, b.groups, b.potentials);
  }
};

Fingerprint fingerprint(const Factor& f) {
  Fingerprint fp{f.arity(), {}, {f.table().begin(), f.table().end()}};
  for (const auto& g : partition_args_by_range(f)) fp.groups.emplace_back(g.range->values, g.size());
  std::sort(fp.groups.begin(), fp.groups.end());
  std::sort(fp.potentials.begin(), fp.potentials.end());
  return fp;
}

}  // namespace

bool CommutativeSets::commutative(std::size_t pos) const {
  for (const auto& s : sets) {
    if (std::find(s.begin(), s.end(), pos) != s.end()) return s.size() > 1;
  }
  return false;
}

CommutativeSets detect_commutative_args(const Factor& factor) {
  const std::size_t n = factor.arity();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  auto find = [&](std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (!(factor.range(i) == factor.range(j)) || find(i) == find(j)) continue;
      std::vector<std::size_t> swap(n);
      std::iota(swap.begin(), swap.end(), 0);
      std::swap(swap[i], swap[j]);
      if (verify_permutation(factor, factor, Permutation(std::move(swap)))) parent[find(j)] = find(i);
    }
  }
  // Invariance under (i j) and (j k) implies invariance under
  // (i k) = (i j)(j k)(i j), so every component is closed.
  std::map<std::size_t, std::vector<std::size_t>> components;
  for (std::size_t i = 0; i < n; ++i) components[find(i)].push_back(i);
  CommutativeSets out;
  for (auto& [root, members] : components) out.sets.push_back(std::move(members));
  std::sort(out.sets.begin(), out.sets.end());
  return out;
}

std::vector<Colour> initial_rv_colours(const FactorGraph& graph, const Evidence& evidence) {
  validate_evidence(graph, evidence);
  using Signature = std::pair<std::vector<std::string>, std::optional<std::string>>;
  std::vector<Signature> signatures;
  for (const auto& rv : graph.rvs()) {
    auto it = evidence.find(rv.name);
    signatures.emplace_back(rv.range->values,
                            it == evidence.end() ? std::nullopt : std::optional<std::string>(it->second));
  }
  return rank_signatures(signatures);
}

FactorColours initial_factor_colours(const FactorGraph& graph, const Detector& detector) {
  const auto factors = graph.factors();
  FactorColours out;
  out.colours.assign(factors.size(), 0);
  out.representative.assign(factors.size(), 0);
  for (const auto& f : factors) out.rearrangements.push_back(Permutation::identity(f.arity()));

  std::map<Fingerprint, std::vector<std::size_t>> representatives;
  std::vector<std::size_t> class_of(factors.size());
  std::vector<std::size_t> reps;  // class id -> factor index
  for (std::size_t k = 0; k < factors.size(); ++k) {
    auto& candidates = representatives[fingerprint(factors[k])];
    bool placed = false;
    for (std::size_t rep : candidates) {
      const auto result = detect(detector.algorithm, factors[rep], factors[k], detector.budget);
      if (result.verdict == Verdict::kBudgetExhausted) {
        throw Error(ErrorCode::kBudgetExhausted,
                    "detector budget exhausted comparing '" + factors[rep].name() + "' and '" + factors[k].name() + "'");
      }
      if (result.exchangeable()) {
        class_of[k] = class_of[rep];
        out.representative[k] = rep;
        out.rearrangements[k] = *result.witness;
        placed = true;
        break;
      }
    }
    if (!placed) {
      candidates.push_back(k);
      class_of[k] = reps.size();
      reps.push_back(k);
      out.representative[k] = k;
    }
  }
  for (std::size_t k = 0; k < factors.size(); ++k) out.colours[k] = static_cast<Colour>(class_of[k]);
  return out;
}

ColourRefinement::ColourRefinement(const FactorGraph& graph, const Evidence& evidence, const Detector& detector)
    : graph_(&graph) {
  state_.rv_colours = initial_rv_colours(graph, evidence);
  auto fc = initial_factor_colours(graph, detector);
  state_.factor_colours = std::move(fc.colours);
  state_.rearrangements = std::move(fc.rearrangements);
  state_.representative = std::move(fc.representative);

  occurrences_.resize(graph.rvs().size());
  for (std::size_t k = 0; k < graph.factors().size(); ++k) {
    aligned_.push_back(permute_args(graph.factors()[k], state_.rearrangements[k]));
    commutative_.push_back(detect_commutative_args(aligned_.back()));
    for (std::size_t pos = 0; pos < aligned_.back().arity(); ++pos) {
      occurrences_[*graph.find_rv(aligned_.back().arg(pos).name)].emplace_back(k, pos);
    }
  }
  state_.rv_class_counts.push_back(class_count(state_.rv_colours));
  state_.factor_class_counts.push_back(class_count(state_.factor_colours));
}

bool ColourRefinement::step() {
  std::vector<std::vector<Colour>> factor_sigs;
  for (std::size_t k = 0; k < aligned_.size(); ++k) {
    std::vector<Colour> sig;
    for (const auto& arg : aligned_[k].args()) sig.push_back(state_.rv_colours[*graph_->find_rv(arg.name)]);
    sig.push_back(state_.factor_colours[k]);
    factor_sigs.push_back(std::move(sig));
  }
  auto factor_colours = rank_signatures(factor_sigs);

  using RvSignature = std::pair<std::vector<std::pair<Colour, std::size_t>>, Colour>;
  std::vector<RvSignature> rv_sigs;
  for (std::size_t r = 0; r < occurrences_.size(); ++r) {
    RvSignature sig;
    for (const auto& [k, pos] : occurrences_[r]) {
      // Positions are 1-based; 0 marks membership in a commutative set.
      sig.first.emplace_back(factor_colours[k], commutative_[k].commutative(pos) ? 0 : pos + 1);
    }
    std::sort(sig.first.begin(), sig.first.end());
    sig.second = state_.rv_colours[r];
    rv_sigs.push_back(std::move(sig));
  }
  auto rv_colours = rank_signatures(rv_sigs);

  // Each signature embeds the previous colour, so the partitions can only
  // be refined and equal class counts mean an unchanged grouping.
  const std::size_t factor_classes = class_count(factor_colours);
  const std::size_t rv_classes = class_count(rv_colours);
  const bool changed =
      factor_classes != state_.factor_class_counts.back() || rv_classes != state_.rv_class_counts.back();

  state_.factor_colours = std::move(factor_colours);
  state_.rv_colours = std::move(rv_colours);
  state_.factor_class_counts.push_back(factor_classes);
  state_.rv_class_counts.push_back(rv_classes);
  ++state_.rounds;
  return changed;
}

Colouring colour_pass(const FactorGraph& graph, const Evidence& evidence, const Detector& detector) {
  ColourRefinement refinement(graph, evidence, detector);
  while (refinement.step()) {
  }
  return refinement.colouring();
}

std::string format_classes(const FactorGraph& graph, const Colouring& colouring) {
  std::map<Colour, std::vector<std::size_t>> rv_classes;
  for (std::size_t r = 0; r < colouring.rv_colours.size(); ++r) rv_classes[colouring.rv_colours[r]].push_back(r);
  std::map<Colour, std::vector<std::size_t>> factor_classes;
  for (std::size_t k = 0; k < colouring.factor_colours.size(); ++k) {
    factor_classes[colouring.factor_colours[k]].push_back(k);
  }

  std::ostringstream out;
  for (const auto& [colour, members] : rv_classes) {
    out << "rvclass " << colour;
    for (auto r : members) out << ' ' << graph.rvs()[r].name;
    out << '\n';
  }
  for (const auto& [colour, members] : factor_classes) {
    out << "factorclass " << colour;
    for (auto k : members) out << ' ' << graph.factors()[k].name();
    out << " rep=" << graph.factors()[members.front()].name() << '\n';
  }
  return out.str();
}

FactorGraph aligned_graph(const FactorGraph& graph, const Colouring& colouring) {
  std::vector<Factor> factors;
  for (std::size_t k = 0; k < graph.factors().size(); ++k) {
    const Factor aligned = permute_args(graph.factors()[k], colouring.rearrangements[k]);
    const auto shared = graph.factors()[colouring.representative[k]].table();
    factors.emplace_back(aligned.name(), std::vector<RandomVariable>(aligned.args().begin(), aligned.args().end()),
                         std::vector<Potential>(shared.begin(), shared.end()));
  }
  return FactorGraph({graph.rvs().begin(), graph.rvs().end()}, std::move(factors));
}

}  // namespace fgsym
