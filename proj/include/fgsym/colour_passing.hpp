#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "fgsym/detect.hpp"
#include "fgsym/factor_graph.hpp"
#include "fgsym/model_io.hpp"

namespace fgsym {

using Colour = std::uint32_t;

/// Exchangeability test used for the initial factor colours.
struct Detector {
  Algorithm algorithm = Algorithm::kDeft;
  Budget budget;
};

/// Partition of a factor's positions into maximal sets within which every
/// transposition leaves the table unchanged. Sets are sorted and ordered
/// by their first position.
struct CommutativeSets {
  std::vector<std::vector<std::size_t>> sets;

  /// True if `pos` shares its set with at least one other position.
  bool commutative(std::size_t pos) const;
};

CommutativeSets detect_commutative_args(const Factor& factor);

/// RVs share a colour iff they have equal ranges and the same evidence
/// status. Throws kInvalidEvidence.
std::vector<Colour> initial_rv_colours(const FactorGraph& graph, const Evidence& evidence);

struct FactorColours {
  std::vector<Colour> colours;
  /// Per factor, the permutation aligning it to its class representative
  /// (identity for representatives).
  std::vector<Permutation> rearrangements;
  std::vector<std::size_t> representative;
};

/// Groups factors into exchangeability classes. Candidates are first split
/// by (arity, range groups, sorted potentials) and the detector only runs
/// against class representatives inside one such split. Throws
/// kBudgetExhausted if the detector gives up.
FactorColours initial_factor_colours(const FactorGraph& graph, const Detector& detector);

struct Colouring {
  std::vector<Colour> rv_colours;
  std::vector<Colour> factor_colours;
  std::vector<Permutation> rearrangements;
  std::vector<std::size_t> representative;
  std::size_t rounds = 0;
  /// Number of classes after initialisation and after every round.
  std::vector<std::size_t> rv_class_counts;
  std::vector<std::size_t> factor_class_counts;
};

/// Signature-based colour refinement, one `step()` per round.
class ColourRefinement {
 public:
  ColourRefinement(const FactorGraph& graph, const Evidence& evidence, const Detector& detector);

  /// One factor round followed by one rv round; false if neither grouping
  /// changed.
  bool step();

  const Colouring& colouring() const noexcept { return state_; }

 private:
  const FactorGraph* graph_;
  std::vector<Factor> aligned_;
  std::vector<CommutativeSets> commutative_;
  // Per rv: (factor, position in the aligned argument list) occurrences.
  std::vector<std::vector<std::pair<std::size_t, std::size_t>>> occurrences_;
  Colouring state_;
};

/// Runs refinement until the grouping is stable.
Colouring colour_pass(const FactorGraph& graph, const Evidence& evidence, const Detector& detector);

/// `rvclass <colour> <rv...>` and `factorclass <colour> <factor...> rep=<name>`
/// lines, sorted by colour.
std::string format_classes(const FactorGraph& graph, const Colouring& colouring);

/// The graph with every factor's arguments rearranged by its recorded
/// permutation and its table replaced by the representative's table.
FactorGraph aligned_graph(const FactorGraph& graph, const Colouring& colouring);

}  // namespace fgsym
