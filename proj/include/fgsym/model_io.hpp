#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "fgsym/factor_graph.hpp"

namespace fgsym {

/// Observed rvs: rv name -> value label.
using Evidence = std::map<std::string, std::string>;

/// Contents of a factor-graph text file.
///
///     # comment
///     range bool true false
///     rv A bool
///     factor phi1 A B : 1 2 3 4
///     evidence A true
struct Model {
  std::vector<RangePtr> ranges;
  FactorGraph graph;
  Evidence evidence;
};

/// Throws Error; errors raised while reading a line are reported as kParse
/// with the line number, except semantic errors (unknown rv, bad table
/// length, invalid evidence) which keep their own codes.
Model parse_model(std::string_view text, const PotentialPolicy& policy = {});
Model load_model(const std::filesystem::path& path, const PotentialPolicy& policy = {});

/// Writes `model` back in the text format using canonical decimals.
std::string write_model(const Model& model);

/// Throws kInvalidEvidence for unknown rvs or labels outside the rv's range.
void validate_evidence(const FactorGraph& graph, const Evidence& evidence);

}  // namespace fgsym
