#include "fgsym/model_io.hpp"

#include <fstream>
#include <sstream>
#include <unordered_map>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

std::vector<std::string> tokenize(std::string_view line) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.emplace_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

[[noreturn]] void fail(std::size_t line, const std::string& message, ErrorCode code = ErrorCode::kParse) {
  throw Error(code, "line " + std::to_string(line) + ": " + message);
}

}  // namespace

void validate_evidence(const FactorGraph& graph, const Evidence& evidence) {
  for (const auto& [rv, value] : evidence) {
    auto idx = graph.find_rv(rv);
    if (!idx) throw Error(ErrorCode::kInvalidEvidence, "evidence on unknown rv '" + rv + "'");
    if (!graph.rvs()[*idx].range->index_of(value)) {
      throw Error(ErrorCode::kInvalidEvidence, "value '" + value + "' is not in the range of '" + rv + "'");
    }
  }
}

Model parse_model(std::string_view text, const PotentialPolicy& policy) {
  Model model;
  std::unordered_map<std::string, RangePtr> ranges;
  std::unordered_map<std::string, RandomVariable> rvs;
  std::vector<RandomVariable> rv_order;
  std::vector<Factor> factors;
  std::vector<std::pair<std::size_t, std::pair<std::string, std::string>>> evidence_lines;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto tokens = tokenize(line);
    if (tokens.empty()) continue;
    const std::string& kind = tokens[0];

    try {
      if (kind == "range") {
        if (tokens.size() < 3) fail(line_no, "range needs a name and at least one value");
        if (ranges.contains(tokens[1])) fail(line_no, "duplicate range '" + tokens[1] + "'", ErrorCode::kDuplicateName);
        auto range = make_range(tokens[1], {tokens.begin() + 2, tokens.end()});
        ranges.emplace(tokens[1], range);
        model.ranges.push_back(std::move(range));
      } else if (kind == "rv") {
        if (tokens.size() != 3) fail(line_no, "rv needs a name and a range");
        auto it = ranges.find(tokens[2]);
        if (it == ranges.end()) fail(line_no, "unknown range '" + tokens[2] + "'");
        if (rvs.contains(tokens[1])) fail(line_no, "duplicate rv '" + tokens[1] + "'", ErrorCode::kDuplicateName);
        RandomVariable rv{tokens[1], it->second};
        rvs.emplace(rv.name, rv);
        rv_order.push_back(std::move(rv));
      } else if (kind == "factor") {
        std::size_t colon = 2;
        while (colon < tokens.size() && tokens[colon] != ":") ++colon;
        if (tokens.size() < 2 || colon >= tokens.size()) fail(line_no, "factor needs a name, arguments, ':' and potentials");
        std::vector<RandomVariable> args;
        for (std::size_t i = 2; i < colon; ++i) {
          auto it = rvs.find(tokens[i]);
          if (it == rvs.end()) fail(line_no, "unknown rv '" + tokens[i] + "'", ErrorCode::kUnknownRv);
          args.push_back(it->second);
        }
        const std::vector<std::string> potentials(tokens.begin() + static_cast<std::ptrdiff_t>(colon) + 1, tokens.end());
        factors.push_back(build_factor(tokens[1], std::move(args), potentials, policy));
      } else if (kind == "evidence") {
        if (tokens.size() != 3) fail(line_no, "evidence needs an rv and a value");
        evidence_lines.push_back({line_no, {tokens[1], tokens[2]}});
      } else {
        fail(line_no, "unknown directive '" + kind + "'");
      }
    } catch (const Error& e) {
      const std::string what = e.what();
      if (what.rfind("line ", 0) == 0) throw;
      fail(line_no, what, e.code());
    }
  }

  model.graph = FactorGraph(std::move(rv_order), std::move(factors));
  for (const auto& [line, ev] : evidence_lines) {
    Evidence single{{ev.first, ev.second}};
    try {
      validate_evidence(model.graph, single);
    } catch (const Error& e) {
      fail(line, e.what(), e.code());
    }
    auto [it, inserted] = model.evidence.emplace(ev.first, ev.second);
    if (!inserted && it->second != ev.second) {
      fail(line, "conflicting evidence for '" + ev.first + "'", ErrorCode::kInvalidEvidence);
    }
  }
  return model;
}

Model load_model(const std::filesystem::path& path, const PotentialPolicy& policy) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_model(buffer.str(), policy);
}

std::string write_model(const Model& model) {
  std::ostringstream out;
  for (const auto& range : model.ranges) {
    out << "range " << range->name;
    for (const auto& v : range->values) out << ' ' << v;
    out << '\n';
  }
  for (const auto& rv : model.graph.rvs()) out << "rv " << rv.name << ' ' << rv.range->name << '\n';
  for (const auto& f : model.graph.factors()) {
    out << "factor " << f.name();
    for (const auto& arg : f.args()) out << ' ' << arg.name;
    out << " :";
    for (const auto& p : f.table()) out << ' ' << p.to_string();
    out << '\n';
  }
  for (const auto& [rv, value] : model.evidence) out << "evidence " << rv << ' ' << value << '\n';
  return out.str();
}

}  // namespace fgsym
