#include "fgsym/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <ostream>
#include <sstream>

#include "fgsym/benchgen.hpp"
#include "fgsym/buckets.hpp"
#include "fgsym/colour_passing.hpp"
#include "fgsym/detect.hpp"
#include "fgsym/error.hpp"
#include "fgsym/model_io.hpp"

namespace fgsym {
namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIo: return kExitIo;
    case ErrorCode::kBudgetExhausted: return kExitBudgetExhausted;
    case ErrorCode::kInvalidConfig: return kExitUsage;
    default: return kExitParse;
  }
}

PotentialPolicy policy_from(const std::string& tolerance) {
  PotentialPolicy policy;
  if (tolerance.empty()) return policy;
  try {
    policy.epsilon = Potential::parse(tolerance);
  } catch (const Error&) {
    throw UsageError("--tolerance must be a positive decimal, got '" + tolerance + "'");
  }
  return policy;
}

Algorithm algorithm_from(const std::string& name) {
  auto algo = parse_algorithm(name);
  if (!algo) throw UsageError("unknown algorithm '" + name + "'");
  return *algo;
}

const Factor& factor_named(const Model& model, const std::string& name) {
  auto idx = model.graph.find_factor(name);
  if (!idx) throw UsageError("no factor named '" + name + "'");
  return model.graph.factors()[*idx];
}

std::string join_names(std::span<const RandomVariable> args) {
  std::string s;
  for (const auto& a : args) s += (s.empty() ? "" : " ") + a.name;
  return s;
}

std::string join_potentials(const std::vector<Potential>& values) {
  std::string s = "<";
  for (std::size_t i = 0; i < values.size(); ++i) s += (i ? ", " : "") + values[i].to_string();
  return s + ">";
}

std::string format_dof(Dof dof) { return dof == kDofSaturated ? ">=" + std::to_string(kDofSaturated) : std::to_string(dof); }

struct DetectArgs {
  std::string file, first, second, algo = "deft", tolerance;
  std::optional<std::uint64_t> budget;
};

int cmd_detect(const DetectArgs& a, std::ostream& out) {
  const Algorithm algo = algorithm_from(a.algo);
  const Model model = load_model(a.file, policy_from(a.tolerance));
  const Factor& first = factor_named(model, a.first);
  const Factor& second = factor_named(model, a.second);

  Budget budget;
  budget.max_table_comparisons = a.budget;
  const auto result = detect(algo, first, second, budget);

  out << "verdict: " << to_string(result.verdict) << '\n';
  if (result.witness) {
    const Factor target = permute_args(second, *result.witness);
    out << "witness: " << join_names(target.args()) << '\n';
    out << "mapping:";
    for (std::size_t i = 0; i < result.witness->size(); ++i) out << ' ' << i + 1 << "->" << (*result.witness)[i] + 1;
    out << '\n';
  }
  if (result.candidate_map) out << "candidate_map: " << result.candidate_map->to_string() << '\n';
  out << "table_comparisons: " << result.counters.table_comparisons << '\n'
      << "bucket_comparisons: " << result.counters.bucket_comparisons << '\n'
      << "candidates: " << result.counters.candidates << '\n'
      << "time_ns: " << result.elapsed.count() << '\n';

  switch (result.verdict) {
    case Verdict::kExchangeable: return kExitExchangeable;
    case Verdict::kNotExchangeable: return kExitNotExchangeable;
    case Verdict::kBudgetExhausted: return kExitBudgetExhausted;
  }
  return kExitInternal;
}

int cmd_inspect(const std::string& file, const std::string& name, const std::string& tolerance, std::ostream& out) {
  const Model model = load_model(file, policy_from(tolerance));
  const Factor& factor = factor_named(model, name);

  out << "factor " << factor.name() << '(' << join_names(factor.args()) << ")\n";
  bool informative = false;
  for (const auto& group : partition_args_by_range(factor)) {
    out << "group " << group.range->name << ':';
    for (auto pos : group.positions) out << ' ' << factor.arg(pos).name;
    out << '\n';
    const BucketIndex index(factor, {group});
    for (std::size_t b = 0; b < index.bucket_count(); ++b) {
      const auto values = index.ordered(b);
      informative = informative || values.size() > 1;
      out << "  " << index.key(b).front().to_string() << ' ' << join_potentials(values)
          << " F=" << format_dof(degree_of_freedom(values)) << '\n';
    }
  }
  if (informative) {
    out << "F(φ)=" << format_dof(dof_factor(factor)) << '\n';
  } else {
    out << "no buckets with |φ(b)|>1; F=1\n";
  }
  return kExitOk;
}

int cmd_lift(const std::string& file, const std::string& algo, std::optional<std::uint64_t> budget,
             const std::string& tolerance, std::ostream& out) {
  Detector detector{algorithm_from(algo), {}};
  detector.budget.max_table_comparisons = budget;
  const Model model = load_model(file, policy_from(tolerance));
  const auto colouring = colour_pass(model.graph, model.evidence, detector);
  out << format_classes(model.graph, colouring);
  return kExitOk;
}

struct BenchArgs {
  std::vector<std::size_t> n_list;
  std::vector<double> p_list;
  std::vector<std::string> kinds;
  std::size_t seeds = 10;
  std::vector<std::string> algos;
  std::optional<std::uint64_t> budget_comparisons;
  std::optional<double> deadline_secs;
  std::string out = "bench.csv";
  std::size_t jobs = 1;
  std::uint64_t master_seed = kDefaultMasterSeed;
};

int cmd_bench(const BenchArgs& a, std::ostream& out) {
  BenchConfig config = default_bench_config();
  if (!a.n_list.empty()) config.n_list = a.n_list;
  if (!a.p_list.empty()) config.p_list = a.p_list;
  if (!a.kinds.empty()) {
    config.kinds.clear();
    for (const auto& k : a.kinds) {
      auto kind = parse_instance_kind(k);
      if (!kind) throw UsageError("unknown instance kind '" + k + "'");
      config.kinds.push_back(*kind);
    }
  }
  if (!a.algos.empty()) {
    config.algorithms.clear();
    for (const auto& name : a.algos) config.algorithms.push_back(algorithm_from(name));
  }
  config.seeds = a.seeds;
  if (a.budget_comparisons) config.budget.max_table_comparisons = *a.budget_comparisons;
  if (a.deadline_secs) {
    if (!(*a.deadline_secs > 0)) throw UsageError("--deadline-secs must be positive");
    config.budget.deadline = std::chrono::duration_cast<std::chrono::nanoseconds>(
        std::chrono::duration<double>(*a.deadline_secs));
  }
  config.jobs = a.jobs;
  config.master_seed = a.master_seed;

  const auto records = run_benchmark(config);
  write_benchmark(records, a.out);
  const auto exhausted = std::count_if(records.begin(), records.end(), [](const auto& r) { return r.budget_exhausted; });
  out << "records: " << records.size() << '\n'
      << "budget_exhausted: " << exhausted << '\n'
      << "wrote: " << a.out << ' ' << a.out << ".agg.csv\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Exchangeable-factor detection and colour passing for factor graphs", "fgsym"};
  app.require_subcommand(1);

  DetectArgs det;
  auto* detect_cmd = app.add_subcommand("detect", "Test two factors of one file for exchangeability");
  detect_cmd->add_option("file", det.file, "Factor-graph file")->required();
  detect_cmd->add_option("first", det.first, "First factor")->required();
  detect_cmd->add_option("second", det.second, "Second factor")->required();
  detect_cmd->add_option("--algo", det.algo, "naive, acp or deft")->capture_default_str();
  detect_cmd->add_option("--budget", det.budget, "Maximum full-table comparisons");
  detect_cmd->add_option("--tolerance", det.tolerance, "Round potentials to multiples of this value");

  std::string inspect_file, inspect_factor, inspect_tolerance;
  auto* inspect_cmd = app.add_subcommand("inspect", "Print the buckets of one factor");
  inspect_cmd->add_option("file", inspect_file, "Factor-graph file")->required();
  inspect_cmd->add_option("factor", inspect_factor, "Factor name")->required();
  inspect_cmd->add_option("--tolerance", inspect_tolerance, "Round potentials to multiples of this value");

  std::string lift_file, lift_algo = "deft", lift_tolerance;
  std::optional<std::uint64_t> lift_budget;
  auto* lift_cmd = app.add_subcommand("lift", "Group rvs and factors by colour passing");
  lift_cmd->add_option("file", lift_file, "Factor-graph file")->required();
  lift_cmd->add_option("--algo", lift_algo, "naive, acp or deft")->capture_default_str();
  lift_cmd->add_option("--budget", lift_budget, "Maximum full-table comparisons per detection");
  lift_cmd->add_option("--tolerance", lift_tolerance, "Round potentials to multiples of this value");

  BenchArgs bench;
  auto* bench_cmd = app.add_subcommand("bench", "Run the seeded benchmark grid and write CSV");
  bench_cmd->add_option("--n-list", bench.n_list, "Argument counts")->delimiter(',');
  bench_cmd->add_option("--p-list", bench.p_list, "Shared-potential probabilities")->delimiter(',');
  bench_cmd->add_option("--kinds", bench.kinds, "exchangeable and/or non-exchangeable")->delimiter(',');
  bench_cmd->add_option("--seeds", bench.seeds, "Replicates per cell")->capture_default_str();
  bench_cmd->add_option("--algos", bench.algos, "Algorithms to run")->delimiter(',');
  bench_cmd->add_option("--budget-comparisons", bench.budget_comparisons,
                        "Maximum full-table comparisons per detection (default 1000000)");
  bench_cmd->add_option("--deadline-secs", bench.deadline_secs, "Wall-clock limit per detection");
  bench_cmd->add_option("--out", bench.out, "Records CSV path")->capture_default_str();
  bench_cmd->add_option("--jobs", bench.jobs, "Worker threads")->capture_default_str();
  bench_cmd->add_option("--master-seed", bench.master_seed, "Seed of the whole grid")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*detect_cmd) return cmd_detect(det, out);
    if (*inspect_cmd) return cmd_inspect(inspect_file, inspect_factor, inspect_tolerance, out);
    if (*lift_cmd) return cmd_lift(lift_file, lift_algo, lift_budget, lift_tolerance, out);
    if (*bench_cmd) return cmd_bench(bench, out);
  } catch (const UsageError& e) {
    err << "fgsym: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "fgsym: " << to_string(e.code()) << ": " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    err << "fgsym: internal error: " << e.what() << '\n';
    return kExitInternal;
  }
  return kExitUsage;
}

}  // namespace fgsym
