#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fgsym/detect.hpp"
#include "fgsym/factor_graph.hpp"

namespace fgsym {

enum class InstanceKind { kExchangeable, kNonExchangeable };
std::string_view to_string(InstanceKind kind);
std::optional<InstanceKind> parse_instance_kind(std::string_view name);

struct InstanceSpec {
  std::size_t n = 1;  // Boolean arguments
  double p = 0.0;     // probability of the shared potential per row
  InstanceKind kind = InstanceKind::kExchangeable;
  std::uint64_t seed = 0;
};

/// Tables hold 2^n rows, so generated arities are capped.
inline constexpr std::size_t kMaxBenchArity = 24;

/// Factor `name` over Boolean rvs R1..Rn. Each row independently gets the
/// shared potential 1 with probability p, otherwise the next unused value
/// from 2, 3, ... in row order. Throws kStateSpaceTooLarge beyond
/// kMaxBenchArity.
Factor gen_factor(std::size_t n, double p, std::uint64_t seed, std::string name = "phi1");

struct ExchangeablePair {
  Factor first;
  Factor second;
  Permutation hidden;  // second == permute_args(first, hidden)
};

struct NonExchangeablePair {
  Factor first;
  Factor second;
};

ExchangeablePair gen_exchangeable_pair(const InstanceSpec& spec);

/// A permuted copy with one row replaced by a value absent from the
/// first factor. Throws kDegenerateInstance for n = 0.
NonExchangeablePair gen_nonexchangeable_pair(const InstanceSpec& spec);

/// Per-instance seed: splitmix64 folded over the master seed, n, the bits
/// of p, the kind and the replicate index, in that order.
std::uint64_t instance_seed(std::uint64_t master, std::size_t n, double p, InstanceKind kind,
                            std::size_t replicate);

struct BenchConfig {
  std::vector<std::size_t> n_list;
  std::vector<double> p_list;
  std::vector<InstanceKind> kinds;
  std::size_t seeds = 10;  // replicates per cell
  std::vector<Algorithm> algorithms;
  Budget budget;
  std::size_t jobs = 1;
  std::uint64_t master_seed = 0;
};

inline constexpr std::uint64_t kDefaultMasterSeed = 20240101;

/// n in {2, 4, ..., 16}, p in {0, .1, .2, .5, .8, .9, 1}, both kinds, every
/// algorithm, 10 replicates and a budget of 10^6 table comparisons.
BenchConfig default_bench_config();

struct BenchRecord {
  Algorithm algorithm = Algorithm::kDeft;
  std::size_t n = 0;
  double p = 0.0;
  InstanceKind kind = InstanceKind::kExchangeable;
  std::uint64_t seed = 0;
  Verdict verdict = Verdict::kNotExchangeable;
  std::uint64_t table_comparisons = 0;
  std::uint64_t candidates = 0;
  std::uint64_t time_ns = 0;
  bool budget_exhausted = false;
};

/// Throws kInvalidConfig for empty lists, zero replicates or jobs, n = 0
/// or p outside [0, 1].
void validate_config(const BenchConfig& config);

/// One record per (cell, replicate, algorithm), sorted by
/// (n, p, kind, seed, algorithm) regardless of `config.jobs`.
std::vector<BenchRecord> run_benchmark(const BenchConfig& config);

/// Shortest round-trip decimal, shared by every CSV column holding a double.
std::string format_double(double value);

std::string records_csv(const std::vector<BenchRecord>& records);

/// Per (algorithm, n, p, kind): instance count, completed count, exchangeable
/// verdicts and means over the completed records (empty when none completed).
std::string aggregate_csv(const std::vector<BenchRecord>& records);

/// Writes `out` and `<out>.agg.csv`; throws kIo.
void write_benchmark(const std::vector<BenchRecord>& records, const std::filesystem::path& out);

}  // namespace fgsym
