#include "fgsym/benchgen.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <charconv>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <thread>
#include <tuple>

#include "fgsym/error.hpp"

namespace fgsym {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t mix(std::uint64_t h, std::uint64_t v) { return splitmix64(h ^ splitmix64(v)); }

// std::mt19937_64 has a standardised output sequence, but the standard
// distributions do not, so draws are derived from raw outputs here.
double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

std::uint64_t below(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  for (;;) {
    const std::uint64_t x = rng();
    if (x < limit) return x % bound;
  }
}

// Independent streams for the table, the permutation and the perturbation.
enum Stream : std::uint64_t { kTable = 0, kPermutation = 1, kPerturbation = 2 };

std::mt19937_64 stream(std::uint64_t seed, Stream s) { return std::mt19937_64(mix(seed, s)); }

Permutation random_permutation(std::size_t n, std::uint64_t seed) {
  auto rng = stream(seed, kPermutation);
  std::vector<std::size_t> targets(n);
  for (std::size_t i = 0; i < n; ++i) targets[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(targets[i - 1], targets[below(rng, i)]);
  return Permutation(std::move(targets));
}

struct InstanceJob {
  std::size_t n;
  double p;
  InstanceKind kind;
  std::uint64_t seed;
};

std::pair<Factor, Factor> make_pair(const InstanceJob& job) {
  const InstanceSpec spec{job.n, job.p, job.kind, job.seed};
  if (job.kind == InstanceKind::kExchangeable) {
    auto pair = gen_exchangeable_pair(spec);
    return {std::move(pair.first), std::move(pair.second)};
  }
  auto pair = gen_nonexchangeable_pair(spec);
  return {std::move(pair.first), std::move(pair.second)};
}

auto record_key(const BenchRecord& r) { return std::make_tuple(r.n, r.p, r.kind, r.seed, r.algorithm); }

}  // namespace

std::string_view to_string(InstanceKind kind) {
  return kind == InstanceKind::kExchangeable ? "exchangeable" : "non-exchangeable";
}

std::optional<InstanceKind> parse_instance_kind(std::string_view name) {
  if (name == "exchangeable") return InstanceKind::kExchangeable;
  if (name == "non-exchangeable") return InstanceKind::kNonExchangeable;
  return std::nullopt;
}

Factor gen_factor(std::size_t n, double p, std::uint64_t seed, std::string name) {
  if (n > kMaxBenchArity) throw Error(ErrorCode::kStateSpaceTooLarge, "benchmark arity too large");
  std::vector<RandomVariable> args;
  for (std::size_t i = 0; i < n; ++i) args.push_back({"R" + std::to_string(i + 1), boolean_range()});

  auto rng = stream(seed, kTable);
  const std::size_t rows = std::size_t{1} << n;
  std::vector<Potential> table;
  table.reserve(rows);
  std::int64_t fresh = 2;
  for (std::size_t r = 0; r < rows; ++r) {
    const bool shared = unit_draw(rng) < p;
    table.push_back(Potential::from_integer(shared ? 1 : fresh++));
  }
  return Factor(std::move(name), std::move(args), std::move(table));
}

ExchangeablePair gen_exchangeable_pair(const InstanceSpec& spec) {
  Factor first = gen_factor(spec.n, spec.p, spec.seed, "phi1");
  Permutation hidden = random_permutation(spec.n, spec.seed);
  Factor second = permute_args(first, hidden).renamed("phi2");
  return {std::move(first), std::move(second), std::move(hidden)};
}

NonExchangeablePair gen_nonexchangeable_pair(const InstanceSpec& spec) {
  if (spec.n == 0) throw Error(ErrorCode::kDegenerateInstance, "a nullary factor cannot be perturbed");
  auto pair = gen_exchangeable_pair(spec);
  auto rng = stream(spec.seed, kPerturbation);
  std::vector<Potential> table(pair.second.table().begin(), pair.second.table().end());
  std::int64_t fresh = 0;
  for (const auto& v : table) fresh = std::max(fresh, static_cast<std::int64_t>(v.value()));
  // The new value occurs nowhere in the first factor, so the bucket of the
  // replaced row can no longer carry the same multiset.
  table[below(rng, table.size())] = Potential::from_integer(fresh + 1);
  std::vector<RandomVariable> args(pair.second.args().begin(), pair.second.args().end());
  return {std::move(pair.first), Factor("phi2", std::move(args), std::move(table))};
}

std::uint64_t instance_seed(std::uint64_t master, std::size_t n, double p, InstanceKind kind,
                            std::size_t replicate) {
  std::uint64_t h = splitmix64(master);
  h = mix(h, n);
  h = mix(h, std::bit_cast<std::uint64_t>(p));
  h = mix(h, static_cast<std::uint64_t>(kind));
  return mix(h, replicate);
}

BenchConfig default_bench_config() {
  BenchConfig c;
  for (std::size_t n = 2; n <= 16; n += 2) c.n_list.push_back(n);
  c.p_list = {0.0, 0.1, 0.2, 0.5, 0.8, 0.9, 1.0};
  c.kinds = {InstanceKind::kExchangeable, InstanceKind::kNonExchangeable};
  c.algorithms = {Algorithm::kNaive, Algorithm::kAcp, Algorithm::kDeft};
  c.budget.max_table_comparisons = 1'000'000;
  c.master_seed = kDefaultMasterSeed;
  return c;
}

void validate_config(const BenchConfig& config) {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::kInvalidConfig, what); };
  if (config.n_list.empty() || config.p_list.empty() || config.kinds.empty() || config.algorithms.empty()) {
    fail("benchmark lists must be nonempty");
  }
  if (config.seeds == 0) fail("at least one replicate per cell is required");
  if (config.jobs == 0) fail("at least one job is required");
  for (auto n : config.n_list) {
    if (n == 0) fail("n must be at least 1");
    if (n > kMaxBenchArity) fail("n must be at most " + std::to_string(kMaxBenchArity));
  }
  for (auto p : config.p_list) {
    if (!(p >= 0.0 && p <= 1.0)) fail("p must lie in [0, 1]");
  }
}

std::vector<BenchRecord> run_benchmark(const BenchConfig& config) {
  validate_config(config);
  std::vector<InstanceJob> jobs;
  for (auto n : config.n_list) {
    for (auto p : config.p_list) {
      for (auto kind : config.kinds) {
        for (std::size_t r = 0; r < config.seeds; ++r) {
          jobs.push_back({n, p, kind, instance_seed(config.master_seed, n, p, kind, r)});
        }
      }
    }
  }

  const std::size_t per_job = config.algorithms.size();
  std::vector<BenchRecord> records(jobs.size() * per_job);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::atomic<bool> failed{false};

  auto worker = [&] {
    for (;;) {
      const std::size_t j = next.fetch_add(1);
      if (j >= jobs.size() || failed.load()) return;
      try {
        const auto& job = jobs[j];
        const auto [first, second] = make_pair(job);
        for (std::size_t a = 0; a < per_job; ++a) {
          const auto res = detect(config.algorithms[a], first, second, config.budget);
          auto& rec = records[j * per_job + a];
          rec = {config.algorithms[a], job.n, job.p, job.kind, job.seed, res.verdict,
                 res.counters.table_comparisons, res.counters.candidates,
                 static_cast<std::uint64_t>(res.elapsed.count()), res.verdict == Verdict::kBudgetExhausted};
        }
      } catch (...) {
        if (!failed.exchange(true)) failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t threads = std::min(config.jobs, std::max<std::size_t>(jobs.size(), 1));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  std::stable_sort(records.begin(), records.end(),
                   [](const BenchRecord& a, const BenchRecord& b) { return record_key(a) < record_key(b); });
  return records;
}

std::string format_double(double value) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, end);
}

std::string records_csv(const std::vector<BenchRecord>& records) {
  std::ostringstream out;
  out << "algorithm,n,p,kind,seed,verdict,table_comparisons,candidates,time_ns,budget_exhausted\n";
  for (const auto& r : records) {
    out << to_string(r.algorithm) << ',' << r.n << ',' << format_double(r.p) << ',' << to_string(r.kind) << ','
        << r.seed << ',' << to_string(r.verdict) << ',' << r.table_comparisons << ',' << r.candidates << ','
        << r.time_ns << ',' << (r.budget_exhausted ? "true" : "false") << '\n';
  }
  return out.str();
}

std::string aggregate_csv(const std::vector<BenchRecord>& records) {
  struct Cell {
    std::size_t instances = 0;
    std::size_t completed = 0;
    std::size_t exchangeable = 0;
    double comparisons = 0;
    double candidates = 0;
    double time_ns = 0;
  };
  std::map<std::tuple<std::size_t, double, InstanceKind, Algorithm>, Cell> cells;
  for (const auto& r : records) {
    auto& c = cells[{r.n, r.p, r.kind, r.algorithm}];
    ++c.instances;
    if (r.budget_exhausted) continue;
    ++c.completed;
    if (r.verdict == Verdict::kExchangeable) ++c.exchangeable;
    c.comparisons += static_cast<double>(r.table_comparisons);
    c.candidates += static_cast<double>(r.candidates);
    c.time_ns += static_cast<double>(r.time_ns);
  }

  std::ostringstream out;
  out << "algorithm,n,p,kind,instances,completed,exchangeable,mean_table_comparisons,mean_candidates,mean_time_ns\n";
  for (const auto& [key, c] : cells) {
    const auto& [n, p, kind, algorithm] = key;
    out << to_string(algorithm) << ',' << n << ',' << format_double(p) << ',' << to_string(kind) << ','
        << c.instances << ',' << c.completed << ',' << c.exchangeable;
    if (c.completed == 0) {
      out << ",,,\n";
      continue;
    }
    const auto k = static_cast<double>(c.completed);
    out << ',' << format_double(c.comparisons / k) << ',' << format_double(c.candidates / k) << ','
        << format_double(c.time_ns / k) << '\n';
  }
  return out.str();
}

void write_benchmark(const std::vector<BenchRecord>& records, const std::filesystem::path& out) {
  auto write = [](const std::filesystem::path& path, const std::string& text) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw Error(ErrorCode::kIo, "cannot open '" + path.string() + "' for writing");
    file << text;
    file.close();
    if (!file) throw Error(ErrorCode::kIo, "failed to write '" + path.string() + "'");
  };
  write(out, records_csv(records));
  write(out.string() + ".agg.csv", aggregate_csv(records));
}

}  // namespace fgsym
