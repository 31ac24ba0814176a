#include <gtest/gtest.h>

#include <random>

#include "fgsym/detect.hpp"
#include "fgsym/error.hpp"
#include "oracles.hpp"

using namespace fgsym;

namespace {

std::vector<Potential> ints(std::initializer_list<int> values) {
  std::vector<Potential> out;
  for (int v : values) out.push_back(Potential::from_integer(v));
  return out;
}

Factor first() { return Factor("phi1", oracle::boolean_args(3, "R"), ints({1, 2, 3, 4, 5, 6, 6, 7})); }

Factor second() {
  std::vector<RandomVariable> args{{"R4", boolean_range()}, {"R5", boolean_range()}, {"R6", boolean_range()}};
  return Factor("phi2", args, ints({1, 3, 5, 6, 2, 4, 6, 7}));
}

std::size_t composite(const BucketIndex& index, std::initializer_list<std::uint32_t> counts) {
  return index.composite_of({Bucket{counts}});
}

std::vector<std::size_t> targets(const Permutation& p) { return {p.targets().begin(), p.targets().end()}; }

Factor random_pair_member(std::mt19937_64& rng, std::vector<RandomVariable> args, int distinct) {
  return oracle::random_factor(rng, "f", std::move(args), distinct);
}

}  // namespace

TEST(Verify, TripleWitness) {
  EXPECT_TRUE(verify_permutation(first(), second(), Permutation({2, 0, 1})));
  EXPECT_FALSE(verify_permutation(first(), second(), Permutation({1, 0, 2})));
  Counters c;
  verify_permutation(first(), second(), Permutation::identity(3), &c);
  EXPECT_EQ(c.table_comparisons, 1u);
}

TEST(Verify, Errors) {
  Factor binary("b", oracle::boolean_args(2), ints({1, 2, 3, 4}));
  EXPECT_THROW(verify_permutation(first(), binary, Permutation::identity(2)), Error);
  EXPECT_THROW(verify_permutation(first(), second(), Permutation::identity(2)), Error);
  auto tri = make_range("t", {"a", "b", "c"});
  Factor mixed("m", {{"A", boolean_range()}, {"T", tri}}, ints({1, 2, 3, 4, 5, 6}));
  try {
    verify_permutation(mixed, mixed, Permutation({1, 0}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRangeMismatch);
  }
}

TEST(CandidateSwaps, SingleEntryOfBucket21) {
  const Factor f1 = first(), f2 = second();
  BucketIndex i1(f1), i2(f2);
  const auto b = composite(i1, {2, 1});
  // Second's bucket reads <3, 5, 2>; each entry constrains on its own.
  EXPECT_EQ(candidate_swaps_at(i1, i2, b, 0).to_string(), "{1->{1,3}, 2->{1,3}, 3->{2}}");
  EXPECT_EQ(candidate_swaps_at(i1, i2, b, 1).to_string(), "{1->{2,3}, 2->{1}, 3->{2,3}}");
  EXPECT_EQ(candidate_swaps_at(i1, i2, b, 2).to_string(), "{1->{3}, 2->{1,2}, 3->{1,2}}");
  EXPECT_THROW(candidate_swaps_at(i1, i2, b, 3), Error);
  EXPECT_EQ(candidate_swaps(i1, i2, b).to_string(), "{1->{3}, 2->{1}, 3->{2}}");
}

TEST(CandidateSwaps, AmbiguousBucket12) {
  const Factor f1 = first(), f2 = second();
  BucketIndex i1(f1), i2(f2);
  const auto map = candidate_swaps(i1, i2, composite(i1, {1, 2}));
  EXPECT_EQ(map.to_string(), "{1->{2,3}, 2->{1}, 3->{2,3}}");
  const auto perms = enumerate_rearrangements(map);
  ASSERT_EQ(perms.size(), 2u);
  EXPECT_EQ(targets(perms[0]), (std::vector<std::size_t>{1, 0, 2}));
  EXPECT_FALSE(verify_permutation(f1, f2, perms[0]));
  EXPECT_EQ(targets(perms[1]), (std::vector<std::size_t>{2, 0, 1}));
  EXPECT_TRUE(verify_permutation(f1, f2, perms[1]));
}

TEST(CandidateSwaps, MultisetMismatchThrows) {
  const Factor f1 = first();
  const Factor f3("phi3", oracle::boolean_args(3, "S"), ints({1, 2, 3, 4, 5, 6, 8, 7}));
  BucketIndex i1(f1), i3(f3);
  try {
    candidate_swaps(i1, i3, composite(i1, {1, 2}));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMultisetMismatch);
  }
}

TEST(CandidateMap, IntersectAndEnumerate) {
  auto a = CandidateMap::from_lists({{0, 1}, {0, 1}, {2}});
  auto b = CandidateMap::from_lists({{1}, {0, 1}, {1, 2}});
  std::vector<CandidateMap> maps{a, b};
  auto both = intersect_candidates(maps);
  ASSERT_TRUE(both);
  EXPECT_EQ(both->to_string(), "{1->{2}, 2->{1,2}, 3->{3}}");
  const auto perms = enumerate_rearrangements(*both);
  ASSERT_EQ(perms.size(), 1u);
  EXPECT_EQ(targets(perms[0]), (std::vector<std::size_t>{1, 0, 2}));
  std::vector<CandidateMap> clash{CandidateMap::from_lists({{0}}), CandidateMap::from_lists({{1}})};
  EXPECT_FALSE(intersect_candidates(clash));
}

TEST(Enumerator, FullMapGivesAllPermutationsInOrder) {
  const auto perms = enumerate_rearrangements(CandidateMap::from_lists({{0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}, {0, 1, 2, 3}}));
  ASSERT_EQ(perms.size(), 24u);
  std::vector<std::size_t> expected{0, 1, 2, 3};
  for (const auto& p : perms) {
    ASSERT_EQ(targets(p), expected);
    std::next_permutation(expected.begin(), expected.end());
  }
  EXPECT_EQ(enumerate_rearrangements(CandidateMap::from_lists({{0}, {0}})).size(), 0u);
  EXPECT_EQ(enumerate_rearrangements(CandidateMap{}).size(), 1u);
}

TEST(Deft, TripleRegression) {
  const auto r = deft_exchangeable(first(), second());
  ASSERT_EQ(r.verdict, Verdict::kExchangeable);
  EXPECT_EQ(targets(*r.witness), (std::vector<std::size_t>{2, 0, 1}));
  ASSERT_TRUE(r.candidate_map);
  EXPECT_EQ(r.candidate_map->to_string(), "{1->{3}, 2->{1}, 3->{2}}");
  EXPECT_EQ(r.counters.table_comparisons, 1u);
}

TEST(Deft, BucketCapOneStillCorrect) {
  // A single bucket in the intersection keeps the verdict.
  const auto r = deft_exchangeable(first(), second(), {}, DeftOptions{1});
  ASSERT_EQ(r.verdict, Verdict::kExchangeable);
  EXPECT_TRUE(verify_permutation(first(), second(), *r.witness));
}

TEST(Baselines, AgreeOnTriple) {
  for (auto algo : {Algorithm::kNaive, Algorithm::kAcp, Algorithm::kDeft}) {
    const auto r = detect(algo, first(), second());
    ASSERT_EQ(r.verdict, Verdict::kExchangeable) << to_string(algo);
    EXPECT_TRUE(oracle::is_witness(first(), second(), targets(*r.witness)));
  }
  EXPECT_TRUE(bucket_filter(first(), second()));
}

TEST(Baselines, BudgetExhaustion) {
  // phi2 = phi1 rearranged so that the naive scan needs more than one try.
  Budget tight;
  tight.max_table_comparisons = 1;
  const auto r = naive_exchangeable(first(), second(), tight);
  EXPECT_EQ(r.verdict, Verdict::kBudgetExhausted);
  EXPECT_EQ(r.counters.table_comparisons, 1u);
  Budget none;
  none.max_table_comparisons = 0;
  EXPECT_EQ(deft_exchangeable(first(), second(), none).verdict, Verdict::kBudgetExhausted);
  Budget instant;
  instant.deadline = std::chrono::nanoseconds(0);
  EXPECT_EQ(acp_exchangeable(first(), second(), instant).verdict, Verdict::kBudgetExhausted);
}

TEST(Baselines, StructuralRejections) {
  Factor binary("b", oracle::boolean_args(2), ints({1, 2, 3, 4}));
  auto tri = make_range("t", {"a", "b", "c"});
  Factor other("o", {{"A", boolean_range()}, {"T", tri}}, ints({1, 2, 3, 4, 5, 6}));
  Factor other2("p", {{"T", tri}, {"A", boolean_range()}}, ints({1, 2, 3, 4, 5, 6}));
  for (auto algo : {Algorithm::kNaive, Algorithm::kAcp, Algorithm::kDeft}) {
    EXPECT_EQ(detect(algo, first(), binary).verdict, Verdict::kNotExchangeable);
    EXPECT_EQ(detect(algo, binary, other).verdict, Verdict::kNotExchangeable);
  }
  EXPECT_FALSE(align_groups(binary, other));
  EXPECT_TRUE(align_groups(other, other2));
}

TEST(Algorithm, Names) {
  for (auto algo : {Algorithm::kNaive, Algorithm::kAcp, Algorithm::kDeft}) {
    EXPECT_EQ(parse_algorithm(to_string(algo)), algo);
  }
  EXPECT_FALSE(parse_algorithm("fast"));
  EXPECT_EQ(to_string(Verdict::kBudgetExhausted), "budget_exhausted");
}

// Random pairs, half of them rearranged copies, over one or two ranges.
class RandomPairs : public ::testing::TestWithParam<int> {};

TEST_P(RandomPairs, DetectorsMatchOracle) {
  std::mt19937_64 rng(1000 + GetParam());
  auto tri = make_range("t", {"a", "b", "c"});
  for (int iter = 0; iter < 150; ++iter) {
    const std::size_t n = 1 + rng() % 4;
    std::vector<RandomVariable> args;
    const bool mixed = GetParam() % 2 == 1;
    for (std::size_t i = 0; i < n; ++i) args.push_back({"V" + std::to_string(i), mixed && rng() % 2 ? tri : boolean_range()});
    const int distinct = 1 + static_cast<int>(rng() % 4);
    Factor f1 = random_pair_member(rng, args, distinct);
    Factor f2 = f1;
    if (rng() % 2) {
      std::vector<std::size_t> perm(n);
      std::iota(perm.begin(), perm.end(), 0);
      std::shuffle(perm.begin(), perm.end(), rng);
      f2 = permute_args(f1, Permutation(perm));
      if (rng() % 3 == 0) {
        std::vector<Potential> t(f2.table().begin(), f2.table().end());
        std::swap(t[rng() % t.size()], t[rng() % t.size()]);
        f2 = Factor("g", {f2.args().begin(), f2.args().end()}, t);
      }
    } else {
      f2 = random_pair_member(rng, args, distinct);
    }

    const bool expected = oracle::exchangeable(f1, f2);
    const auto witnesses = oracle::all_witnesses(f1, f2);
    for (auto algo : {Algorithm::kNaive, Algorithm::kAcp, Algorithm::kDeft}) {
      const auto r = detect(algo, f1, f2);
      ASSERT_EQ(r.exchangeable(), expected) << to_string(algo) << " iter " << iter;
      if (expected) ASSERT_TRUE(oracle::is_witness(f1, f2, targets(*r.witness)));
    }
    // Filters never reject a true pair.
    if (expected) ASSERT_TRUE(bucket_filter(f1, f2));

    const auto r = deft_exchangeable(f1, f2);
    if (r.candidate_map && !r.candidate_map->has_empty()) {
      for (const auto& w : witnesses) {
        for (std::size_t i = 0; i < n; ++i) ASSERT_TRUE((*r.candidate_map)[i] & position_bit(w[i]));
      }
    }
    if (!mixed && bucket_filter(f1, f2)) {
      ASSERT_LE(r.counters.table_comparisons, std::min(dof_factor(f1), dof_factor(f2)));
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Seeds, RandomPairs, ::testing::Range(0, 6));
