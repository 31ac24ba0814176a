#include <gtest/gtest.h>

#include <random>

#include "fgsym/colour_passing.hpp"
#include "fgsym/error.hpp"
#include "fgsym/model_io.hpp"
#include "oracles.hpp"

using namespace fgsym;

namespace {

const char* kChain = R"(range bool true false
rv A bool
rv B bool
rv C bool
factor phi1 A B : 1 2 3 4
factor phi2 C B : 1 2 3 4
)";

const char* kChainPermuted = R"(range bool true false
rv A bool
rv B bool
rv C bool
factor phi1 A B : 1 2 3 4
factor phi2 B C : 1 3 2 4
)";

std::vector<Potential> ints(std::initializer_list<int> values) {
  std::vector<Potential> out;
  for (int v : values) out.push_back(Potential::from_integer(v));
  return out;
}

}  // namespace

TEST(ColourPassing, ChainGroupsOuterRvs) {
  auto m = parse_model(kChain);
  auto c = colour_pass(m.graph, m.evidence, {});
  EXPECT_EQ(format_classes(m.graph, c), "rvclass 0 A C\nrvclass 1 B\nfactorclass 0 phi1 phi2 rep=phi1\n");
}

TEST(ColourPassing, PermutedChainSameClasses) {
  auto a = parse_model(kChain);
  auto b = parse_model(kChainPermuted);
  auto ca = colour_pass(a.graph, a.evidence, {});
  auto cb = colour_pass(b.graph, b.evidence, {});
  EXPECT_EQ(format_classes(a.graph, ca), format_classes(b.graph, cb));
  EXPECT_EQ(cb.rearrangements[1], Permutation({1, 0}));
  EXPECT_TRUE(semantics_equivalent(a.graph, b.graph));
  EXPECT_TRUE(semantics_equivalent(b.graph, aligned_graph(b.graph, cb)));
}

TEST(ColourPassing, EvidenceSplitsClasses) {
  auto m = parse_model(std::string(kChain) + "evidence A true\n");
  auto c = colour_pass(m.graph, m.evidence, {});
  EXPECT_NE(c.rv_colours[0], c.rv_colours[2]);
  EXPECT_NE(c.factor_colours[0], c.factor_colours[1]);
  EXPECT_EQ(c.rv_class_counts.back(), 3u);
}

TEST(ColourPassing, InvalidEvidenceThrows) {
  auto m = parse_model(kChain);
  Evidence bad{{"Z", "true"}};
  EXPECT_THROW(colour_pass(m.graph, bad, {}), Error);
}

TEST(ColourPassing, EmptyGraph) {
  FactorGraph g;
  auto c = colour_pass(g, {}, {});
  EXPECT_EQ(format_classes(g, c), "");
}

TEST(ColourPassing, DifferentTablesStayApart) {
  auto m = parse_model("range bool true false\nrv A bool\nrv B bool\nfactor f A : 1 2\nfactor g B : 1 3\n");
  auto c = colour_pass(m.graph, m.evidence, {});
  EXPECT_NE(c.factor_colours[0], c.factor_colours[1]);
  EXPECT_NE(c.rv_colours[0], c.rv_colours[1]);
}

TEST(ColourPassing, BudgetExhaustionThrows) {
  auto m = parse_model(kChainPermuted);
  Detector d{Algorithm::kNaive, {}};
  d.budget.max_table_comparisons = 1;
  try {
    colour_pass(m.graph, m.evidence, d);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kBudgetExhausted);
  }
}

TEST(ColourPassing, RoundsStabilise) {
  auto m = parse_model(kChain);
  ColourRefinement r(m.graph, m.evidence, {});
  EXPECT_EQ(r.colouring().rv_class_counts.front(), 1u);
  EXPECT_TRUE(r.step());
  EXPECT_FALSE(r.step());
  EXPECT_EQ(r.colouring().rounds, 2u);
  EXPECT_EQ(r.colouring().rv_class_counts.back(), 2u);
}

TEST(CommutativeArgs, SymmetricTable) {
  // Symmetric in the first two arguments only.
  Factor f("f", oracle::boolean_args(3), ints({1, 2, 3, 4, 3, 4, 5, 6}));
  auto sets = detect_commutative_args(f);
  ASSERT_EQ(sets.sets.size(), 2u);
  EXPECT_EQ(sets.sets[0], (std::vector<std::size_t>{0, 1}));
  EXPECT_TRUE(sets.commutative(0));
  EXPECT_FALSE(sets.commutative(2));
  Factor g("g", oracle::boolean_args(3), ints({1, 1, 1, 1, 1, 1, 1, 1}));
  EXPECT_EQ(detect_commutative_args(g).sets.size(), 1u);
}

TEST(CommutativeArgs, MatchesOracleProperty) {
  std::mt19937_64 rng(21);
  for (int iter = 0; iter < 200; ++iter) {
    const std::size_t n = 1 + rng() % 4;
    Factor f = oracle::random_factor(rng, "f", oracle::boolean_args(n), 2);
    auto sets = detect_commutative_args(f);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) {
        std::vector<std::size_t> swap(n);
        std::iota(swap.begin(), swap.end(), 0);
        std::swap(swap[i], swap[j]);
        bool together = false;
        for (const auto& s : sets.sets) {
          const bool hi = std::find(s.begin(), s.end(), i) != s.end();
          const bool hj = std::find(s.begin(), s.end(), j) != s.end();
          if (hi && hj) together = true;
        }
        ASSERT_EQ(together, oracle::is_witness(f, f, swap)) << iter;
      }
    }
  }
}

TEST(ColourPassing, SoundnessProperty) {
  std::mt19937_64 rng(33);
  for (int iter = 0; iter < 60; ++iter) {
    const std::size_t rvs = 2 + rng() % 4;
    auto all = oracle::boolean_args(rvs, "V");
    std::vector<Factor> factors;
    const std::size_t count = 1 + rng() % 4;
    for (std::size_t k = 0; k < count; ++k) {
      const std::size_t arity = 1 + rng() % std::min<std::size_t>(3, rvs);
      std::vector<std::size_t> pick(rvs);
      std::iota(pick.begin(), pick.end(), 0);
      std::shuffle(pick.begin(), pick.end(), rng);
      std::vector<RandomVariable> args;
      for (std::size_t i = 0; i < arity; ++i) args.push_back(all[pick[i]]);
      factors.push_back(oracle::random_factor(rng, "f" + std::to_string(k), args, 2));
    }
    FactorGraph g(all, factors);
    auto c = colour_pass(g, {}, {});
    for (std::size_t a = 0; a < factors.size(); ++a) {
      for (std::size_t b = 0; b < factors.size(); ++b) {
        if (c.factor_colours[a] == c.factor_colours[b]) ASSERT_TRUE(oracle::exchangeable(factors[a], factors[b]));
      }
    }
    ASSERT_EQ(oracle::state_products(g), oracle::state_products(aligned_graph(g, c)));
  }
}
