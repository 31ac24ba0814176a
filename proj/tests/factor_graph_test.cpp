#include <gtest/gtest.h>

#include <random>

#include "fgsym/error.hpp"
#include "fgsym/factor_graph.hpp"
#include "oracles.hpp"

using namespace fgsym;

namespace {

std::vector<Potential> ints(std::initializer_list<int> values) {
  std::vector<Potential> out;
  for (int v : values) out.push_back(Potential::from_integer(v));
  return out;
}

template <class F>
ErrorCode code_of(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kIo;
}

}  // namespace

TEST(Range, ValidatesLabels) {
  EXPECT_EQ(code_of([] { make_range("r", {}); }), ErrorCode::kInvalidRange);
  EXPECT_EQ(code_of([] { make_range("r", {"a", "a"}); }), ErrorCode::kInvalidRange);
  auto r = make_range("colour", {"red", "green", "blue"});
  EXPECT_EQ(r->index_of("green"), 1u);
  EXPECT_FALSE(r->index_of("pink"));
  EXPECT_EQ(*make_range("other", {"true", "false"}), *boolean_range());
}

TEST(Permutation, InverseAndValidation) {
  Permutation p({2, 0, 1});
  EXPECT_EQ(p.inverse(), Permutation({1, 2, 0}));
  EXPECT_FALSE(p.is_identity());
  EXPECT_TRUE(Permutation::identity(4).is_identity());
  EXPECT_EQ(code_of([] { Permutation({0, 0, 1}); }), ErrorCode::kNotAPermutation);
  EXPECT_EQ(code_of([] { Permutation({0, 3}); }), ErrorCode::kNotAPermutation);
}

TEST(Factor, CanonicalRowOrder) {
  auto bool3 = make_range("b3", {"x", "y", "z"});
  Factor f("f", {{"A", boolean_range()}, {"B", bool3}}, ints({1, 2, 3, 4, 5, 6}));
  EXPECT_EQ(f.row_index(std::vector<std::size_t>{0, 2}), 2u);
  EXPECT_EQ(f.row_index(std::vector<std::size_t>{1, 0}), 3u);
  EXPECT_EQ(f.assignment_of(4), (Assignment{1, 1}));
  EXPECT_EQ(f.lookup(std::vector<std::size_t>{1, 2}), Potential::from_integer(6));
  EXPECT_EQ(code_of([&] { f.row_index(std::vector<std::size_t>{2, 0}); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([&] { f.row_index(std::vector<std::size_t>{0}); }), ErrorCode::kIndexOutOfRange);
  EXPECT_EQ(code_of([&] { f.assignment_of(6); }), ErrorCode::kIndexOutOfRange);
}

TEST(Factor, RejectsWrongTableLength) {
  EXPECT_EQ(code_of([] { Factor("f", oracle::boolean_args(2), ints({1, 2, 3})); }), ErrorCode::kLengthMismatch);
  EXPECT_EQ(code_of([] { Factor("f", {{"A", nullptr}}, ints({1})); }), ErrorCode::kUnknownRv);
}

TEST(Factor, BuildFactorParsesText) {
  std::vector<std::string> text{"1", "0.5", "2", "1.0"};
  auto f = build_factor("f", oracle::boolean_args(2), text);
  EXPECT_EQ(f.at(0), f.at(3));
  std::vector<std::string> bad{"1", "0", "2", "1"};
  EXPECT_EQ(code_of([&] { build_factor("f", oracle::boolean_args(2), bad); }), ErrorCode::kNonPositivePotential);
}

TEST(PermuteArgs, MovesArgumentsAndKeepsRows) {
  // Swapping the arguments of a binary factor transposes its table.
  Factor f("f", oracle::boolean_args(2), ints({1, 2, 3, 4}));
  Factor g = permute_args(f, Permutation({1, 0}));
  EXPECT_EQ(g.arg(0).name, "X2");
  EXPECT_EQ(g.arg(1).name, "X1");
  EXPECT_EQ(std::vector<Potential>(g.table().begin(), g.table().end()), ints({1, 3, 2, 4}));
}

TEST(PermuteArgs, PropertyAgainstOracle) {
  std::mt19937_64 rng(11);
  auto tri = make_range("t", {"a", "b", "c"});
  for (int iter = 0; iter < 200; ++iter) {
    std::vector<RandomVariable> args;
    const std::size_t n = 1 + rng() % 4;
    for (std::size_t i = 0; i < n; ++i) args.push_back({"V" + std::to_string(i), rng() % 2 ? tri : boolean_range()});
    Factor f = oracle::random_factor(rng, "f", args, 5);
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Factor g = permute_args(f, Permutation(perm));
    // g lists f's arguments in a new order, so f lines up with g via perm.
    ASSERT_TRUE(oracle::is_witness(g, f, perm));
    Factor back = permute_args(g, Permutation(perm).inverse());
    ASSERT_TRUE(std::equal(back.table().begin(), back.table().end(), f.table().begin()));
  }
}

TEST(FactorGraph, ValidatesNames) {
  auto args = oracle::boolean_args(2);
  Factor f("f", args, ints({1, 2, 3, 4}));
  EXPECT_EQ(code_of([&] { FactorGraph({args[0], args[0]}, {}); }), ErrorCode::kDuplicateName);
  EXPECT_EQ(code_of([&] { FactorGraph({args[0]}, {f}); }), ErrorCode::kUnknownRv);
  EXPECT_EQ(code_of([&] { FactorGraph(args, {f, f}); }), ErrorCode::kDuplicateName);
  FactorGraph g(args, {f});
  EXPECT_EQ(g.find_rv("X2"), 1u);
  EXPECT_EQ(g.find_factor("f"), 0u);
  EXPECT_FALSE(g.find_factor("h"));
}

TEST(JointTable, ProductOfFactors) {
  auto args = oracle::boolean_args(2);
  FactorGraph g(args, {Factor("f", {args[0]}, ints({2, 3})), Factor("h", args, ints({1, 2, 3, 4}))});
  auto j = joint_table(g);
  ASSERT_EQ(j.values.size(), 4u);
  EXPECT_DOUBLE_EQ(j.values[0], 2.0);
  EXPECT_DOUBLE_EQ(j.values[1], 4.0);
  EXPECT_DOUBLE_EQ(j.values[2], 9.0);
  EXPECT_DOUBLE_EQ(j.values[3], 12.0);
  EXPECT_EQ(code_of([&] { joint_table(g, 3); }), ErrorCode::kStateSpaceTooLarge);
}

TEST(SemanticsEquivalent, NormalisationAndMismatch) {
  auto args = oracle::boolean_args(2);
  FactorGraph a(args, {Factor("f", args, ints({1, 2, 3, 4}))});
  FactorGraph b(args, {Factor("f", args, ints({2, 4, 6, 8}))});
  FactorGraph c(args, {Factor("f", args, ints({1, 3, 2, 4}))});
  EXPECT_TRUE(semantics_equivalent(a, b));
  EXPECT_FALSE(semantics_equivalent(a, c));
  FactorGraph d(oracle::boolean_args(3), {});
  EXPECT_EQ(code_of([&] { semantics_equivalent(a, d); }), ErrorCode::kRvMismatch);
}
