#include "focal/rubric.h"

#include <cmath>
#include <functional>
#include <random>

#include <gtest/gtest.h>

#include "focal/error.h"
#include "focal/random_instances.h"
#include "oracles.h"

namespace focal {
namespace {

ScoreTensor TwoRollouts(std::vector<double> s12, std::vector<double> s21) {
  ScoreTensor t(2, s12.size());
  for (std::size_t k = 0; k < s12.size(); ++k) {
    t.Set(0, 1, k, s12[k]);
    t.Set(1, 0, k, s21[k]);
  }
  return t;
}

ErrorCode CodeOf(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::kIo;
}

TEST(Rubric, ValidatesCriteria) {
  EXPECT_EQ(CodeOf([] { Rubric({}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Rubric({{"a"}, {"a"}}); }), ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Rubric({{"a", CriterionKind::kPrinciple, -1.0}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Rubric({{"a", CriterionKind::kPrinciple, 0.0}}); }),
            ErrorCode::kInvalidArgument);
  EXPECT_EQ(CodeOf([] { Rubric({{"a"}}, 0.0); }), ErrorCode::kInvalidArgument);

  const Rubric r({{"a", CriterionKind::kPrinciple, 0.25}, {"b", CriterionKind::kHardRule, 0.0}});
  EXPECT_EQ(r.size(), 2u);
  EXPECT_DOUBLE_EQ(r.base_mass(), 0.25);
  EXPECT_EQ(Rubric::Uniform(3)[2].id, "c2");
}

TEST(ScoreTensor, RejectsDiagonalAndOutOfRangePairs) {
  ScoreTensor t(3, 2);
  EXPECT_EQ(CodeOf([&] { t.Set(1, 1, 0, 5.0); }), ErrorCode::kInvalidPair);
  EXPECT_EQ(CodeOf([&] { t.Set(0, 3, 0, 5.0); }), ErrorCode::kInvalidPair);
  EXPECT_EQ(CodeOf([&] { t.Validate(10.0); }), ErrorCode::kIncomplete);
}

TEST(ScoreTensor, ValidateChecksRange) {
  ScoreTensor t = TwoRollouts({11.0}, {3.0});
  EXPECT_EQ(CodeOf([&] { t.Validate(10.0); }), ErrorCode::kOutOfRange);
  t.Set(0, 1, 0, 10.0);
  EXPECT_NO_THROW(t.Validate(10.0));
  EXPECT_FALSE(ScoreTensor(2, 1).IsPairComplete(0, 1));
}

TEST(WeightedScore, Examples) {
  const std::vector<double> w = {0.5, 0.5};
  const std::vector<double> s = {8.0, 6.0};
  EXPECT_DOUBLE_EQ(WeightedScore(w, s), 7.0);
  EXPECT_DOUBLE_EQ(WeightedScore(std::vector<double>(4, 1.0), std::vector<double>(4, 0.0)), 0.0);
  EXPECT_DOUBLE_EQ(WeightedScore(std::vector<double>{0.0, 1.0}, std::vector<double>{9.0, 4.0}),
                   4.0);
  EXPECT_EQ(CodeOf([&] { WeightedScore(w, std::vector<double>{1.0}); }),
            ErrorCode::kDimensionMismatch);
}

TEST(PairwiseMargin, ExampleAndAntisymmetry) {
  const ScoreTensor t = TwoRollouts({8.0, 6.0}, {4.0, 6.0});
  const std::vector<double> w = {0.5, 0.5};
  EXPECT_DOUBLE_EQ(PairwiseMargin(w, t, 0, 1), 2.0);
  EXPECT_DOUBLE_EQ(PairwiseMargin(w, t, 1, 0), -2.0);

  const ScoreTensor sym = TwoRollouts({3.0, 7.0}, {3.0, 7.0});
  EXPECT_EQ(PairwiseMargin(w, sym, 0, 1), 0.0);

  random::Rng rng(11);
  for (int n = 0; n < 200; ++n) {
    const auto g = random::UniformIndex(rng, 2, 6);
    const auto k = random::UniformIndex(rng, 1, 8);
    const auto tensor = random::UniformTensor(rng, g, k, 10.0);
    const auto weights = random::SparseWeights(rng, k);
    const auto i = random::UniformIndex(rng, 0, g - 1);
    const auto j = (i + random::UniformIndex(rng, 1, g - 1)) % g;
    EXPECT_EQ(PairwiseMargin(weights, tensor, i, j), -PairwiseMargin(weights, tensor, j, i));
  }
}

TEST(PhiTau, Branches) {
  EXPECT_EQ(PhiTau(2.0, 1.0), 2);
  EXPECT_EQ(PhiTau(0.0, 1.0), 0);
  EXPECT_EQ(PhiTau(0.0, 1e-9), 0);
  EXPECT_EQ(PhiTau(-0.5, 1.0), -1);
  EXPECT_EQ(PhiTau(1.0, 1.0), 2);  // |delta| >= tau is decisive
  EXPECT_EQ(PhiTau(-1.0, 1.0), -2);
  EXPECT_EQ(PhiTau(0.999, 1.0), 1);
  EXPECT_EQ(CodeOf([] { PhiTau(1.0, 0.0); }), ErrorCode::kInvalidArgument);
}

TEST(GroupRewards, TwoRolloutsDecisive) {
  const ScoreTensor t = TwoRollouts({8.0, 6.0}, {4.0, 6.0});
  const auto r = GroupRewards(std::vector<double>{0.5, 0.5}, t, 1.0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r[0], 2.0);
  EXPECT_EQ(r[1], -2.0);
}

TEST(GroupRewards, SymmetricScoresGiveZero) {
  ScoreTensor t(4, 2);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 4; ++j) {
      if (i == j) continue;
      t.Set(i, j, 0, 5.0);
      t.Set(i, j, 1, 2.0);
    }
  }
  for (double r : GroupRewards(std::vector<double>{1.0, 3.0}, t, 1.0)) EXPECT_EQ(r, 0.0);
}

TEST(GroupRewards, Errors) {
  const ScoreTensor one(1, 2);
  EXPECT_EQ(CodeOf([&] { GroupRewards(std::vector<double>{1.0, 1.0}, one, 1.0); }),
            ErrorCode::kInsufficientGroup);
  const ScoreTensor t = TwoRollouts({1.0, 2.0}, {2.0, 1.0});
  EXPECT_EQ(CodeOf([&] { GroupRewards(std::vector<double>{1.0}, t, 1.0); }),
            ErrorCode::kDimensionMismatch);
}

TEST(GroupRewards, MatchesOracleAndSumsToZero) {
  random::Rng rng(5);
  for (int n = 0; n < 500; ++n) {
    const auto g = random::UniformIndex(rng, 2, 8);
    const auto k = random::UniformIndex(rng, 1, 12);
    // Half-point scores make identical pair vectors, hence exact ties, common.
    const auto tensor = random::UniformTensor(rng, g, k, 10.0, n % 2 == 0 ? 0.5 : 0.0);
    const auto weights = random::SparseWeights(rng, k);
    const double tau = random::Uniform(rng, 0.1, 3.0);
    const auto got = GroupRewards(weights, tensor, tau);
    const auto want = oracle::Rewards(weights, tensor, tau);
    double total = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      total += got[i];
      EXPECT_EQ(got[i], static_cast<double>(want[i])) << "instance " << n;
    }
    EXPECT_EQ(total, 0.0);
  }
}

TEST(GroupAdvantage, Examples) {
  const auto a = GroupAdvantage(std::vector<double>{1.0, 2.0, 3.0});
  const double z = 1.0 / std::sqrt(2.0 / 3.0);
  EXPECT_NEAR(a[0], -z, 1e-12);
  EXPECT_NEAR(a[1], 0.0, 1e-12);
  EXPECT_NEAR(a[2], z, 1e-12);
  EXPECT_NEAR(a[2], 1.224745, 1e-6);

  for (double v : GroupAdvantage(std::vector<double>{4.0, 4.0, 4.0})) EXPECT_EQ(v, 0.0);

  const auto b = GroupAdvantage(std::vector<double>{2.0, -2.0});
  EXPECT_DOUBLE_EQ(b[0], 1.0);
  EXPECT_DOUBLE_EQ(b[1], -1.0);
}

TEST(GroupAdvantage, FloorAppliesBelowThreshold) {
  const auto a = GroupAdvantage(std::vector<double>{1.0, 1.0 + 1e-10}, 1e-8);
  for (double v : a) EXPECT_EQ(v, 0.0);
  const auto b = GroupAdvantage(std::vector<double>{1.0, 1.0 + 1e-10}, 1e-12);
  EXPECT_NEAR(b[1], 1.0, 1e-6);
}

TEST(SynthesisConfig, Validate) {
  SynthesisConfig c;
  EXPECT_NO_THROW(c.Validate());
  c.tau = 0.0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.temperature = -1.0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.epsilon = 0.0;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
  c = {};
  c.gamma = -0.5;
  EXPECT_EQ(CodeOf([&] { c.Validate(); }), ErrorCode::kInvalidArgument);
}

}  // namespace
}  // namespace focal
