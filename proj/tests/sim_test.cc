#include "focal/sim.h"

#include <cmath>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "focal/error.h"

namespace focal::sim {
namespace {

SimSpec Spec(std::vector<CriterionProfile> profile, double noise, std::size_t steps,
             std::uint64_t seed = 1) {
  SimSpec s;
  s.profile = std::move(profile);
  s.noise_scale = noise;
  s.steps = steps;
  s.seed = seed;
  return s;
}

TEST(GenerateScores, NoiselessScoresDependOnlyOnCriterion) {
  SimEnvironment env(Spec({{0.3, 1.0}, {0.75, 1.0}}, 0.0, 1));
  const auto t = GenerateScores(env, Rubric::Uniform(2), 5);
  for (std::size_t i = 0; i < 5; ++i) {
    for (std::size_t j = 0; j < 5; ++j) {
      if (i == j) continue;
      EXPECT_DOUBLE_EQ(t(i, j, 0), 3.0);
      EXPECT_DOUBLE_EQ(t(i, j, 1), 7.5);
    }
  }
  for (double r : GroupRewards(std::vector<double>{1.0, 1.0}, t, 1.0)) EXPECT_EQ(r, 0.0);
}

TEST(GenerateScores, FullAbilityHitsCeiling) {
  SimEnvironment env(Spec({{1.0, 1.0}, {1.0, 0.1}}, 0.0, 1));
  const auto t = GenerateScores(env, Rubric::Uniform(2, 7.0), 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      if (i != j) {
        EXPECT_EQ(t(i, j, 0), 7.0);
        EXPECT_EQ(t(i, j, 1), 7.0);
      }
    }
  }
}

TEST(GenerateScores, DeterministicUnderSeed) {
  const SimSpec spec = SimSpec::DefaultHeterogeneous();
  SimEnvironment a(spec), b(spec);
  const Rubric r = Rubric::Uniform(3);
  EXPECT_EQ(GenerateScores(a, r, 8), GenerateScores(b, r, 8));
  EXPECT_EQ(GenerateScores(a, r, 8), GenerateScores(b, r, 8));
  SimSpec other = spec;
  other.seed = 2;
  SimEnvironment c(other);
  SimEnvironment d(spec);
  EXPECT_FALSE(GenerateScores(c, r, 8) == GenerateScores(d, r, 8));
}

TEST(GenerateScores, ScoresStayInRange) {
  SimEnvironment env(Spec({{0.02, 1.0}, {0.98, 1.0}}, 0.5, 1));
  const auto t = GenerateScores(env, Rubric::Uniform(2), 8);
  EXPECT_NO_THROW(t.Validate(10.0));
}

TEST(GenerateScores, Errors) {
  SimEnvironment env(Spec({{0.5, 1.0}}, 0.1, 1));
  EXPECT_THROW(GenerateScores(env, Rubric::Uniform(2), 4), Error);
  EXPECT_THROW(GenerateScores(env, Rubric::Uniform(1), 1), Error);
}

TEST(StepEnv, UpdateRule) {
  SimEnvironment env(Spec({{1.0, 1.0}, {0.2, 0.5}, {0.6, 0.5}}, 0.1, 1));
  const std::vector<double> w = {1.0, 1.0, 0.0};
  const auto next = StepEnv(env, w, 0.1);
  EXPECT_EQ(next.abilities()[0], 1.0);  // no headroom
  EXPECT_DOUBLE_EQ(next.abilities()[1], 0.2 + 0.1 * 0.5 * 0.5 * 0.8);
  EXPECT_EQ(next.abilities()[2], 0.6);  // no pressure
  EXPECT_EQ(next.step_count(), 1u);
  EXPECT_EQ(env.abilities()[1], 0.2);  // input untouched
}

TEST(StepEnv, UniformWeightsScaleWithHeadroom) {
  SimEnvironment env(Spec({{0.2, 1.0}, {0.6, 1.0}}, 0.1, 1));
  const auto next = StepEnv(env, std::vector<double>{2.0, 2.0}, 0.3);
  const double d0 = next.abilities()[0] - 0.2;
  const double d1 = next.abilities()[1] - 0.6;
  EXPECT_NEAR(d0, 0.3 * 0.5 * 0.8, 1e-15);
  EXPECT_NEAR(d1, 0.3 * 0.5 * 0.4, 1e-15);
  EXPECT_NEAR(d0 / d1, 2.0, 1e-12);
}

TEST(StepEnv, ZeroWeightsWarnAndKeepState) {
  SimEnvironment env(Spec({{0.2, 1.0}, {0.6, 1.0}}, 0.1, 1));
  std::vector<std::string> warnings;
  const auto next = StepEnv(env, std::vector<double>{0.0, 0.0}, 0.1,
                            [&](std::string_view m) { warnings.emplace_back(m); });
  EXPECT_EQ(next.abilities(), env.abilities());
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(StepEnv(env, std::vector<double>{-1.0, 1.0}, 0.1), Error);
  EXPECT_THROW(StepEnv(env, std::vector<double>{1.0}, 0.1), Error);
}

TEST(SimSpec, Validate) {
  EXPECT_NO_THROW(SimSpec::DefaultHeterogeneous().Validate());
  EXPECT_THROW(Spec({}, 0.1, 1).Validate(), Error);
  EXPECT_THROW(Spec({{1.5, 1.0}}, 0.1, 1).Validate(), Error);
  EXPECT_THROW(Spec({{0.5, 0.0}}, 0.1, 1).Validate(), Error);
  EXPECT_THROW(Spec({{0.5, 1.0}}, -0.1, 1).Validate(), Error);
  SimSpec small = Spec({{0.5, 1.0}}, 0.1, 1);
  small.group_size = 1;
  EXPECT_THROW(small.Validate(), Error);
}

TEST(Mode, NamesRoundTrip) {
  for (Mode m : {Mode::kStatic, Mode::kFocal, Mode::kNoFrontier, Mode::kFrozen}) {
    EXPECT_EQ(ParseMode(ModeName(m)), m);
  }
  EXPECT_THROW(ParseMode("dynamic"), Error);
}

TEST(RunExperiment, FocalLiftsHardCriterion) {
  const SimSpec spec = SimSpec::DefaultHeterogeneous();
  const Rubric r = Rubric::Uniform(3);
  const auto stat = RunExperiment(spec, r, SynthesisConfig{}, Mode::kStatic);
  const auto focal = RunExperiment(spec, r, SynthesisConfig{}, Mode::kFocal);
  ASSERT_EQ(stat.buckets[0], Bucket::kHard);
  ASSERT_EQ(stat.buckets[1], Bucket::kMedium);
  ASSERT_EQ(stat.buckets[2], Bucket::kEasy);
  EXPECT_GT(focal.final().abilities[0], stat.final().abilities[0]);
}

TEST(RunExperiment, IdenticalCriteriaNoiselessMakeModesCoincide) {
  const SimSpec spec = Spec({{0.3, 0.7}, {0.3, 0.7}, {0.3, 0.7}}, 0.0, 50);
  const Rubric r = Rubric::Uniform(3);
  const auto stat = RunExperiment(spec, r, SynthesisConfig{}, Mode::kStatic);
  const auto focal = RunExperiment(spec, r, SynthesisConfig{}, Mode::kFocal);
  ASSERT_EQ(stat.steps.size(), focal.steps.size());
  for (std::size_t t = 0; t < stat.steps.size(); ++t) {
    for (std::size_t k = 0; k < 3; ++k) {
      EXPECT_NEAR(stat.steps[t].abilities[k], focal.steps[t].abilities[k], 1e-9);
      EXPECT_NEAR(focal.steps[t].weights[k], 1.0, 1e-12);
    }
  }
}

TEST(RunExperiment, ZeroStepsRecordsInitialStateOnly) {
  SimSpec spec = SimSpec::DefaultHeterogeneous();
  spec.steps = 0;
  const auto rec = RunExperiment(spec, Rubric::Uniform(3), SynthesisConfig{}, Mode::kFocal);
  ASSERT_EQ(rec.steps.size(), 1u);
  EXPECT_EQ(rec.steps[0].step, 0u);
  EXPECT_EQ(rec.steps[0].abilities, (std::vector<double>{0.2, 0.5, 0.9}));
}

TEST(RunExperiment, DeterministicAndMonotone) {
  SimSpec spec = SimSpec::DefaultHeterogeneous();
  spec.steps = 60;
  spec.seed = 9;
  const Rubric r = Rubric::Uniform(3);
  for (Mode m : {Mode::kStatic, Mode::kFocal, Mode::kNoFrontier, Mode::kFrozen}) {
    const auto a = RunExperiment(spec, r, SynthesisConfig{}, m);
    const auto b = RunExperiment(spec, r, SynthesisConfig{}, m);
    ASSERT_EQ(a.steps.size(), 61u);
    for (std::size_t t = 0; t < a.steps.size(); ++t) {
      EXPECT_EQ(a.steps[t].abilities, b.steps[t].abilities);
      EXPECT_EQ(a.steps[t].weights, b.steps[t].weights);
      EXPECT_EQ(a.steps[t].saturation, b.steps[t].saturation);
      if (t > 0) {
        for (std::size_t k = 0; k < 3; ++k) {
          EXPECT_GE(a.steps[t].abilities[k], a.steps[t - 1].abilities[k]);
          EXPECT_LE(a.steps[t].abilities[k], 1.0);
        }
      }
    }
  }
}

TEST(RunExperiment, FrozenKeepsInitialWeightsAndStaticKeepsBase) {
  SimSpec spec = SimSpec::DefaultHeterogeneous();
  spec.steps = 30;
  const Rubric r = Rubric::Uniform(3);
  const auto frozen = RunExperiment(spec, r, SynthesisConfig{}, Mode::kFrozen);
  const auto stat = RunExperiment(spec, r, SynthesisConfig{}, Mode::kStatic);
  for (const auto& step : frozen.steps) EXPECT_EQ(step.weights, frozen.steps[0].weights);
  EXPECT_NE(frozen.steps[0].weights, r.base_weights());
  for (const auto& step : stat.steps) EXPECT_EQ(step.weights, r.base_weights());
}

TEST(RunExperiment, PassRatesAreFractionsOrNanForEmptyBuckets) {
  SimSpec spec = Spec({{0.2, 0.3}, {0.3, 0.3}}, 0.1, 5);
  const auto rec = RunExperiment(spec, Rubric::Uniform(2), SynthesisConfig{}, Mode::kFocal);
  for (const auto& step : rec.steps) {
    EXPECT_GE(step.pass_rate_hard, 0.0);
    EXPECT_LE(step.pass_rate_hard, 1.0);
    EXPECT_TRUE(std::isnan(step.pass_rate_easy));
    EXPECT_TRUE(std::isnan(step.pass_rate_medium));
  }
}

TEST(RunExperiment, RubricMustMatchProfile) {
  EXPECT_THROW(RunExperiment(SimSpec::DefaultHeterogeneous(), Rubric::Uniform(2),
                             SynthesisConfig{}, Mode::kFocal),
               Error);
}

}  // namespace
}  // namespace focal::sim
