#include "focal/sim.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>

#include <fmt/format.h>

#include "focal/error.h"

namespace focal::sim {

void SimSpec::Validate() const {
  if (profile.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "simulation needs at least one criterion");
  }
  for (std::size_t k = 0; k < profile.size(); ++k) {
    const auto& p = profile[k];
    if (!(p.initial_ability >= 0.0 && p.initial_ability <= 1.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("criterion {} initial ability {} outside [0, 1]", k,
                              p.initial_ability));
    }
    if (!(p.rate > 0.0)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("criterion {} rate must be positive", k));
    }
  }
  if (!(noise_scale >= 0.0) || !std::isfinite(noise_scale)) {
    throw Error(ErrorCode::kInvalidArgument, "noise_scale must be nonnegative");
  }
  if (!(learning_rate > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "learning_rate must be positive");
  }
  if (group_size < 2) {
    throw Error(ErrorCode::kInsufficientGroup, "simulation needs group_size >= 2");
  }
}

SimSpec SimSpec::DefaultHeterogeneous() {
  SimSpec spec;
  spec.profile = {
      {0.2, 0.2},  // hard: low start, slow to improve
      {0.5, 0.5},  // medium
      {0.9, 1.0},  // easy: near the ceiling, quick to saturate
  };
  return spec;
}

SimEnvironment::SimEnvironment(const SimSpec& spec)
    : noise_scale_(spec.noise_scale), rng_(spec.seed) {
  spec.Validate();
  abilities_.reserve(spec.profile.size());
  rates_.reserve(spec.profile.size());
  for (const auto& p : spec.profile) {
    abilities_.push_back(p.initial_ability);
    rates_.push_back(p.rate);
  }
}

ScoreTensor GenerateScores(SimEnvironment& env, const Rubric& rubric,
                           std::size_t group_size) {
  if (group_size < 2) {
    throw Error(ErrorCode::kInsufficientGroup, "score generation needs G >= 2");
  }
  const std::size_t k_count = env.abilities().size();
  if (rubric.size() != k_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("rubric has {} criteria, environment has {}",
                            rubric.size(), k_count));
  }
  const double s_max = rubric.s_max();
  const double noise = env.noise_scale();
  const double comparison_noise = kComparisonNoisePerQualityNoise * noise;
  auto& rng = env.rng();

  std::vector<double> quality(group_size * k_count);
  std::normal_distribution<double> quality_dist(0.0, noise > 0.0 ? noise : 1.0);
  for (std::size_t i = 0; i < group_size; ++i) {
    for (std::size_t k = 0; k < k_count; ++k) {
      const double perturb = noise > 0.0 ? quality_dist(rng) : 0.0;
      quality[i * k_count + k] = std::clamp(env.abilities()[k] + perturb, 0.0, 1.0);
    }
  }

  ScoreTensor tensor(group_size, k_count);
  std::normal_distribution<double> judge_dist(
      0.0, comparison_noise > 0.0 ? comparison_noise : 1.0);
  for (std::size_t i = 0; i < group_size; ++i) {
    for (std::size_t j = 0; j < group_size; ++j) {
      if (i == j) continue;
      auto pair = tensor.MutablePair(i, j);
      for (std::size_t k = 0; k < k_count; ++k) {
        const double jitter = comparison_noise > 0.0 ? judge_dist(rng) : 0.0;
        pair[k] = std::clamp(s_max * quality[i * k_count + k] + jitter, 0.0, s_max);
      }
    }
  }
  return tensor;
}

SimEnvironment StepEnv(const SimEnvironment& env,
                       std::span<const double> applied_weights,
                       double learning_rate,
                       const std::function<void(std::string_view)>& warn) {
  if (applied_weights.size() != env.abilities_.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "applied weights must have one entry per criterion");
  }
  double total = 0.0;
  for (double w : applied_weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument, "applied weights must be nonnegative");
    }
    total += w;
  }
  SimEnvironment next = env;
  if (total == 0.0) {
    if (warn) warn("all applied weights are zero; environment left unchanged");
    return next;
  }
  for (std::size_t k = 0; k < next.abilities_.size(); ++k) {
    double& ability = next.abilities_[k];
    ability += learning_rate * (applied_weights[k] / total) * next.rates_[k] *
               (1.0 - ability);
    ability = std::clamp(ability, 0.0, 1.0);
  }
  ++next.step_count_;
  return next;
}

std::string_view ModeName(Mode mode) {
  switch (mode) {
    case Mode::kStatic:
      return "static";
    case Mode::kFocal:
      return "focal";
    case Mode::kNoFrontier:
      return "no-frontier";
    case Mode::kFrozen:
      return "frozen";
  }
  return "unknown";
}

Mode ParseMode(std::string_view name) {
  if (name == "static") return Mode::kStatic;
  if (name == "focal") return Mode::kFocal;
  if (name == "no-frontier") return Mode::kNoFrontier;
  if (name == "frozen") return Mode::kFrozen;
  throw Error(ErrorCode::kInvalidArgument, fmt::format("unknown mode '{}'", name));
}

namespace {

double BucketPassRate(const CriterionMeans& means,
                      const std::vector<Bucket>& buckets, Bucket which) {
  std::vector<double> scores;
  for (std::size_t k = 0; k < buckets.size(); ++k) {
    if (buckets[k] != which) continue;
    for (std::size_t i = 0; i < means.rows(); ++i) scores.push_back(means(i, k));
  }
  if (scores.empty()) return std::numeric_limits<double>::quiet_NaN();
  return PassRate(scores, DefaultPassThreshold(which));
}

}  // namespace

TrajectoryRecord RunExperiment(const SimSpec& spec, const Rubric& rubric,
                               const SynthesisConfig& config, Mode mode) {
  spec.Validate();
  config.Validate();
  if (rubric.size() != spec.num_criteria()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("rubric has {} criteria, simulation has {}",
                            rubric.size(), spec.num_criteria()));
  }
  SimEnvironment env(spec);
  TrajectoryRecord record;
  record.mode = mode;
  record.seed = spec.seed;
  {
    std::vector<double> initial_scores;
    for (const auto& p : spec.profile) {
      initial_scores.push_back(p.initial_ability * rubric.s_max());
    }
    record.buckets = BucketCriteria(initial_scores);
  }
  auto warn = [&record](std::string_view message) {
    record.warnings.emplace_back(message);
  };

  std::optional<FrozenScalarizer> frozen;
  record.steps.reserve(spec.steps + 1);
  for (std::size_t t = 0; t <= spec.steps; ++t) {
    const ScoreTensor tensor = GenerateScores(env, rubric, spec.group_size);
    SynthesisResult result;
    switch (mode) {
      case Mode::kStatic:
        result = SynthesizeStatic(tensor, rubric, config);
        break;
      case Mode::kFocal:
        result = Synthesize(tensor, rubric, config);
        break;
      case Mode::kNoFrontier:
        result = SynthesizeAblated(tensor, rubric, config, NoFrontierWeighting{});
        break;
      case Mode::kFrozen:
        if (!frozen) {
          result = Synthesize(tensor, rubric, config);
          frozen = FrozenScalarizer{result.focal_weights.values};
        } else {
          result = SynthesizeAblated(tensor, rubric, config, *frozen);
        }
        break;
    }

    StepRecord step;
    step.step = t;
    step.abilities = env.abilities();
    step.saturation = result.saturation.values;
    step.weights = result.focal_weights.values;
    step.mean_scores.resize(rubric.size());
    for (std::size_t k = 0; k < rubric.size(); ++k) {
      double sum = 0.0;
      for (std::size_t i = 0; i < spec.group_size; ++i) {
        sum += result.criterion_means(i, k);
      }
      step.mean_scores[k] = sum / static_cast<double>(spec.group_size);
    }
    step.pass_rate_hard =
        BucketPassRate(result.criterion_means, record.buckets, Bucket::kHard);
    step.pass_rate_medium =
        BucketPassRate(result.criterion_means, record.buckets, Bucket::kMedium);
    step.pass_rate_easy =
        BucketPassRate(result.criterion_means, record.buckets, Bucket::kEasy);
    for (const auto& w : result.warnings) {
      record.warnings.push_back(fmt::format("step {}: {}", t, w));
    }
    record.steps.push_back(std::move(step));

    if (t < spec.steps) {
      env = StepEnv(env, result.focal_weights.values, spec.learning_rate, warn);
    }
  }
  return record;
}

}  // namespace focal::sim
