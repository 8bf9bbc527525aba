#ifndef FOCAL_SIM_H_
#define FOCAL_SIM_H_

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "focal/analysis.h"
#include "focal/rubric.h"
#include "focal/synthesis.h"

namespace focal::sim {

struct CriterionProfile {
  double initial_ability = 0.5;  // in [0, 1]
  double rate = 1.0;             // improvement rate, > 0
};

struct SimSpec {
  std::vector<CriterionProfile> profile;
  double noise_scale = 0.1;
  std::size_t group_size = 8;
  std::size_t steps = 200;
  double learning_rate = 0.1;
  std::uint64_t seed = 1;

  std::size_t num_criteria() const { return profile.size(); }
  void Validate() const;

  // One hard, one medium and one easy criterion.
  static SimSpec DefaultHeterogeneous();
};

// Judge-score noise added to each pairwise score, in score units, per unit of
// per-rollout quality noise. 2.5 puts the comparison noise at 0.25 for the
// default noise_scale of 0.1.
inline constexpr double kComparisonNoisePerQualityNoise = 2.5;

class SimEnvironment {
 public:
  explicit SimEnvironment(const SimSpec& spec);

  const std::vector<double>& abilities() const { return abilities_; }
  const std::vector<double>& rates() const { return rates_; }
  double noise_scale() const { return noise_scale_; }
  std::size_t step_count() const { return step_count_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  friend SimEnvironment StepEnv(const SimEnvironment&, std::span<const double>,
                                double, const std::function<void(std::string_view)>&);

  std::vector<double> abilities_;
  std::vector<double> rates_;
  double noise_scale_;
  std::size_t step_count_ = 0;
  std::mt19937_64 rng_;
};

// Synthetic judge. Rollout i draws quality q_i^(k) = clamp(ability + N(0,
// noise)); s_{i,j}^(k) = clamp(s_max q_i^(k) + N(0, 2.5 noise), 0, s_max).
ScoreTensor GenerateScores(SimEnvironment& env, const Rubric& rubric,
                           std::size_t group_size);

// ability += lr * (w_k / sum w) * rate_k * (1 - ability), clamped to [0, 1].
// All-zero weights leave the abilities unchanged and emit a warning.
SimEnvironment StepEnv(
    const SimEnvironment& env, std::span<const double> applied_weights,
    double learning_rate,
    const std::function<void(std::string_view)>& warn = nullptr);

enum class Mode { kStatic, kFocal, kNoFrontier, kFrozen };

std::string_view ModeName(Mode mode);
// Accepts "static", "focal", "no-frontier", "frozen".
Mode ParseMode(std::string_view name);

struct StepRecord {
  std::size_t step = 0;
  std::vector<double> abilities;
  std::vector<double> saturation;
  std::vector<double> weights;
  // Per-criterion mean judge score over the group.
  std::vector<double> mean_scores;
  double pass_rate_hard = 0.0;
  double pass_rate_medium = 0.0;
  double pass_rate_easy = 0.0;
};

struct TrajectoryRecord {
  Mode mode = Mode::kFocal;
  std::uint64_t seed = 0;
  std::vector<Bucket> buckets;
  // steps + 1 records: record t holds the state at the start of step t and
  // the group judged at that state; the last one is a final evaluation.
  std::vector<StepRecord> steps;
  std::vector<std::string> warnings;

  const StepRecord& final() const { return steps.back(); }
};

TrajectoryRecord RunExperiment(const SimSpec& spec, const Rubric& rubric,
                               const SynthesisConfig& config, Mode mode);

}  // namespace focal::sim

#endif  // FOCAL_SIM_H_
