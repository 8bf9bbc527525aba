#include "focal/synthesis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "focal/error.h"

namespace focal {
namespace {

void RequireSize(std::size_t got, std::size_t want, const char* what) {
  if (got != want) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("{} has length {}, expected {}", what, got, want));
  }
}

bool AllMarginsZero(std::span<const double> weights, const ScoreTensor& tensor) {
  const std::size_t g = tensor.group_size();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i + 1; j < g; ++j) {
      if (PairwiseMargin(weights, tensor, i, j) != 0.0) return false;
    }
  }
  return true;
}

enum class Route { kFocal, kNoFrontier, kFrozen };

SynthesisResult Run(const ScoreTensor& tensor, const Rubric& rubric,
                    const SynthesisConfig& config, Route route,
                    std::span<const double> frozen_weights) {
  config.Validate();
  if (tensor.group_size() < 2) {
    throw Error(ErrorCode::kInsufficientGroup,
                fmt::format("synthesis needs G >= 2, got {}", tensor.group_size()));
  }
  RequireSize(tensor.num_criteria(), rubric.size(), "score tensor criteria");
  tensor.Validate(rubric.s_max());

  SynthesisResult result;
  const auto& base = rubric.base_weights();
  result.base_rewards = GroupRewards(base, tensor, config.tau);
  result.gibbs = ComputeGibbsWeights(result.base_rewards, config.temperature);
  result.criterion_means = ComputeCriterionMeans(tensor);

  const std::size_t g = tensor.group_size();
  const GibbsWeights uniform{std::vector<double>(g, 1.0 / static_cast<double>(g))};
  const GibbsWeights& rollout_weights =
      route == Route::kNoFrontier ? uniform : result.gibbs;
  result.saturation =
      ComputeSaturation(result.criterion_means, rollout_weights, rubric.s_max());

  if (route == Route::kFrozen) {
    result.focal_weights.values.assign(frozen_weights.begin(),
                                       frozen_weights.end());
  } else {
    result.focal_weights = ComputeFocalWeights(result.saturation, base,
                                               config.gamma, config.epsilon);
  }
  result.focal_rewards =
      GroupRewards(result.focal_weights.values, tensor, config.tau);
  result.base_advantages =
      GroupAdvantage(result.base_rewards, config.advantage_std_floor);
  result.focal_advantages =
      GroupAdvantage(result.focal_rewards, config.advantage_std_floor);

  if (AllMarginsZero(result.focal_weights.values, tensor)) {
    result.warnings.push_back(
        "all pairwise margins under the applied weights are zero; rewards and "
        "advantages are degenerate for this group");
  }
  return result;
}

}  // namespace

std::vector<double> CriterionMeans::Column(std::size_t k) const {
  std::vector<double> column(rows_);
  for (std::size_t i = 0; i < rows_; ++i) column[i] = (*this)(i, k);
  return column;
}

GibbsWeights ComputeGibbsWeights(std::span<const double> base_rewards,
                                 double temperature) {
  if (base_rewards.empty()) {
    throw Error(ErrorCode::kInsufficientGroup, "Gibbs weights need G >= 1");
  }
  if (!(temperature > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("temperature must be positive, got {}", temperature));
  }
  const double max_reward =
      *std::max_element(base_rewards.begin(), base_rewards.end());
  GibbsWeights gibbs;
  gibbs.values.resize(base_rewards.size());
  double total = 0.0;
  for (std::size_t i = 0; i < base_rewards.size(); ++i) {
    gibbs.values[i] = std::exp((base_rewards[i] - max_reward) / temperature);
    total += gibbs.values[i];
  }
  for (double& v : gibbs.values) v /= total;
  return gibbs;
}

CriterionMeans ComputeCriterionMeans(const ScoreTensor& tensor) {
  const std::size_t g = tensor.group_size();
  const std::size_t k_count = tensor.num_criteria();
  if (g < 2) {
    throw Error(ErrorCode::kInsufficientGroup,
                fmt::format("criterion means need G >= 2, got {}", g));
  }
  CriterionMeans means(g, k_count);
  const double inv = 1.0 / static_cast<double>(g - 1);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      const auto pair = tensor.Pair(i, j);
      for (std::size_t k = 0; k < k_count; ++k) means(i, k) += pair[k];
    }
    for (std::size_t k = 0; k < k_count; ++k) means(i, k) *= inv;
  }
  return means;
}

SaturationVector ComputeSaturation(const CriterionMeans& means,
                                   const GibbsWeights& gibbs, double s_max) {
  RequireSize(gibbs.values.size(), means.rows(), "Gibbs weights");
  if (!(s_max > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "s_max must be positive");
  }
  SaturationVector saturation;
  saturation.values.resize(means.cols());
  for (std::size_t k = 0; k < means.cols(); ++k) {
    double weighted = 0.0;
    for (std::size_t i = 0; i < means.rows(); ++i) {
      weighted += gibbs.values[i] * means(i, k);
    }
    saturation.values[k] = std::clamp(weighted / s_max, 0.0, 1.0);
  }
  return saturation;
}

FocalWeights ComputeFocalWeights(const SaturationVector& saturation,
                                 std::span<const double> base_weights,
                                 double gamma, double epsilon) {
  RequireSize(saturation.values.size(), base_weights.size(), "saturation");
  if (!(gamma > 0.0) || !(epsilon > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("gamma and epsilon must be positive, got {} and {}",
                            gamma, epsilon));
  }
  const double base_mass =
      std::accumulate(base_weights.begin(), base_weights.end(), 0.0);
  if (!(base_mass > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "base weights sum to zero");
  }
  std::vector<double> tilted(base_weights.size());
  bool constant_factor = true;
  double first_factor = -1.0;
  for (std::size_t k = 0; k < base_weights.size(); ++k) {
    if (base_weights[k] < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "base weights must be nonnegative");
    }
    const double factor = std::pow(1.0 - saturation.values[k] + epsilon, gamma);
    tilted[k] = factor * base_weights[k];
    if (base_weights[k] > 0.0) {
      if (first_factor < 0.0) first_factor = factor;
      constant_factor = constant_factor && factor == first_factor;
    }
  }
  // A common factor cancels in the renormalization; return the base weights
  // bit-for-bit so that tied margins cannot flip on rounding.
  if (constant_factor) {
    return FocalWeights{{base_weights.begin(), base_weights.end()}};
  }
  const double tilted_mass = std::accumulate(tilted.begin(), tilted.end(), 0.0);
  FocalWeights focal;
  focal.values.resize(tilted.size());
  for (std::size_t k = 0; k < tilted.size(); ++k) {
    focal.values[k] = tilted[k] / tilted_mass * base_mass;
  }
  return focal;
}

SynthesisResult Synthesize(const ScoreTensor& tensor, const Rubric& rubric,
                           const SynthesisConfig& config) {
  return Run(tensor, rubric, config, Route::kFocal, {});
}

SynthesisResult SynthesizeAblated(const ScoreTensor& tensor,
                                  const Rubric& rubric,
                                  const SynthesisConfig& config,
                                  const Ablation& ablation) {
  if (std::holds_alternative<NoFrontierWeighting>(ablation)) {
    return Run(tensor, rubric, config, Route::kNoFrontier, {});
  }
  const auto& frozen = std::get<FrozenScalarizer>(ablation).weights;
  RequireSize(frozen.size(), rubric.size(), "frozen weights");
  for (double w : frozen) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "frozen weights must be finite and nonnegative");
    }
  }
  return Run(tensor, rubric, config, Route::kFrozen, frozen);
}

SynthesisResult SynthesizeStatic(const ScoreTensor& tensor,
                                 const Rubric& rubric,
                                 const SynthesisConfig& config) {
  return SynthesizeAblated(tensor, rubric, config,
                           FrozenScalarizer{rubric.base_weights()});
}

}  // namespace focal
