#include "focal/rubric.h"

#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include <fmt/format.h>

#include "focal/error.h"

namespace focal {

Rubric::Rubric(std::vector<Criterion> criteria, double s_max)
    : criteria_(std::move(criteria)), s_max_(s_max) {
  if (criteria_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "rubric needs at least one criterion");
  }
  if (!(s_max_ > 0.0) || !std::isfinite(s_max_)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("s_max must be positive, got {}", s_max_));
  }
  std::set<std::string> seen;
  base_weights_.reserve(criteria_.size());
  for (const Criterion& c : criteria_) {
    if (!seen.insert(c.id).second) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("duplicate criterion id '{}'", c.id));
    }
    if (!(c.base_weight >= 0.0) || !std::isfinite(c.base_weight)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("criterion '{}' has invalid base weight {}", c.id,
                              c.base_weight));
    }
    base_weights_.push_back(c.base_weight);
  }
  base_mass_ = std::accumulate(base_weights_.begin(), base_weights_.end(), 0.0);
  if (!(base_mass_ > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "base weights sum to zero");
  }
}

Rubric Rubric::Uniform(std::size_t num_criteria, double s_max) {
  std::vector<Criterion> criteria;
  criteria.reserve(num_criteria);
  for (std::size_t k = 0; k < num_criteria; ++k) {
    criteria.push_back({fmt::format("c{}", k), CriterionKind::kPrinciple, 1.0});
  }
  return Rubric(std::move(criteria), s_max);
}

ScoreTensor::ScoreTensor(std::size_t group_size, std::size_t num_criteria)
    : group_size_(group_size),
      num_criteria_(num_criteria),
      scores_(group_size * group_size * num_criteria,
              std::numeric_limits<double>::quiet_NaN()) {
  if (num_criteria == 0) {
    throw Error(ErrorCode::kInvalidArgument, "score tensor needs K >= 1");
  }
}

void ScoreTensor::CheckPair(std::size_t i, std::size_t j) const {
  if (i >= group_size_ || j >= group_size_) {
    throw Error(ErrorCode::kInvalidPair,
                fmt::format("pair ({}, {}) outside group of size {}", i, j,
                            group_size_));
  }
  if (i == j) {
    throw Error(ErrorCode::kInvalidPair,
                fmt::format("diagonal pair ({}, {}) is undefined", i, j));
  }
}

std::size_t ScoreTensor::Offset(std::size_t i, std::size_t j) const {
  return (i * group_size_ + j) * num_criteria_;
}

double ScoreTensor::operator()(std::size_t i, std::size_t j,
                               std::size_t k) const {
  CheckPair(i, j);
  if (k >= num_criteria_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("criterion index {} >= K = {}", k, num_criteria_));
  }
  return scores_[Offset(i, j) + k];
}

void ScoreTensor::Set(std::size_t i, std::size_t j, std::size_t k,
                      double score) {
  CheckPair(i, j);
  if (k >= num_criteria_) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("criterion index {} >= K = {}", k, num_criteria_));
  }
  scores_[Offset(i, j) + k] = score;
}

std::span<const double> ScoreTensor::Pair(std::size_t i, std::size_t j) const {
  CheckPair(i, j);
  return {scores_.data() + Offset(i, j), num_criteria_};
}

std::span<double> ScoreTensor::MutablePair(std::size_t i, std::size_t j) {
  CheckPair(i, j);
  return {scores_.data() + Offset(i, j), num_criteria_};
}

bool ScoreTensor::IsPairComplete(std::size_t i, std::size_t j) const {
  for (double s : Pair(i, j)) {
    if (std::isnan(s)) return false;
  }
  return true;
}

void ScoreTensor::Validate(double s_max) const {
  for (std::size_t i = 0; i < group_size_; ++i) {
    for (std::size_t j = 0; j < group_size_; ++j) {
      if (i == j) continue;
      const auto pair = Pair(i, j);
      for (std::size_t k = 0; k < num_criteria_; ++k) {
        const double s = pair[k];
        if (std::isnan(s)) {
          throw Error(ErrorCode::kIncomplete,
                      fmt::format("missing score for pair ({}, {}) criterion {}",
                                  i, j, k));
        }
        if (!(s >= 0.0 && s <= s_max)) {
          throw Error(ErrorCode::kOutOfRange,
                      fmt::format("score {} for pair ({}, {}) criterion {} "
                                  "outside [0, {}]",
                                  s, i, j, k, s_max));
        }
      }
    }
  }
}

bool operator==(const ScoreTensor& a, const ScoreTensor& b) {
  if (a.group_size_ != b.group_size_ || a.num_criteria_ != b.num_criteria_) {
    return false;
  }
  for (std::size_t n = 0; n < a.scores_.size(); ++n) {
    const double x = a.scores_[n];
    const double y = b.scores_[n];
    if (std::isnan(x) && std::isnan(y)) continue;
    if (x != y) return false;
  }
  return true;
}

void SynthesisConfig::Validate() const {
  auto require_positive = [](double v, const char* name) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("{} must be positive and finite, got {}", name, v));
    }
  };
  require_positive(tau, "tau");
  require_positive(temperature, "temperature");
  require_positive(gamma, "gamma");
  require_positive(epsilon, "epsilon");
  if (!(advantage_std_floor >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "advantage_std_floor must be nonnegative");
  }
}

double WeightedScore(std::span<const double> weights,
                     std::span<const double> pair_scores) {
  if (weights.size() != pair_scores.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("weights have length {}, scores have length {}",
                            weights.size(), pair_scores.size()));
  }
  double total = 0.0;
  for (std::size_t k = 0; k < weights.size(); ++k) {
    total += weights[k] * pair_scores[k];
  }
  return total;
}

double PairwiseMargin(std::span<const double> weights,
                      const ScoreTensor& tensor, std::size_t i,
                      std::size_t j) {
  return WeightedScore(weights, tensor.Pair(i, j)) -
         WeightedScore(weights, tensor.Pair(j, i));
}

int PhiTau(double delta, double tau) {
  if (!(tau > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, fmt::format("tau must be positive, got {}", tau));
  }
  if (delta == 0.0) return 0;
  const int sign = delta > 0.0 ? 1 : -1;
  return std::abs(delta) >= tau ? 2 * sign : sign;
}

std::vector<double> GroupRewards(std::span<const double> weights,
                                 const ScoreTensor& tensor, double tau) {
  const std::size_t g = tensor.group_size();
  if (g < 2) {
    throw Error(ErrorCode::kInsufficientGroup,
                fmt::format("group rewards need G >= 2, got {}", g));
  }
  if (weights.size() != tensor.num_criteria()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("weights have length {}, tensor has K = {}",
                            weights.size(), tensor.num_criteria()));
  }
  // S_{i,j} once per ordered pair; each unordered pair then credits both ends.
  std::vector<double> pair_score(g * g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i != j) pair_score[i * g + j] = WeightedScore(weights, tensor.Pair(i, j));
    }
  }
  std::vector<double> rewards(g, 0.0);
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = i + 1; j < g; ++j) {
      const int outcome =
          PhiTau(pair_score[i * g + j] - pair_score[j * g + i], tau);
      rewards[i] += outcome;
      rewards[j] -= outcome;
    }
  }
  return rewards;
}

std::vector<double> GroupAdvantage(std::span<const double> rewards,
                                   double std_floor) {
  const std::size_t g = rewards.size();
  std::vector<double> advantages(g, 0.0);
  if (g == 0) return advantages;
  const double mean =
      std::accumulate(rewards.begin(), rewards.end(), 0.0) / static_cast<double>(g);
  double sum_sq = 0.0;
  for (double r : rewards) sum_sq += (r - mean) * (r - mean);
  const double std_dev = std::sqrt(sum_sq / static_cast<double>(g));
  if (std_dev < std_floor || std_dev == 0.0) return advantages;
  for (std::size_t i = 0; i < g; ++i) {
    advantages[i] = (rewards[i] - mean) / std_dev;
  }
  return advantages;
}

}  // namespace focal
