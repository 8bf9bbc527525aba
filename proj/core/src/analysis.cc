#include "focal/analysis.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/format.h>

#include "focal/error.h"

namespace focal {

std::string_view BucketName(Bucket bucket) {
  switch (bucket) {
    case Bucket::kHard:
      return "hard";
    case Bucket::kMedium:
      return "medium";
    case Bucket::kEasy:
      return "easy";
  }
  return "unknown";
}

std::vector<Bucket> BucketCriteria(std::span<const double> initial_scores,
                                   double hard_threshold,
                                   double easy_threshold) {
  if (!(hard_threshold < easy_threshold)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("hard threshold {} must be below easy threshold {}",
                            hard_threshold, easy_threshold));
  }
  std::vector<Bucket> buckets;
  buckets.reserve(initial_scores.size());
  for (double score : initial_scores) {
    if (score < hard_threshold) {
      buckets.push_back(Bucket::kHard);
    } else if (score > easy_threshold) {
      buckets.push_back(Bucket::kEasy);
    } else {
      buckets.push_back(Bucket::kMedium);
    }
  }
  return buckets;
}

double DefaultPassThreshold(Bucket bucket) {
  return bucket == Bucket::kEasy ? kEasyThreshold : kHardThreshold;
}

QuintileShares HeadroomQuintiles(const SaturationVector& saturation,
                                 std::span<const double> weights) {
  const std::size_t k_count = saturation.values.size();
  if (weights.size() != k_count) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weights and saturation differ in length");
  }
  if (k_count == 0) {
    throw Error(ErrorCode::kInvalidArgument, "quintiles need K >= 1");
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "weights sum to zero");
  }

  // Ascending headroom; ties broken by criterion index for a stable order.
  std::vector<std::size_t> order(k_count);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return 1.0 - saturation.values[a] < 1.0 - saturation.values[b];
  });

  QuintileShares shares;
  const std::size_t groups = std::min<std::size_t>(5, k_count);
  shares.reduced = groups < 5;
  const std::size_t base_size = k_count / groups;
  const std::size_t extra = k_count % groups;
  std::size_t cursor = 0;
  for (std::size_t q = 0; q < groups; ++q) {
    const std::size_t size = base_size + (q >= groups - extra ? 1 : 0);
    double sum = 0.0;
    for (std::size_t n = 0; n < size; ++n) sum += weights[order[cursor + n]] / total;
    shares.mean_share.push_back(sum / static_cast<double>(size));
    shares.total_share.push_back(sum);
    shares.group_sizes.push_back(size);
    cursor += size;
  }
  return shares;
}

long TransitionMatrix::Total() const {
  long total = 0;
  for (const auto& row : counts) {
    for (long c : row) total += c;
  }
  return total;
}

long TransitionMatrix::Diagonal() const {
  long total = 0;
  for (std::size_t a = 0; a < 5; ++a) total += counts[a][a];
  return total;
}

TransitionMatrix OutcomeTransitionMatrix(std::span<const double> static_weights,
                                         std::span<const double> focal_weights,
                                         const ScoreTensor& tensor, double tau) {
  if (static_weights.size() != tensor.num_criteria() ||
      focal_weights.size() != tensor.num_criteria()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "weight vectors must match the tensor's criterion count");
  }
  TransitionMatrix matrix;
  const std::size_t g = tensor.group_size();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      const int from = PhiTau(PairwiseMargin(static_weights, tensor, i, j), tau);
      const int to = PhiTau(PairwiseMargin(focal_weights, tensor, i, j), tau);
      ++matrix.counts[from + 2][to + 2];
    }
  }
  return matrix;
}

TransitionMatrix OutcomeTransitionMatrix(const SynthesisResult& result,
                                         const Rubric& rubric,
                                         const ScoreTensor& tensor, double tau) {
  if (result.base_rewards.size() != tensor.group_size() ||
      result.focal_rewards.size() != tensor.group_size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("synthesis covers {} rollouts, tensor has G = {}",
                            result.base_rewards.size(), tensor.group_size()));
  }
  return OutcomeTransitionMatrix(rubric.base_weights(),
                                 result.focal_weights.values, tensor, tau);
}

double WeightCosine(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "cosine needs equal lengths");
  }
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    dot += a[k] * b[k];
    na += a[k] * a[k];
    nb += b[k] * b[k];
  }
  if (na == 0.0 || nb == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "cosine undefined for a zero vector");
  }
  return std::clamp(dot / (std::sqrt(na) * std::sqrt(nb)), -1.0, 1.0);
}

double PassRate(std::span<const double> scores, double threshold) {
  if (scores.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "pass rate of an empty sample");
  }
  const auto passed = std::count_if(scores.begin(), scores.end(),
                                    [&](double s) { return s > threshold; });
  return static_cast<double>(passed) / static_cast<double>(scores.size());
}

}  // namespace focal
