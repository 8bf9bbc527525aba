#ifndef FOCAL_ANALYSIS_H_
#define FOCAL_ANALYSIS_H_

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

#include "focal/rubric.h"
#include "focal/synthesis.h"

namespace focal {

inline constexpr double kHardThreshold = 5.0;
inline constexpr double kEasyThreshold = 8.5;

enum class Bucket { kHard, kMedium, kEasy };

std::string_view BucketName(Bucket bucket);

// Hard below hard_threshold, Easy above easy_threshold, Medium otherwise
// (ties land in Medium).
std::vector<Bucket> BucketCriteria(std::span<const double> initial_scores,
                                   double hard_threshold = kHardThreshold,
                                   double easy_threshold = kEasyThreshold);

// Pass-rate threshold per bucket: 5.0 for Hard and Medium, 8.5 for Easy.
double DefaultPassThreshold(Bucket bucket);

struct QuintileShares {
  // Mean weight share per group, ordered from lowest to highest headroom.
  std::vector<double> mean_share;
  // Total weight share per group; sums to 1.
  std::vector<double> total_share;
  std::vector<std::size_t> group_sizes;
  // Set when K < 5 and fewer than five groups could be formed.
  bool reduced = false;
};

// Sorts criteria by headroom 1 - P and splits them into five equal-count
// groups; the K mod 5 leftover criteria go one each to the highest-headroom
// groups. Shares are w_k / sum(w).
QuintileShares HeadroomQuintiles(const SaturationVector& saturation,
                                 std::span<const double> weights);

// counts[a][b] counts ordered pairs whose outcome moved from a - 2 under the
// first weights to b - 2 under the second.
struct TransitionMatrix {
  std::array<std::array<long, 5>, 5> counts{};

  long Total() const;
  long Diagonal() const;
  long At(int from, int to) const { return counts[from + 2][to + 2]; }
};

TransitionMatrix OutcomeTransitionMatrix(std::span<const double> static_weights,
                                         std::span<const double> focal_weights,
                                         const ScoreTensor& tensor, double tau);

// Transition matrix from a finished synthesis (base weights vs the weights
// actually applied in the final pass).
TransitionMatrix OutcomeTransitionMatrix(const SynthesisResult& result,
                                         const Rubric& rubric,
                                         const ScoreTensor& tensor, double tau);

double WeightCosine(std::span<const double> a, std::span<const double> b);

// Fraction of scores strictly above threshold.
double PassRate(std::span<const double> scores, double threshold);

}  // namespace focal

#endif  // FOCAL_ANALYSIS_H_
