#ifndef FOCAL_SYNTHESIS_H_
#define FOCAL_SYNTHESIS_H_

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "focal/rubric.h"

namespace focal {

// Softmax of base rewards at temperature T; sums to one.
struct GibbsWeights {
  std::vector<double> values;
};

// Per-criterion saturation P^(k) in [0, 1].
struct SaturationVector {
  std::vector<double> values;
};

// Headroom-modulated weights carrying the same total mass as the base weights.
struct FocalWeights {
  std::vector<double> values;
};

// Dense G x K row-major matrix of per-rollout criterion means.
class CriterionMeans {
 public:
  CriterionMeans(std::size_t rows, std::size_t cols)
      : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double operator()(std::size_t i, std::size_t k) const {
    return data_[i * cols_ + k];
  }
  double& operator()(std::size_t i, std::size_t k) {
    return data_[i * cols_ + k];
  }
  std::vector<double> Column(std::size_t k) const;

 private:
  std::size_t rows_;
  std::size_t cols_;
  std::vector<double> data_;
};

struct SynthesisResult {
  std::vector<double> base_rewards;
  GibbsWeights gibbs;
  CriterionMeans criterion_means{0, 0};
  SaturationVector saturation;
  FocalWeights focal_weights;
  std::vector<double> focal_rewards;
  std::vector<double> base_advantages;
  std::vector<double> focal_advantages;
  // Non-fatal diagnostics, e.g. a group whose focal margins are all zero.
  std::vector<std::string> warnings;
};

GibbsWeights ComputeGibbsWeights(std::span<const double> base_rewards,
                                 double temperature);

// s̄_i^(k): the mean over j != i of s_{i,j}^(k).
CriterionMeans ComputeCriterionMeans(const ScoreTensor& tensor);

// P^(k) = <r, s̄^(k)> / s_max, clamped to [0, 1] against rounding.
SaturationVector ComputeSaturation(const CriterionMeans& means,
                                   const GibbsWeights& gibbs, double s_max);

// w̃ = (1 - P + eps)^gamma ⊙ w_base, rescaled so sum(w_focal) = sum(w_base).
FocalWeights ComputeFocalWeights(const SaturationVector& saturation,
                                 std::span<const double> base_weights,
                                 double gamma, double epsilon);

// Base pass, Gibbs projection, saturation estimate, focal reweighting, and the
// focal pass over the same tensor.
SynthesisResult Synthesize(const ScoreTensor& tensor, const Rubric& rubric,
                           const SynthesisConfig& config);

// Ablations.
//  - NoFrontierWeighting: uniform rollout weights replace the Gibbs weights
//    in the saturation estimate.
//  - FrozenScalarizer: the stored weights are used for the final pass. Gibbs
//    weights and saturation are still reported for diagnostics but do not
//    influence the rewards.
struct NoFrontierWeighting {};
struct FrozenScalarizer {
  std::vector<double> weights;
};
using Ablation = std::variant<NoFrontierWeighting, FrozenScalarizer>;

SynthesisResult SynthesizeAblated(const ScoreTensor& tensor,
                                  const Rubric& rubric,
                                  const SynthesisConfig& config,
                                  const Ablation& ablation);

// Static aggregation, i.e. FrozenScalarizer{w_base}.
SynthesisResult SynthesizeStatic(const ScoreTensor& tensor,
                                 const Rubric& rubric,
                                 const SynthesisConfig& config);

}  // namespace focal

#endif  // FOCAL_SYNTHESIS_H_
