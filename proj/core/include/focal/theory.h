#ifndef FOCAL_THEORY_H_
#define FOCAL_THEORY_H_

#include <cstddef>
#include <cstdint>
#include <span>

#include <Eigen/Dense>

#include "focal/rubric.h"

namespace focal::theory {

// Local latent-label model: a pairwise score-difference vector is
// D = L * eta + zeta with zeta ~ N(0, Sigma(L)) and Pr[L = +1] = label_prob.
struct LatentModel {
  Eigen::VectorXd eta;
  Eigen::MatrixXd sigma_plus;
  Eigen::MatrixXd sigma_minus;
  double label_prob = 0.5;

  std::size_t dim() const { return static_cast<std::size_t>(eta.size()); }
  // Throws kNotPositiveDefinite / kInvalidArgument / kDimensionMismatch.
  void Validate() const;
};

// Headroom-shaped edge: eta = scale_c * (base ⊙ headroom^gamma0), isotropic
// residuals with variance sigma_iso^2.
struct HeadroomModel {
  Eigen::VectorXd base;
  Eigen::VectorXd headroom;
  double gamma0 = 1.0;
  double scale_c = 1.0;
  double sigma_iso = 1.0;

  void Validate() const;
  // base ⊙ headroom^gamma0, unnormalized.
  Eigen::VectorXd ShapedBase() const;
  LatentModel IsotropicLatent() const;
};

// (a'eta)^2 / max_l a'Sigma(l)a.
double XiSurrogate(const Eigen::VectorXd& a, const LatentModel& model);

struct MisallocationEstimate {
  double empirical_rate = 0.0;
  double bound = 0.0;
  double std_err = 0.0;
  std::int64_t misallocated = 0;
  std::int64_t samples = 0;
};

// Monte-Carlo estimate of Pr[L a'D <= 0] against exp(-Xi/2). Work is split
// into a fixed number of shards with independently seeded generators so the
// result depends only on (a, model, n_samples, seed).
MisallocationEstimate EstimateMisallocation(const Eigen::VectorXd& a,
                                            const LatentModel& model,
                                            std::int64_t n_samples,
                                            std::uint64_t seed);

// Unit vector along base ⊙ headroom^gamma0.
Eigen::VectorXd PreferredDirection(const HeadroomModel& model);

struct StaticGap {
  double closed_form = 0.0;
  double oracle = 0.0;
};

// Xi(a*) - Xi(w_base) two ways: the weighted-variance formula and direct
// evaluation of Xi under the isotropic latent model.
StaticGap ComputeStaticGap(const HeadroomModel& model);

// mu-weighted variance with mu^(k) = w_k^2 / |w|^2.
double WeightedVariance(const Eigen::VectorXd& weights,
                        const Eigen::VectorXd& values);

struct SphereSearchResult {
  Eigen::VectorXd best_sampled;
  double best_sampled_xi = 0.0;
  Eigen::VectorXd refined;
  double refined_xi = 0.0;
};

// Random-restart maximization of Xi over the unit sphere: `directions`
// Gaussian-sampled directions, then projected gradient ascent from the best.
SphereSearchResult SearchXiOnSphere(const LatentModel& model,
                                    std::size_t directions,
                                    std::uint64_t seed);

struct GibbsBoundReport {
  double frontier_gap = 0.0;   // delta
  double mass_out = 0.0;       // 1 - rho
  double bound = 0.0;          // (G - |S|)/|S| * exp(-delta / T)
  double p_gap = 0.0;          // |P - P_S|
  double p_bound = 0.0;
  bool mass_within_bound = false;
  bool proxy_within_bound = false;
};

// Gibbs frontier concentration for a frontier index set S and saturation
// column z in [0, 1]^G. Throws kFrontierGap when S does not dominate the rest.
GibbsBoundReport CheckGibbsBound(std::span<const double> base_rewards,
                                 std::span<const std::size_t> frontier,
                                 double temperature,
                                 std::span<const double> saturation_column);

struct ShiftReport {
  double max_margin_diff = 0.0;
  double max_reward_diff = 0.0;
  double max_gibbs_diff = 0.0;
  double saturation_shift = 0.0;
  double expected_shift = 0.0;
  double max_other_saturation_diff = 0.0;

  bool Holds(double tolerance) const;
};

// Shifts every s_{i,j}^(k) by b for a single criterion k and compares the
// synthesis pipeline before and after.
ShiftReport ProbeShift(const ScoreTensor& tensor, const Rubric& rubric,
                       const SynthesisConfig& config, std::size_t k, double b);

}  // namespace focal::theory

#endif  // FOCAL_THEORY_H_
