#include "focal/theory.h"

#include <algorithm>
#include <cmath>
#include <future>
#include <random>
#include <vector>

#include <fmt/format.h>

#include "focal/error.h"
#include "focal/synthesis.h"

namespace focal::theory {
namespace {

constexpr int kMonteCarloShards = 8;

void CheckSymmetricPositiveDefinite(const Eigen::MatrixXd& m, const char* name) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                fmt::format("{} is not symmetric", name));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw Error(ErrorCode::kNotPositiveDefinite,
                fmt::format("{} is not positive definite", name));
  }
}

double MaxQuadratic(const Eigen::VectorXd& a, const LatentModel& model) {
  return std::max(a.dot(model.sigma_plus * a), a.dot(model.sigma_minus * a));
}

// Riemannian gradient of Xi on the unit sphere at u (|u| = 1).
Eigen::VectorXd SphereGradient(const Eigen::VectorXd& u,
                               const LatentModel& model) {
  const double num = u.dot(model.eta);
  const double q_plus = u.dot(model.sigma_plus * u);
  const double q_minus = u.dot(model.sigma_minus * u);
  const Eigen::MatrixXd& sigma =
      q_plus >= q_minus ? model.sigma_plus : model.sigma_minus;
  const double den = std::max(q_plus, q_minus);
  Eigen::VectorXd grad =
      2.0 * num / den * model.eta - 2.0 * num * num / (den * den) * (sigma * u);
  return grad - grad.dot(u) * u;
}

}  // namespace

void LatentModel::Validate() const {
  const Eigen::Index k = eta.size();
  if (k == 0) {
    throw Error(ErrorCode::kInvalidArgument, "latent model needs K >= 1");
  }
  if (sigma_plus.rows() != k || sigma_plus.cols() != k ||
      sigma_minus.rows() != k || sigma_minus.cols() != k) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("covariances must be {}x{}", k, k));
  }
  if ((eta.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "eta entries must be nonnegative");
  }
  if (!(label_prob > 0.0 && label_prob < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                fmt::format("label_prob must lie in (0, 1), got {}", label_prob));
  }
  CheckSymmetricPositiveDefinite(sigma_plus, "sigma_plus");
  CheckSymmetricPositiveDefinite(sigma_minus, "sigma_minus");
}

void HeadroomModel::Validate() const {
  if (base.size() == 0 || base.size() != headroom.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "base and headroom must be nonempty and of equal length");
  }
  if ((base.array() < 0.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "base weights must be nonnegative");
  }
  if ((headroom.array() < 0.0).any() || (headroom.array() > 1.0).any()) {
    throw Error(ErrorCode::kInvalidArgument, "headroom must lie in [0, 1]");
  }
  if (!(gamma0 > 0.0) || !(scale_c > 0.0) || !(sigma_iso > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "gamma0, scale_c and sigma_iso must be positive");
  }
}

Eigen::VectorXd HeadroomModel::ShapedBase() const {
  return base.cwiseProduct(headroom.array().pow(gamma0).matrix());
}

LatentModel HeadroomModel::IsotropicLatent() const {
  Validate();
  const Eigen::Index k = base.size();
  const Eigen::MatrixXd iso =
      sigma_iso * sigma_iso * Eigen::MatrixXd::Identity(k, k);
  return LatentModel{scale_c * ShapedBase(), iso, iso, 0.5};
}

double XiSurrogate(const Eigen::VectorXd& a, const LatentModel& model) {
  if (a.size() != model.eta.size()) {
    throw Error(ErrorCode::kDimensionMismatch,
                fmt::format("scalarizer has length {}, model has K = {}",
                            a.size(), model.eta.size()));
  }
  if (a.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "Xi is undefined for a = 0");
  }
  const double num = a.dot(model.eta);
  return num * num / MaxQuadratic(a, model);
}

MisallocationEstimate EstimateMisallocation(const Eigen::VectorXd& a,
                                            const LatentModel& model,
                                            std::int64_t n_samples,
                                            std::uint64_t seed) {
  model.Validate();
  if (n_samples < 1) {
    throw Error(ErrorCode::kInvalidArgument, "n_samples must be >= 1");
  }
  const double xi = XiSurrogate(a, model);
  const Eigen::Index k = a.size();

  // a'zeta = (L_l' a) . z for zeta = L_l z with z ~ N(0, I).
  const Eigen::MatrixXd chol_plus =
      Eigen::LLT<Eigen::MatrixXd>(model.sigma_plus).matrixL();
  const Eigen::MatrixXd chol_minus =
      Eigen::LLT<Eigen::MatrixXd>(model.sigma_minus).matrixL();
  const Eigen::VectorXd proj_plus = chol_plus.transpose() * a;
  const Eigen::VectorXd proj_minus = chol_minus.transpose() * a;
  const double edge = a.dot(model.eta);

  auto run_shard = [&](int shard, std::int64_t count) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed),
                      static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(shard)};
    std::mt19937_64 rng(seq);
    std::bernoulli_distribution label(model.label_prob);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::int64_t hits = 0;
    for (std::int64_t n = 0; n < count; ++n) {
      const bool positive = label(rng);
      const Eigen::VectorXd& proj = positive ? proj_plus : proj_minus;
      double noise = 0.0;
      for (Eigen::Index c = 0; c < k; ++c) noise += proj[c] * normal(rng);
      // L * a'D = L * (L * a'eta + a'zeta) = a'eta + L * a'zeta.
      const double margin = edge + (positive ? noise : -noise);
      if (margin <= 0.0) ++hits;
    }
    return hits;
  };

  std::vector<std::future<std::int64_t>> shards;
  const std::int64_t per_shard = n_samples / kMonteCarloShards;
  const std::int64_t remainder = n_samples % kMonteCarloShards;
  for (int s = 0; s < kMonteCarloShards; ++s) {
    const std::int64_t count = per_shard + (s < remainder ? 1 : 0);
    shards.push_back(std::async(std::launch::async, run_shard, s, count));
  }
  MisallocationEstimate est;
  for (auto& f : shards) est.misallocated += f.get();
  est.samples = n_samples;
  const double n = static_cast<double>(n_samples);
  est.empirical_rate = static_cast<double>(est.misallocated) / n;
  est.std_err = std::sqrt(est.empirical_rate * (1.0 - est.empirical_rate) / n);
  est.bound = std::exp(-0.5 * xi);
  return est;
}

Eigen::VectorXd PreferredDirection(const HeadroomModel& model) {
  model.Validate();
  const Eigen::VectorXd shaped = model.ShapedBase();
  const double norm = shaped.norm();
  if (norm == 0.0) {
    throw Error(ErrorCode::kDegenerateDirection,
                "base ⊙ headroom^gamma0 is the zero vector");
  }
  return shaped / norm;
}

double WeightedVariance(const Eigen::VectorXd& weights,
                        const Eigen::VectorXd& values) {
  const Eigen::VectorXd mu = weights.array().square() / weights.squaredNorm();
  const double mean = mu.dot(values);
  return mu.dot((values.array() - mean).square().matrix());
}

StaticGap ComputeStaticGap(const HeadroomModel& model) {
  const Eigen::VectorXd direction = PreferredDirection(model);
  if (model.base.squaredNorm() == 0.0) {
    throw Error(ErrorCode::kDegenerateDirection, "base weights are all zero");
  }
  const Eigen::VectorXd z = model.headroom.array().pow(model.gamma0);
  StaticGap gap;
  gap.closed_form = model.scale_c * model.scale_c * model.base.squaredNorm() /
                    (model.sigma_iso * model.sigma_iso) *
                    WeightedVariance(model.base, z);
  const LatentModel latent = model.IsotropicLatent();
  gap.oracle = XiSurrogate(direction, latent) - XiSurrogate(model.base, latent);
  return gap;
}

SphereSearchResult SearchXiOnSphere(const LatentModel& model,
                                    std::size_t directions,
                                    std::uint64_t seed) {
  model.Validate();
  if (directions == 0) {
    throw Error(ErrorCode::kInvalidArgument, "need at least one direction");
  }
  const Eigen::Index k = model.eta.size();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  SphereSearchResult result;
  result.best_sampled_xi = -1.0;
  Eigen::VectorXd u(k);
  for (std::size_t d = 0; d < directions; ++d) {
    do {
      for (Eigen::Index c = 0; c < k; ++c) u[c] = normal(rng);
    } while (u.squaredNorm() == 0.0);
    u.normalize();
    const double xi = XiSurrogate(u, model);
    if (xi > result.best_sampled_xi) {
      result.best_sampled_xi = xi;
      result.best_sampled = u;
    }
  }

  // Projected gradient ascent with backtracking. The step moves along the
  // unit tangent, so it is roughly an angle and capped below pi / 2.
  Eigen::VectorXd current = result.best_sampled;
  double current_xi = result.best_sampled_xi;
  double step = 0.5;
  for (int iter = 0; iter < 5000 && step > 1e-16; ++iter) {
    const Eigen::VectorXd grad = SphereGradient(current, model);
    const double grad_norm = grad.norm();
    if (grad_norm <= 1e-15 * std::max(1.0, current_xi)) break;
    const Eigen::VectorXd tangent = grad / grad_norm;
    bool improved = false;
    while (step > 1e-16) {
      const Eigen::VectorXd candidate = (current + step * tangent).normalized();
      const double xi = XiSurrogate(candidate, model);
      if (xi > current_xi) {
        current = candidate;
        current_xi = xi;
        step = std::min(2.0 * step, 1.0);
        improved = true;
        break;
      }
      step *= 0.5;
    }
    if (!improved) break;
  }
  result.refined = current;
  result.refined_xi = current_xi;
  return result;
}

GibbsBoundReport CheckGibbsBound(std::span<const double> base_rewards,
                                 std::span<const std::size_t> frontier,
                                 double temperature,
                                 std::span<const double> saturation_column) {
  const std::size_t g = base_rewards.size();
  if (saturation_column.size() != g) {
    throw Error(ErrorCode::kDimensionMismatch,
                "saturation column must have one entry per rollout");
  }
  std::vector<bool> in_frontier(g, false);
  for (std::size_t i : frontier) {
    if (i >= g || in_frontier[i]) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("frontier index {} is out of range or repeated", i));
    }
    in_frontier[i] = true;
  }
  if (frontier.empty() || frontier.size() >= g) {
    throw Error(ErrorCode::kInvalidArgument,
                "frontier must be a nonempty proper subset of the group");
  }
  double min_in = INFINITY;
  double max_out = -INFINITY;
  for (std::size_t i = 0; i < g; ++i) {
    if (in_frontier[i]) {
      min_in = std::min(min_in, base_rewards[i]);
    } else {
      max_out = std::max(max_out, base_rewards[i]);
    }
  }
  GibbsBoundReport report;
  report.frontier_gap = min_in - max_out;
  if (!(report.frontier_gap > 0.0)) {
    throw Error(ErrorCode::kFrontierGap,
                fmt::format("frontier gap {} is not positive", report.frontier_gap));
  }

  const GibbsWeights gibbs = ComputeGibbsWeights(base_rewards, temperature);
  double rho = 0.0;
  double frontier_weighted = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    if (in_frontier[i]) {
      rho += gibbs.values[i];
      frontier_weighted += gibbs.values[i] * saturation_column[i];
    } else {
      report.mass_out += gibbs.values[i];
    }
  }
  const double p_frontier = frontier_weighted / rho;
  // P - P_S = sum_{j not in S} r_j (z_j - P_S); summing only the outside
  // terms keeps the gap accurate when it is far below machine epsilon.
  double gap = 0.0;
  for (std::size_t i = 0; i < g; ++i) {
    if (!in_frontier[i]) gap += gibbs.values[i] * (saturation_column[i] - p_frontier);
  }
  report.p_gap = std::abs(gap);
  const double s = static_cast<double>(frontier.size());
  report.bound = (static_cast<double>(g) - s) / s *
                 std::exp(-report.frontier_gap / temperature);
  report.p_bound = report.bound;
  // Relative slack of 1e-12 absorbs rounding once the bound is nearly tight.
  report.mass_within_bound = report.mass_out <= report.bound * (1.0 + 1e-12);
  report.proxy_within_bound = report.p_gap <= report.p_bound * (1.0 + 1e-12);
  return report;
}

bool ShiftReport::Holds(double tolerance) const {
  return max_margin_diff <= tolerance && max_reward_diff <= tolerance &&
         max_gibbs_diff <= tolerance &&
         std::abs(saturation_shift - expected_shift) <= tolerance &&
         max_other_saturation_diff <= tolerance;
}

ShiftReport ProbeShift(const ScoreTensor& tensor, const Rubric& rubric,
                       const SynthesisConfig& config, std::size_t k, double b) {
  if (k >= rubric.size() || k >= tensor.num_criteria()) {
    throw Error(ErrorCode::kOutOfRange,
                fmt::format("criterion index {} out of range", k));
  }
  const std::size_t g = tensor.group_size();
  ScoreTensor shifted = tensor;
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      const double value = tensor(i, j, k) + b;
      if (!(value >= 0.0 && value <= rubric.s_max())) {
        throw Error(ErrorCode::kOutOfRange,
                    fmt::format("shift {} moves s[{},{},{}] to {} outside [0, {}]",
                                b, i, j, k, value, rubric.s_max()));
      }
      shifted.Set(i, j, k, value);
    }
  }
  const SynthesisResult before = Synthesize(tensor, rubric, config);
  const SynthesisResult after = Synthesize(shifted, rubric, config);

  ShiftReport report;
  const auto& w = rubric.base_weights();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      report.max_margin_diff =
          std::max(report.max_margin_diff,
                   std::abs(PairwiseMargin(w, shifted, i, j) -
                            PairwiseMargin(w, tensor, i, j)));
    }
    report.max_reward_diff =
        std::max(report.max_reward_diff,
                 std::abs(after.base_rewards[i] - before.base_rewards[i]));
    report.max_gibbs_diff =
        std::max(report.max_gibbs_diff,
                 std::abs(after.gibbs.values[i] - before.gibbs.values[i]));
  }
  report.saturation_shift =
      after.saturation.values[k] - before.saturation.values[k];
  report.expected_shift = b / rubric.s_max();
  for (std::size_t c = 0; c < rubric.size(); ++c) {
    if (c == k) continue;
    report.max_other_saturation_diff =
        std::max(report.max_other_saturation_diff,
                 std::abs(after.saturation.values[c] - before.saturation.values[c]));
  }
  return report;
}

}  // namespace focal::theory
