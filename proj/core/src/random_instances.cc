#include "focal/random_instances.h"

#include <algorithm>
#include <cmath>

namespace focal::random {

double Uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

std::size_t UniformIndex(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

ScoreTensor UniformTensor(Rng& rng, std::size_t group_size,
                          std::size_t num_criteria, double s_max,
                          double quantum) {
  ScoreTensor tensor(group_size, num_criteria);
  for (std::size_t i = 0; i < group_size; ++i) {
    for (std::size_t j = 0; j < group_size; ++j) {
      if (i == j) continue;
      for (std::size_t k = 0; k < num_criteria; ++k) {
        double s = Uniform(rng, 0.0, s_max);
        if (quantum > 0.0) s = std::min(s_max, std::round(s / quantum) * quantum);
        tensor.Set(i, j, k, s);
      }
    }
  }
  return tensor;
}

std::vector<double> SparseWeights(Rng& rng, std::size_t num_criteria) {
  std::vector<double> w(num_criteria);
  bool any = false;
  for (auto& x : w) {
    x = (num_criteria > 1 && Uniform(rng, 0.0, 1.0) < 0.2) ? 0.0
                                                           : Uniform(rng, 0.05, 2.0);
    any = any || x > 0.0;
  }
  if (!any) w[UniformIndex(rng, 0, num_criteria - 1)] = 1.0;
  return w;
}

Rubric RandomRubric(Rng& rng, std::size_t num_criteria, double s_max) {
  const auto weights = SparseWeights(rng, num_criteria);
  std::vector<Criterion> criteria;
  for (std::size_t k = 0; k < num_criteria; ++k) {
    criteria.push_back({"c" + std::to_string(k), CriterionKind::kPrinciple, weights[k]});
  }
  return Rubric(std::move(criteria), s_max);
}

Eigen::MatrixXd SpdMatrix(Rng& rng, std::size_t dim) {
  std::normal_distribution<double> normal(0.0, 0.6);
  const auto n = static_cast<Eigen::Index>(dim);
  Eigen::MatrixXd b(n, n);
  for (Eigen::Index r = 0; r < n; ++r) {
    for (Eigen::Index c = 0; c < n; ++c) b(r, c) = normal(rng);
  }
  Eigen::MatrixXd m = b * b.transpose() + 0.1 * Eigen::MatrixXd::Identity(n, n);
  return 0.5 * (m + m.transpose());
}

theory::LatentModel RandomLatentModel(Rng& rng, std::size_t dim) {
  theory::LatentModel model;
  model.eta.resize(static_cast<Eigen::Index>(dim));
  for (Eigen::Index k = 0; k < model.eta.size(); ++k) model.eta[k] = Uniform(rng, 0.0, 2.0);
  model.sigma_plus = SpdMatrix(rng, dim);
  model.sigma_minus = SpdMatrix(rng, dim);
  model.label_prob = Uniform(rng, 0.2, 0.8);
  return model;
}

Eigen::VectorXd NonnegativeDirection(Rng& rng, std::size_t dim) {
  Eigen::VectorXd a(static_cast<Eigen::Index>(dim));
  do {
    for (Eigen::Index k = 0; k < a.size(); ++k) a[k] = Uniform(rng, 0.0, 1.0);
  } while (a.squaredNorm() == 0.0);
  return a;
}

theory::HeadroomModel RandomHeadroomModel(Rng& rng, std::size_t dim) {
  theory::HeadroomModel model;
  const auto n = static_cast<Eigen::Index>(dim);
  // At least two weighted criteria when dim >= 2, so the headroom variance
  // under the weight measure is generically positive.
  std::vector<double> weights;
  do {
    weights = SparseWeights(rng, dim);
  } while (dim >= 2 && std::count_if(weights.begin(), weights.end(),
                                     [](double w) { return w > 0.0; }) < 2);
  model.base = Eigen::Map<const Eigen::VectorXd>(weights.data(), n);
  model.headroom.resize(n);
  do {
    for (Eigen::Index k = 0; k < n; ++k) model.headroom[k] = Uniform(rng, 0.0, 1.0);
  } while (model.base.cwiseProduct(model.headroom).squaredNorm() == 0.0);
  model.gamma0 = Uniform(rng, 0.5, 3.0);
  model.scale_c = Uniform(rng, 0.1, 3.0);
  model.sigma_iso = Uniform(rng, 0.2, 2.0);
  return model;
}

}  // namespace focal::random
