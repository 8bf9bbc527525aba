#ifndef FOCAL_RANDOM_INSTANCES_H_
#define FOCAL_RANDOM_INSTANCES_H_

#include <cstddef>
#include <random>

#include <Eigen/Dense>

#include "focal/rubric.h"
#include "focal/theory.h"

// Seeded generators for randomized verification instances.
namespace focal::random {

using Rng = std::mt19937_64;

// Scores uniform on [0, s_max]. A positive quantum rounds every score to a
// multiple of it, which produces exact ties and zero margins.
ScoreTensor UniformTensor(Rng& rng, std::size_t group_size,
                          std::size_t num_criteria, double s_max,
                          double quantum = 0.0);

// Nonnegative weights with at least one positive entry; roughly one entry in
// five is zeroed when K > 1.
std::vector<double> SparseWeights(Rng& rng, std::size_t num_criteria);

Rubric RandomRubric(Rng& rng, std::size_t num_criteria, double s_max);

// B B' + 0.1 I with Gaussian B.
Eigen::MatrixXd SpdMatrix(Rng& rng, std::size_t dim);

// Nonnegative eta, two independent SPD covariances, label_prob in
// [0.2, 0.8].
theory::LatentModel RandomLatentModel(Rng& rng, std::size_t dim);

// Nonzero vector in the nonnegative orthant.
Eigen::VectorXd NonnegativeDirection(Rng& rng, std::size_t dim);

// Headroom model whose shaped base is guaranteed nonzero.
theory::HeadroomModel RandomHeadroomModel(Rng& rng, std::size_t dim);

double Uniform(Rng& rng, double lo, double hi);
std::size_t UniformIndex(Rng& rng, std::size_t lo, std::size_t hi);  // [lo, hi]

}  // namespace focal::random

#endif  // FOCAL_RANDOM_INSTANCES_H_
