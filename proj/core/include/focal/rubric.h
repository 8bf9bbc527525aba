#ifndef FOCAL_RUBRIC_H_
#define FOCAL_RUBRIC_H_

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace focal {

inline constexpr double kDefaultScoreMax = 10.0;
inline constexpr double kDefaultTau = 1.0;
inline constexpr double kDefaultTemperature = 10.0;
inline constexpr double kDefaultGamma = 2.0;
inline constexpr double kDefaultEpsilon = 0.01;
inline constexpr double kDefaultAdvantageStdFloor = 1e-8;

enum class CriterionKind { kHardRule, kPrinciple };

struct Criterion {
  std::string id;
  CriterionKind kind = CriterionKind::kPrinciple;
  double base_weight = 1.0;
};

// Ordered set of K criteria sharing one score ceiling.
class Rubric {
 public:
  // Throws focal::Error when empty, ids repeat, a weight is negative, the
  // weights sum to zero, or s_max is not positive.
  explicit Rubric(std::vector<Criterion> criteria,
                  double s_max = kDefaultScoreMax);

  // K principle criteria "c0".."c{K-1}" with unit weights.
  static Rubric Uniform(std::size_t num_criteria,
                        double s_max = kDefaultScoreMax);

  std::size_t size() const { return criteria_.size(); }
  double s_max() const { return s_max_; }
  const std::vector<Criterion>& criteria() const { return criteria_; }
  const Criterion& operator[](std::size_t k) const { return criteria_[k]; }
  const std::vector<double>& base_weights() const { return base_weights_; }
  double base_mass() const { return base_mass_; }

 private:
  std::vector<Criterion> criteria_;
  std::vector<double> base_weights_;
  double base_mass_ = 0.0;
  double s_max_ = kDefaultScoreMax;
};

// Criterion scores s_{i,j}^(k) for every ordered pair i != j of a rollout
// group. Entry (i, j, k) is the score rollout i receives on criterion k when
// judged against rollout j. Indices are zero-based. Diagonal entries do not
// exist; unset entries hold NaN until filled.
class ScoreTensor {
 public:
  ScoreTensor(std::size_t group_size, std::size_t num_criteria);

  std::size_t group_size() const { return group_size_; }
  std::size_t num_criteria() const { return num_criteria_; }

  double operator()(std::size_t i, std::size_t j, std::size_t k) const;
  void Set(std::size_t i, std::size_t j, std::size_t k, double score);

  // The K-vector s_{i,j}.
  std::span<const double> Pair(std::size_t i, std::size_t j) const;
  std::span<double> MutablePair(std::size_t i, std::size_t j);

  bool IsPairComplete(std::size_t i, std::size_t j) const;

  // Checks completeness and that every score lies in [0, s_max]. The error
  // message names the first offending pair.
  void Validate(double s_max) const;

  friend bool operator==(const ScoreTensor& a, const ScoreTensor& b);

 private:
  std::size_t Offset(std::size_t i, std::size_t j) const;
  void CheckPair(std::size_t i, std::size_t j) const;

  std::size_t group_size_;
  std::size_t num_criteria_;
  std::vector<double> scores_;
};

struct SynthesisConfig {
  double tau = kDefaultTau;
  double temperature = kDefaultTemperature;
  double gamma = kDefaultGamma;
  double epsilon = kDefaultEpsilon;
  double advantage_std_floor = kDefaultAdvantageStdFloor;

  void Validate() const;
};

// S_{i,j}(w) = <w, s_{i,j}>.
double WeightedScore(std::span<const double> weights,
                     std::span<const double> pair_scores);

// Delta_{i,j}(w) = S_{i,j}(w) - S_{j,i}(w). Antisymmetric bit-for-bit.
double PairwiseMargin(std::span<const double> weights,
                      const ScoreTensor& tensor, std::size_t i,
                      std::size_t j);

// Discrete win/loss credit in {-2, -1, 0, 1, 2}: strong when |delta| >= tau.
int PhiTau(double delta, double tau);

// R_i(w) = sum_{j != i} PhiTau(Delta_{i,j}(w)).
std::vector<double> GroupRewards(std::span<const double> weights,
                                 const ScoreTensor& tensor, double tau);

// Group-relative advantage (R_i - mean) / std with the population standard
// deviation. Returns zeros when std < std_floor.
std::vector<double> GroupAdvantage(
    std::span<const double> rewards,
    double std_floor = kDefaultAdvantageStdFloor);

}  // namespace focal

#endif  // FOCAL_RUBRIC_H_
