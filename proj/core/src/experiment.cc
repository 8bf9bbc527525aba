#include "focal/experiment.h"

#include <algorithm>
#include <charconv>
#include <concepts>
#include <cmath>
#include <fstream>
#include <future>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "focal/analysis.h"
#include "focal/error.h"
#include "focal/random_instances.h"
#include "focal/svg.h"
#include "focal/synthesis.h"
#include "focal/tensor_io.h"
#include "focal/theory.h"
#include "json.hpp"

namespace focal {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// ---------------------------------------------------------------------------
// Theory suite

void AddMisallocationChecks(const TheorySuiteOptions& o, random::Rng& rng,
                            VerificationReport& report) {
  const double n = static_cast<double>(o.mc_samples);

  // K = 1, eta = 3, Sigma = 1, a = 1: Xi = 9 and the exact rate is Phi(-3).
  {
    theory::LatentModel model{Eigen::VectorXd::Constant(1, 3.0),
                              Eigen::MatrixXd::Identity(1, 1),
                              Eigen::MatrixXd::Identity(1, 1), 0.5};
    const auto est = theory::EstimateMisallocation(Eigen::VectorXd::Constant(1, 1.0),
                                                   model, o.mc_samples, rng());
    report.Add("misallocation_k1_rate_plus_3se_vs_bound", Relation::kAtMost,
               est.empirical_rate + 3.0 * est.std_err, est.bound, 0.0);
    const double tail = 0.5 * std::erfc(3.0 / std::sqrt(2.0));
    report.Add("misallocation_k1_rate_vs_gaussian_tail", Relation::kNear,
               est.empirical_rate, tail, 5.0 * std::sqrt(tail * (1.0 - tail) / n));
  }
  // eta = 0: bound is 1 and the margin is a symmetric Gaussian.
  {
    theory::LatentModel model{Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2),
                              Eigen::MatrixXd::Identity(2, 2), 0.5};
    const auto est = theory::EstimateMisallocation(Eigen::VectorXd::Ones(2), model,
                                                   o.mc_samples, rng());
    report.Add("misallocation_zero_edge_bound", Relation::kNear, est.bound, 1.0, 0.0);
    report.Add("misallocation_zero_edge_rate", Relation::kNear, est.empirical_rate, 0.5,
               5.0 * std::sqrt(0.25 / n));
  }
  // Random instances, edge rescaled so Xi spans [0, 10].
  double worst = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < o.mc_instances; ++m) {
    const std::size_t k = random::UniformIndex(rng, 1, 6);
    auto model = random::RandomLatentModel(rng, k);
    const Eigen::VectorXd a = random::NonnegativeDirection(rng, k);
    const double xi = theory::XiSurrogate(a, model);
    const double target = random::Uniform(rng, 0.0, 10.0);
    if (xi > 0.0) model.eta *= std::sqrt(target / xi);
    const auto est = theory::EstimateMisallocation(a, model, o.mc_samples, rng());
    worst = std::max(worst, est.empirical_rate + 3.0 * est.std_err - est.bound);
  }
  if (o.mc_instances > 0) {
    report.Add("misallocation_random_worst_rate_plus_3se_minus_bound",
               Relation::kAtMost, worst, 0.0, 0.0);
  }
}

void AddStaticGapChecks(const TheorySuiteOptions& o, random::Rng& rng,
                        VerificationReport& report) {
  {
    theory::HeadroomModel model;
    model.base = Eigen::Vector2d(1.0, 1.0);
    model.headroom = Eigen::Vector2d(1.0, 0.0);
    const auto gap = theory::ComputeStaticGap(model);
    report.Add("static_gap_example_closed_form", Relation::kNear, gap.closed_form, 0.5, 1e-12);
    report.Add("static_gap_example_oracle", Relation::kNear, gap.oracle, 0.5, 1e-12);
  }
  double worst_rel = 0.0;
  double min_gap = std::numeric_limits<double>::infinity();
  double worst_excess = -std::numeric_limits<double>::infinity();
  double worst_shortfall = -std::numeric_limits<double>::infinity();
  for (std::size_t m = 0; m < o.gap_models; ++m) {
    const std::size_t k = random::UniformIndex(rng, 2, 12);
    const auto model = random::RandomHeadroomModel(rng, k);
    const auto gap = theory::ComputeStaticGap(model);
    worst_rel = std::max(worst_rel, std::abs(gap.closed_form - gap.oracle) /
                                        std::max(gap.closed_form, 1e-12));
    min_gap = std::min({min_gap, gap.closed_form, gap.oracle});

    const auto latent = model.IsotropicLatent();
    const double xi_star =
        theory::XiSurrogate(theory::PreferredDirection(model), latent);
    const auto search = theory::SearchXiOnSphere(latent, o.sphere_directions, rng());
    worst_excess = std::max(
        {worst_excess, (search.best_sampled_xi - xi_star) / xi_star,
         (search.refined_xi - xi_star) / xi_star});
    worst_shortfall = std::max(worst_shortfall, (xi_star - search.refined_xi) / xi_star);
  }
  if (o.gap_models > 0) {
    report.Add("static_gap_identity_worst_relative_error", Relation::kAtMost, worst_rel,
               0.0, 1e-9);
    report.Add("static_gap_minimum", Relation::kAtLeast, min_gap, 0.0, 1e-12);
    report.Add("sphere_search_worst_relative_excess", Relation::kAtMost, worst_excess,
               0.0, 1e-6);
    report.Add("sphere_search_worst_relative_shortfall", Relation::kAtMost,
               worst_shortfall, 0.0, 1e-6);
  }
}

void AddGibbsChecks(const TheorySuiteOptions& o, random::Rng& rng,
                    VerificationReport& report) {
  {
    const std::vector<double> rewards = {5.0, 0.0};
    const std::vector<std::size_t> frontier = {0};
    const std::vector<double> z = {1.0, 0.0};
    const auto r = theory::CheckGibbsBound(rewards, frontier, 10.0, z);
    report.Add("gibbs_two_rollout_mass_out", Relation::kNear, r.mass_out,
               1.0 / (1.0 + std::exp(0.5)), 1e-9);
    report.Add("gibbs_two_rollout_bound", Relation::kNear, r.bound, std::exp(-0.5), 1e-12);
    report.Add("gibbs_two_rollout_mass_minus_bound", Relation::kAtMost,
               r.mass_out - r.bound, 0.0, 0.0);
  }
  long mass_violations = 0;
  long proxy_violations = 0;
  for (std::size_t m = 0; m < o.gibbs_instances; ++m) {
    const std::size_t g = random::UniformIndex(rng, 2, 12);
    const std::size_t s = random::UniformIndex(rng, 1, g - 1);
    const double temperature = std::exp(random::Uniform(rng, std::log(0.05), std::log(50.0)));
    const double delta = random::Uniform(rng, 1e-3, 30.0);
    std::vector<double> rewards(g);
    double max_out = -std::numeric_limits<double>::infinity();
    for (std::size_t i = s; i < g; ++i) {
      rewards[i] = random::Uniform(rng, -20.0, 0.0);
      max_out = std::max(max_out, rewards[i]);
    }
    for (std::size_t i = 0; i < s; ++i) {
      rewards[i] = max_out + delta + (i == 0 ? 0.0 : random::Uniform(rng, 0.0, 5.0));
    }
    std::vector<std::size_t> frontier(s);
    for (std::size_t i = 0; i < s; ++i) frontier[i] = i;
    std::vector<double> z(g);
    for (auto& v : z) v = random::Uniform(rng, 0.0, 1.0);
    const auto r = theory::CheckGibbsBound(rewards, frontier, temperature, z);
    if (!r.mass_within_bound) ++mass_violations;
    if (!r.proxy_within_bound) ++proxy_violations;
  }
  report.Add("gibbs_frontier_mass_violations", Relation::kAtMost,
             static_cast<double>(mass_violations), 0.0, 0.0);
  report.Add("gibbs_frontier_proxy_violations", Relation::kAtMost,
             static_cast<double>(proxy_violations), 0.0, 0.0);

  // Temperature limits on rewards produced by the group-reward map.
  double worst_uniform_dev = 0.0;
  double worst_argmax_mass = 1.0;
  for (std::size_t m = 0; m < 1000; ++m) {
    const std::size_t g = random::UniformIndex(rng, 2, 8);
    const std::size_t k = random::UniformIndex(rng, 1, 12);
    const auto tensor = random::UniformTensor(rng, g, k, kDefaultScoreMax);
    const auto rewards = GroupRewards(random::SparseWeights(rng, k), tensor, kDefaultTau);
    const auto hot = ComputeGibbsWeights(rewards, 1e6);
    for (double v : hot.values) {
      worst_uniform_dev = std::max(worst_uniform_dev, std::abs(v - 1.0 / static_cast<double>(g)));
    }
    const auto top = std::max_element(rewards.begin(), rewards.end());
    if (std::count(rewards.begin(), rewards.end(), *top) == 1) {
      const auto cold = ComputeGibbsWeights(rewards, 1e-6);
      worst_argmax_mass = std::min(
          worst_argmax_mass, cold.values[static_cast<std::size_t>(top - rewards.begin())]);
    }
  }
  report.Add("gibbs_high_temperature_max_deviation_from_uniform", Relation::kAtMost,
             worst_uniform_dev, 0.0, 1e-4);
  report.Add("gibbs_low_temperature_min_argmax_mass", Relation::kAtLeast,
             worst_argmax_mass, 1.0, 1e-6);
}

void AddShiftChecks(const TheorySuiteOptions& o, random::Rng& rng,
                    VerificationReport& report) {
  double worst_invariance = 0.0;
  double worst_shift_error = 0.0;
  const SynthesisConfig config;
  for (std::size_t m = 0; m < o.shift_tensors; ++m) {
    const std::size_t g = random::UniformIndex(rng, 2, 8);
    const std::size_t k_count = random::UniformIndex(rng, 1, 12);
    const Rubric rubric = random::RandomRubric(rng, k_count, kDefaultScoreMax);
    const auto tensor = random::UniformTensor(rng, g, k_count, rubric.s_max());
    const std::size_t k = random::UniformIndex(rng, 0, k_count - 1);
    double lo = rubric.s_max(), hi = 0.0;
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        if (i == j) continue;
        lo = std::min(lo, tensor(i, j, k));
        hi = std::max(hi, tensor(i, j, k));
      }
    }
    const double b = random::Uniform(rng, -lo, rubric.s_max() - hi);
    const auto r = theory::ProbeShift(tensor, rubric, config, k, b);
    worst_invariance = std::max({worst_invariance, r.max_margin_diff, r.max_reward_diff,
                                 r.max_gibbs_diff, r.max_other_saturation_diff});
    worst_shift_error =
        std::max(worst_shift_error, std::abs(r.saturation_shift - r.expected_shift));
  }
  report.Add("shift_probe_worst_invariance_diff", Relation::kAtMost, worst_invariance, 0.0,
             1e-12);
  report.Add("shift_probe_worst_saturation_shift_error", Relation::kAtMost,
             worst_shift_error, 0.0, 1e-12);
}

// ---------------------------------------------------------------------------
// Output helpers

class CsvFile {
 public:
  CsvFile(const fs::path& path, std::string_view header) : path_(path), out_(path) {
    if (!out_) {
      throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
    }
    out_ << header << '\n';
  }
  template <typename... Cells>
  void Row(const Cells&... cells) {
    std::string line;
    ((line += Cell(cells), line += ','), ...);
    line.back() = '\n';
    out_ << line;
  }
  const fs::path& path() const { return path_; }

 private:
  static std::string Cell(double v) { return FormatNumber(v); }
  static std::string Cell(const std::string& s) { return s; }
  static std::string Cell(std::string_view s) { return std::string(s); }
  static std::string Cell(const char* s) { return s; }
  template <std::integral I>
  static std::string Cell(I v) {
    return std::to_string(v);
  }

  fs::path path_;
  std::ofstream out_;
};

void WriteText(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  out << text;
}

void PrepareOutputDir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw Error(ErrorCode::kIo,
                fmt::format("cannot create output directory '{}'", dir.string()));
  }
  const fs::path probe = dir / ".focal_write_probe";
  {
    std::ofstream out(probe);
    if (!out) {
      throw Error(ErrorCode::kIo,
                  fmt::format("output directory '{}' is not writable", dir.string()));
    }
  }
  fs::remove(probe, ec);
}

SynthesisResult SynthesizeMode(const ScoreGroup& group, const SynthesisConfig& config,
                               sim::Mode mode, const std::vector<double>& frozen) {
  switch (mode) {
    case sim::Mode::kStatic:
      return SynthesizeStatic(group.tensor, group.rubric, config);
    case sim::Mode::kFocal:
      return Synthesize(group.tensor, group.rubric, config);
    case sim::Mode::kNoFrontier:
      return SynthesizeAblated(group.tensor, group.rubric, config, NoFrontierWeighting{});
    case sim::Mode::kFrozen:
      return SynthesizeAblated(group.tensor, group.rubric, config, FrozenScalarizer{frozen});
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown mode");
}

std::vector<ScoreGroup> LoadGroups(const ExperimentConfig& config) {
  std::vector<ScoreGroup> groups;
  for (const auto& path : config.tensor_paths) {
    groups.push_back(LoadScoreGroup(path, {config.average_duplicates}));
    if (groups.back().group_id.empty()) {
      groups.back().group_id = path.stem().string();
    }
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Commands

int RunSynthesizeCommand(const ExperimentConfig& config, std::ostream& log) {
  const auto groups = LoadGroups(config);
  PrepareOutputDir(config.output_dir);
  CsvFile rollouts(config.output_dir / "synthesis_rollouts.csv",
                   "group_id,mode,rollout,base_reward,gibbs_weight,reward,"
                   "base_advantage,advantage");
  CsvFile criteria(config.output_dir / "synthesis_criteria.csv",
                   "group_id,mode,criterion_id,kind,base_weight,saturation,applied_weight");
  for (const auto& group : groups) {
    for (sim::Mode mode : config.modes) {
      const auto result = SynthesizeMode(group, config.synthesis, mode, config.frozen_weights);
      const std::string_view mode_name = sim::ModeName(mode);
      for (std::size_t i = 0; i < result.base_rewards.size(); ++i) {
        rollouts.Row(group.group_id, mode_name, i + 1, result.base_rewards[i],
                     result.gibbs.values[i], result.focal_rewards[i],
                     result.base_advantages[i], result.focal_advantages[i]);
      }
      for (std::size_t k = 0; k < group.rubric.size(); ++k) {
        const auto& c = group.rubric[k];
        criteria.Row(group.group_id, mode_name, c.id,
                     CriterionKindName(c.kind), c.base_weight, result.saturation.values[k],
                     result.focal_weights.values[k]);
      }
      for (const auto& w : result.warnings) {
        log << "warning: " << group.group_id << " [" << mode_name << "]: " << w << '\n';
      }
    }
    log << fmt::format("synthesized group '{}' (G={}, K={})\n", group.group_id,
                       group.tensor.group_size(), group.tensor.num_criteria());
  }
  log << "wrote " << rollouts.path().string() << '\n'
      << "wrote " << criteria.path().string() << '\n';
  return 0;
}

int RunSimulateCommand(const ExperimentConfig& config, std::ostream& log) {
  PrepareOutputDir(config.output_dir);
  const Rubric rubric =
      config.rubric ? *config.rubric : Rubric::Uniform(config.sim.num_criteria());
  if (rubric.size() != config.sim.num_criteria()) {
    throw Error(ErrorCode::kDimensionMismatch,
                "rubric and simulation profile differ in criterion count");
  }

  struct Job {
    sim::Mode mode;
    std::uint64_t seed;
  };
  std::vector<Job> jobs;
  for (sim::Mode mode : config.modes) {
    for (std::uint64_t seed : config.seeds) jobs.push_back({mode, seed});
  }
  // Independent seeded runs; results are consumed in job order.
  std::vector<std::future<sim::TrajectoryRecord>> futures;
  for (const Job& job : jobs) {
    sim::SimSpec spec = config.sim;
    spec.seed = job.seed;
    futures.push_back(std::async(std::launch::async, [spec, &rubric, &config, job] {
      return sim::RunExperiment(spec, rubric, config.synthesis, job.mode);
    }));
  }
  std::vector<sim::TrajectoryRecord> records;
  for (auto& f : futures) records.push_back(f.get());

  CsvFile summary(config.output_dir / "simulation_summary.csv",
                  "mode,seed,criterion_id,bucket,initial_ability,final_ability,"
                  "final_mean_score");
  CsvFile pass_rates(config.output_dir / "pass_rates.csv",
                     "mode,seed,step,hard,medium,easy");
  std::map<std::pair<sim::Mode, std::uint64_t>, const sim::TrajectoryRecord*> by_key;
  std::map<sim::Mode, bool> plotted;
  for (const auto& rec : records) {
    const std::string mode_name(sim::ModeName(rec.mode));
    by_key[{rec.mode, rec.seed}] = &rec;
    CsvFile trajectory(
        config.output_dir / fmt::format("trajectory_{}_seed{}.csv", mode_name, rec.seed),
        "step,criterion_id,ability,saturation,weight,bucket,mean_score");
    for (const auto& step : rec.steps) {
      for (std::size_t k = 0; k < rubric.size(); ++k) {
        trajectory.Row(step.step, rubric[k].id, step.abilities[k], step.saturation[k],
                       step.weights[k], BucketName(rec.buckets[k]), step.mean_scores[k]);
      }
      pass_rates.Row(mode_name, rec.seed, step.step, step.pass_rate_hard,
                     step.pass_rate_medium, step.pass_rate_easy);
    }
    const auto& first = rec.steps.front();
    const auto& last = rec.final();
    for (std::size_t k = 0; k < rubric.size(); ++k) {
      summary.Row(mode_name, rec.seed, rubric[k].id, BucketName(rec.buckets[k]),
                  first.abilities[k], last.abilities[k], last.mean_scores[k]);
    }
    if (!plotted[rec.mode]) {
      plotted[rec.mode] = true;
      std::vector<svg::Series> series;
      for (std::size_t k = 0; k < rubric.size(); ++k) {
        svg::Series s{fmt::format("{} ({})", rubric[k].id, BucketName(rec.buckets[k])), {}, {}};
        for (const auto& step : rec.steps) {
          s.xs.push_back(static_cast<double>(step.step));
          s.ys.push_back(step.saturation[k]);
        }
        series.push_back(std::move(s));
      }
      WriteText(config.output_dir / fmt::format("saturation_{}.svg", mode_name),
                svg::LinePlot(fmt::format("Criterion saturation ({}, seed {})", mode_name,
                                          rec.seed),
                              "step", "saturation P", series, 0.0, 1.0));
    }
    for (const auto& w : rec.warnings) {
      log << "warning: " << mode_name << " seed " << rec.seed << ": " << w << '\n';
    }
  }

  const bool paired = std::count(config.modes.begin(), config.modes.end(), sim::Mode::kStatic) &&
                      std::count(config.modes.begin(), config.modes.end(), sim::Mode::kFocal);
  if (paired) {
    CsvFile comparison(config.output_dir / "paired_comparison.csv",
                       "seed,criterion_id,bucket,static_final,focal_final,difference");
    for (std::uint64_t seed : config.seeds) {
      const auto* s = by_key.at({sim::Mode::kStatic, seed});
      const auto* f = by_key.at({sim::Mode::kFocal, seed});
      for (std::size_t k = 0; k < rubric.size(); ++k) {
        const double a = s->final().abilities[k];
        const double b = f->final().abilities[k];
        comparison.Row(seed, rubric[k].id, BucketName(s->buckets[k]), a, b, b - a);
      }
    }
  }
  log << fmt::format("simulated {} run(s) of {} steps into {}\n", records.size(),
                     config.sim.steps, config.output_dir.string());
  return 0;
}

int RunVerifyTheoryCommand(const ExperimentConfig& config, std::ostream& log) {
  PrepareOutputDir(config.output_dir);
  const VerificationReport report = RunTheorySuite(config.theory);
  {
    std::ofstream out(config.output_dir / "verification_report.csv", std::ios::binary);
    if (!out) throw Error(ErrorCode::kIo, "cannot write verification_report.csv");
    report.WriteCsv(out);
  }
  if (config.json_report) {
    WriteText(config.output_dir / "verification_report.json", report.ToJson());
  }
  for (const auto& c : report.checks()) {
    log << fmt::format("[{}] {} computed={} target={} tol={} ({})\n",
                       c.passed ? "PASS" : "FAIL", c.name, FormatNumber(c.computed),
                       FormatNumber(c.target), FormatNumber(c.tolerance),
                       RelationName(c.relation));
  }
  log << (report.AllPassed() ? "all checks passed\n" : "some checks FAILED\n");
  return report.AllPassed() ? 0 : 1;
}

int RunAnalyzeCommand(const ExperimentConfig& config, std::ostream& log) {
  const auto groups = LoadGroups(config);
  PrepareOutputDir(config.output_dir);
  // The first non-static mode is compared against static aggregation.
  sim::Mode mode = sim::Mode::kFocal;
  for (sim::Mode m : config.modes) {
    if (m != sim::Mode::kStatic) {
      mode = m;
      break;
    }
  }
  TransitionMatrix total;
  CsvFile quintiles(config.output_dir / "headroom_quintiles.csv",
                    "group_id,quintile,size,static_mean_share,reweighted_mean_share,"
                    "static_total_share,reweighted_total_share");
  CsvFile cosine(config.output_dir / "weight_cosine.csv", "group_id,mode,cosine");
  CsvFile buckets(config.output_dir / "criterion_buckets.csv",
                  "group_id,criterion_id,mean_score,bucket,pass_rate");
  for (const auto& group : groups) {
    const auto result = SynthesizeMode(group, config.synthesis, mode, config.frozen_weights);
    const auto matrix = OutcomeTransitionMatrix(result, group.rubric, group.tensor,
                                                config.synthesis.tau);
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t b = 0; b < 5; ++b) total.counts[a][b] += matrix.counts[a][b];
    }
    const auto base_q = HeadroomQuintiles(result.saturation, group.rubric.base_weights());
    const auto focal_q = HeadroomQuintiles(result.saturation, result.focal_weights.values);
    for (std::size_t q = 0; q < base_q.mean_share.size(); ++q) {
      quintiles.Row(group.group_id, q + 1, base_q.group_sizes[q], base_q.mean_share[q],
                    focal_q.mean_share[q], base_q.total_share[q], focal_q.total_share[q]);
    }
    cosine.Row(group.group_id, sim::ModeName(mode),
               WeightCosine(group.rubric.base_weights(), result.focal_weights.values));
    std::vector<double> mean_scores(group.rubric.size());
    for (std::size_t k = 0; k < group.rubric.size(); ++k) {
      const auto column = result.criterion_means.Column(k);
      double sum = 0.0;
      for (double v : column) sum += v;
      mean_scores[k] = sum / static_cast<double>(column.size());
    }
    // Thresholds are expressed on the 0-10 scale.
    std::vector<double> scaled(mean_scores);
    for (auto& v : scaled) v *= kDefaultScoreMax / group.rubric.s_max();
    const auto labels = BucketCriteria(scaled);
    for (std::size_t k = 0; k < group.rubric.size(); ++k) {
      const auto column = result.criterion_means.Column(k);
      std::vector<double> column_scaled(column);
      for (auto& v : column_scaled) v *= kDefaultScoreMax / group.rubric.s_max();
      buckets.Row(group.group_id, group.rubric[k].id, mean_scores[k], BucketName(labels[k]),
                  PassRate(column_scaled, DefaultPassThreshold(labels[k])));
    }
  }
  CsvFile transitions(config.output_dir / "transition_matrix.csv",
                      "static_outcome,reweighted_outcome,count");
  std::vector<std::vector<double>> cells(5, std::vector<double>(5, 0.0));
  const double pairs = static_cast<double>(std::max(1L, total.Total()));
  for (int a = -2; a <= 2; ++a) {
    for (int b = -2; b <= 2; ++b) {
      transitions.Row(a, b, total.At(a, b));
      cells[static_cast<std::size_t>(a + 2)][static_cast<std::size_t>(b + 2)] =
          100.0 * static_cast<double>(total.At(a, b)) / pairs;
    }
  }
  const std::vector<std::string> labels = {"-2", "-1", "0", "+1", "+2"};
  WriteText(config.output_dir / "transition_matrix.svg",
            svg::Heatmap(fmt::format("Pair outcomes: static -> {} (% of pairs)",
                                     sim::ModeName(mode)),
                         "static", std::string(sim::ModeName(mode)), labels, labels, cells));
  log << fmt::format("analyzed {} group(s): {} ordered pairs, {} on the diagonal\n",
                     groups.size(), total.Total(), total.Diagonal());
  return 0;
}

// ---------------------------------------------------------------------------
// Config file parsing

std::vector<double> JsonNumbers(const json& v, const std::string& key) {
  if (!v.is_array()) throw Error(ErrorCode::kParse, key + " must be an array of numbers");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw Error(ErrorCode::kParse, key + " must contain numbers");
    out.push_back(x.get<double>());
  }
  return out;
}

Rubric RubricFromJson(const json& v, const std::string& where) {
  const json* list = &v;
  double s_max = kDefaultScoreMax;
  if (v.is_object()) {
    if (!v.contains("criteria")) throw Error(ErrorCode::kParse, where + ": missing criteria");
    list = &v.at("criteria");
    if (v.contains("s_max")) s_max = v.at("s_max").get<double>();
  }
  if (!list->is_array()) throw Error(ErrorCode::kParse, where + ": criteria must be an array");
  std::vector<Criterion> criteria;
  for (const auto& entry : *list) {
    Criterion c;
    c.id = entry.at("id").get<std::string>();
    const std::string kind = entry.value("kind", std::string("principle"));
    if (kind != "principle" && kind != "hard_rule") {
      throw Error(ErrorCode::kParse, fmt::format("{}: unknown kind '{}'", where, kind));
    }
    c.kind = kind == "hard_rule" ? CriterionKind::kHardRule : CriterionKind::kPrinciple;
    c.base_weight = entry.value("base_weight", 1.0);
    criteria.push_back(std::move(c));
  }
  return Rubric(std::move(criteria), s_max);
}

template <typename T>
T Require(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kParse, fmt::format("config key '{}': {}", key, e.what()));
  }
}

}  // namespace

VerificationReport RunTheorySuite(const TheorySuiteOptions& options) {
  VerificationReport report;
  random::Rng rng(options.seed);
  {
    theory::LatentModel model{Eigen::VectorXd::Constant(1, 2.0),
                              Eigen::MatrixXd::Identity(1, 1),
                              Eigen::MatrixXd::Identity(1, 1), 0.5};
    report.Add("xi_scalar_example", Relation::kNear,
               theory::XiSurrogate(Eigen::VectorXd::Constant(1, 3.0), model), 4.0, 1e-12);
  }
  AddMisallocationChecks(options, rng, report);
  AddStaticGapChecks(options, rng, report);
  AddGibbsChecks(options, rng, report);
  AddShiftChecks(options, rng, report);
  return report;
}

void ExperimentConfig::Finalize(Command command) {
  synthesis.Validate();
  switch (command) {
    case Command::kSynthesize:
    case Command::kAnalyze:
      if (tensor_paths.empty()) {
        throw Error(ErrorCode::kInvalidArgument, "at least one --tensor is required");
      }
      if (modes.empty()) {
        modes = command == Command::kSynthesize
                    ? std::vector<sim::Mode>{sim::Mode::kStatic, sim::Mode::kFocal}
                    : std::vector<sim::Mode>{sim::Mode::kFocal};
      }
      if (std::count(modes.begin(), modes.end(), sim::Mode::kFrozen) &&
          frozen_weights.empty()) {
        throw Error(ErrorCode::kInvalidArgument,
                    "mode 'frozen' needs stored weights (--frozen-weights)");
      }
      break;
    case Command::kSimulate:
      if (modes.empty()) modes = {sim::Mode::kStatic, sim::Mode::kFocal};
      if (seeds.empty()) seeds = {1};
      sim.Validate();
      break;
    case Command::kVerifyTheory:
      if (theory.mc_samples < 1) {
        throw Error(ErrorCode::kInvalidArgument, "mc_samples must be >= 1");
      }
      break;
  }
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());
  std::vector<sim::Mode> unique_modes;
  for (sim::Mode m : modes) {
    if (std::find(unique_modes.begin(), unique_modes.end(), m) == unique_modes.end()) {
      unique_modes.push_back(m);
    }
  }
  modes = std::move(unique_modes);
}

std::vector<std::uint64_t> ParseSeedList(std::string_view text) {
  auto parse_one = [&](std::string_view token) {
    std::uint64_t value = 0;
    const auto* begin = token.data();
    const auto* end = token.data() + token.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end || token.empty()) {
      throw Error(ErrorCode::kInvalidArgument,
                  fmt::format("invalid seed '{}' in '{}'", token, text));
    }
    return value;
  };
  std::vector<std::uint64_t> seeds;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t comma = text.find(',', start);
    const std::string_view token =
        text.substr(start, comma == std::string_view::npos ? text.size() - start
                                                            : comma - start);
    const std::size_t dots = token.find("..");
    if (dots != std::string_view::npos) {
      const auto lo = parse_one(token.substr(0, dots));
      const auto hi = parse_one(token.substr(dots + 2));
      if (hi < lo) {
        throw Error(ErrorCode::kInvalidArgument, fmt::format("empty seed range '{}'", token));
      }
      for (auto s = lo; s <= hi; ++s) seeds.push_back(s);
    } else {
      seeds.push_back(parse_one(token));
    }
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return seeds;
}

void ApplyConfigJson(std::string_view json_text, std::string_view source,
                     const fs::path& base_dir, ExperimentConfig& config) {
  json doc;
  try {
    doc = json::parse(json_text.begin(), json_text.end());
  } catch (const json::parse_error& e) {
    throw ParseError(ErrorCode::kParse, fmt::format("{}:byte {}", source, e.byte), e.what());
  }
  if (!doc.is_object()) {
    throw ParseError(ErrorCode::kParse, std::string(source), "config must be a JSON object");
  }
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  for (const auto& [key, v] : doc.items()) {
    if (key == "tau") {
      config.synthesis.tau = Require<double>(v, key);
    } else if (key == "temperature" || key == "temp") {
      config.synthesis.temperature = Require<double>(v, key);
    } else if (key == "gamma") {
      config.synthesis.gamma = Require<double>(v, key);
    } else if (key == "epsilon") {
      config.synthesis.epsilon = Require<double>(v, key);
    } else if (key == "advantage_std_floor") {
      config.synthesis.advantage_std_floor = Require<double>(v, key);
    } else if (key == "modes") {
      config.modes.clear();
      for (const auto& m : v) config.modes.push_back(sim::ParseMode(Require<std::string>(m, key)));
    } else if (key == "seeds") {
      config.seeds = v.is_string() ? ParseSeedList(v.get<std::string>())
                                   : Require<std::vector<std::uint64_t>>(v, key);
    } else if (key == "out") {
      config.output_dir = resolve(Require<std::string>(v, key));
    } else if (key == "json_report") {
      config.json_report = Require<bool>(v, key);
    } else if (key == "tensors") {
      config.tensor_paths.clear();
      for (const auto& p : v) config.tensor_paths.push_back(resolve(Require<std::string>(p, key)));
    } else if (key == "average_duplicates") {
      config.average_duplicates = Require<bool>(v, key);
    } else if (key == "frozen_weights") {
      config.frozen_weights = JsonNumbers(v, key);
    } else if (key == "rubric") {
      if (v.is_string()) {
        const fs::path path = resolve(v.get<std::string>());
        std::ifstream in(path);
        if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open rubric '{}'", path.string()));
        json rubric_doc;
        try {
          in >> rubric_doc;
        } catch (const json::exception& e) {
          throw ParseError(ErrorCode::kParse, path.string(), e.what());
        }
        config.rubric = RubricFromJson(rubric_doc, path.string());
      } else {
        config.rubric = RubricFromJson(v, std::string(source) + ":rubric");
      }
    } else if (key == "sim") {
      for (const auto& [sk, sv] : v.items()) {
        if (sk == "profile") {
          config.sim.profile.clear();
          for (const auto& p : sv) {
            config.sim.profile.push_back({p.at("initial_ability").get<double>(),
                                          p.at("rate").get<double>()});
          }
        } else if (sk == "noise_scale") {
          config.sim.noise_scale = Require<double>(sv, sk);
        } else if (sk == "group_size") {
          config.sim.group_size = Require<std::size_t>(sv, sk);
        } else if (sk == "steps") {
          config.sim.steps = Require<std::size_t>(sv, sk);
        } else if (sk == "learning_rate") {
          config.sim.learning_rate = Require<double>(sv, sk);
        } else {
          throw Error(ErrorCode::kParse, fmt::format("{}: unknown key 'sim.{}'", source, sk));
        }
      }
    } else if (key == "theory") {
      auto& t = config.theory;
      for (const auto& [tk, tv] : v.items()) {
        if (tk == "seed") {
          t.seed = Require<std::uint64_t>(tv, tk);
        } else if (tk == "mc_samples") {
          t.mc_samples = Require<std::int64_t>(tv, tk);
        } else if (tk == "mc_instances") {
          t.mc_instances = Require<std::size_t>(tv, tk);
        } else if (tk == "gap_models") {
          t.gap_models = Require<std::size_t>(tv, tk);
        } else if (tk == "sphere_directions") {
          t.sphere_directions = Require<std::size_t>(tv, tk);
        } else if (tk == "gibbs_instances") {
          t.gibbs_instances = Require<std::size_t>(tv, tk);
        } else if (tk == "shift_tensors") {
          t.shift_tensors = Require<std::size_t>(tv, tk);
        } else {
          throw Error(ErrorCode::kParse, fmt::format("{}: unknown key 'theory.{}'", source, tk));
        }
      }
    } else {
      throw Error(ErrorCode::kParse, fmt::format("{}: unknown config key '{}'", source, key));
    }
  }
}

void ApplyConfigFile(const fs::path& path, ExperimentConfig& config) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, fmt::format("cannot open config '{}'", path.string()));
  std::ostringstream buffer;
  buffer << in.rdbuf();
  ApplyConfigJson(buffer.str(), path.string(), path.parent_path(), config);
}

int RunCommand(Command command, const ExperimentConfig& config, std::ostream& log) {
  switch (command) {
    case Command::kSynthesize:
      return RunSynthesizeCommand(config, log);
    case Command::kSimulate:
      return RunSimulateCommand(config, log);
    case Command::kVerifyTheory:
      return RunVerifyTheoryCommand(config, log);
    case Command::kAnalyze:
      return RunAnalyzeCommand(config, log);
  }
  return 2;
}

}  // namespace focal
