#include "focal/experiment.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "focal/error.h"

namespace focal {
namespace {

namespace fs = std::filesystem;

std::string ReadFile(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path Scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("focal_experiment_test_" + name);
  fs::remove_all(dir);
  return dir;
}

TEST(ParseSeedList, Forms) {
  EXPECT_EQ(ParseSeedList("42"), (std::vector<std::uint64_t>{42}));
  EXPECT_EQ(ParseSeedList("3,5,8"), (std::vector<std::uint64_t>{3, 5, 8}));
  EXPECT_EQ(ParseSeedList("1..4"), (std::vector<std::uint64_t>{1, 2, 3, 4}));
  EXPECT_EQ(ParseSeedList("1..2,9"), (std::vector<std::uint64_t>{1, 2, 9}));
  EXPECT_EQ(ParseSeedList("1..20").size(), 20u);
  EXPECT_THROW(ParseSeedList(""), Error);
  EXPECT_THROW(ParseSeedList("5..1"), Error);
  EXPECT_THROW(ParseSeedList("x"), Error);
  EXPECT_THROW(ParseSeedList("1,,2"), Error);
}

TEST(ApplyConfigJson, OverlaysKnownKeys) {
  ExperimentConfig c;
  ApplyConfigJson(R"({"tau": 0.5, "temperature": 4, "gamma": 3, "epsilon": 0.05,
                      "modes": ["focal", "no-frontier"], "seeds": "1..3",
                      "out": "run", "tensors": ["a.json"],
                      "sim": {"steps": 7, "noise_scale": 0.2,
                              "profile": [{"initial_ability": 0.1, "rate": 0.3}]},
                      "theory": {"mc_samples": 1000},
                      "rubric": {"criteria": [{"id": "x", "base_weight": 2}]}})",
                  "cfg.json", "/base", c);
  EXPECT_EQ(c.synthesis.tau, 0.5);
  EXPECT_EQ(c.synthesis.temperature, 4.0);
  EXPECT_EQ(c.synthesis.gamma, 3.0);
  EXPECT_EQ(c.synthesis.epsilon, 0.05);
  EXPECT_EQ(c.modes, (std::vector<sim::Mode>{sim::Mode::kFocal, sim::Mode::kNoFrontier}));
  EXPECT_EQ(c.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(c.output_dir, fs::path("/base/run"));
  EXPECT_EQ(c.tensor_paths.at(0), fs::path("/base/a.json"));
  EXPECT_EQ(c.sim.steps, 7u);
  EXPECT_EQ(c.sim.profile.size(), 1u);
  EXPECT_EQ(c.theory.mc_samples, 1000);
  ASSERT_TRUE(c.rubric.has_value());
  EXPECT_EQ(c.rubric->base_mass(), 2.0);
}

TEST(ApplyConfigJson, RejectsUnknownKeysAndBadJson) {
  ExperimentConfig c;
  EXPECT_THROW(ApplyConfigJson(R"({"temprature": 3})", "cfg", ".", c), Error);
  EXPECT_THROW(ApplyConfigJson(R"({"sim": {"stepz": 3}})", "cfg", ".", c), Error);
  EXPECT_THROW(ApplyConfigJson(R"({"tau": "one"})", "cfg", ".", c), Error);
  EXPECT_THROW(ApplyConfigJson("[1]", "cfg", ".", c), Error);
  EXPECT_THROW(ApplyConfigJson("{", "cfg", ".", c), Error);
  EXPECT_THROW(ApplyConfigJson(R"({"modes": ["dynamic"]})", "cfg", ".", c), Error);
}

TEST(ExperimentConfig, FinalizeDefaultsAndValidation) {
  ExperimentConfig sim;
  sim.Finalize(Command::kSimulate);
  EXPECT_EQ(sim.modes, (std::vector<sim::Mode>{sim::Mode::kStatic, sim::Mode::kFocal}));
  EXPECT_FALSE(sim.seeds.empty());

  ExperimentConfig synth;
  EXPECT_THROW(synth.Finalize(Command::kSynthesize), Error);  // no tensor
  synth.tensor_paths = {"x.json"};
  synth.modes = {sim::Mode::kFrozen};
  EXPECT_THROW(synth.Finalize(Command::kSynthesize), Error);  // frozen without weights

  ExperimentConfig bad;
  bad.synthesis.tau = -1.0;
  EXPECT_THROW(bad.Finalize(Command::kVerifyTheory), Error);
}

TEST(RunCommand, SynthesizeFixture) {
  ExperimentConfig c;
  c.tensor_paths = {fs::path(FOCAL_FIXTURE_DIR) / "group.json"};
  c.output_dir = Scratch("synth");
  c.Finalize(Command::kSynthesize);
  std::ostringstream log;
  EXPECT_EQ(RunCommand(Command::kSynthesize, c, log), 0);
  const auto rollouts = ReadFile(c.output_dir / "synthesis_rollouts.csv");
  EXPECT_EQ(rollouts.substr(0, rollouts.find('\n')),
            "group_id,mode,rollout,base_reward,gibbs_weight,reward,base_advantage,advantage");
  // Header plus 3 rollouts for each of static and focal.
  EXPECT_EQ(std::count(rollouts.begin(), rollouts.end(), '\n'), 7);
  EXPECT_NE(rollouts.find("prompt-17,focal,2,"), std::string::npos);
  EXPECT_TRUE(fs::exists(c.output_dir / "synthesis_criteria.csv"));
  fs::remove_all(c.output_dir);
}

TEST(RunCommand, AnalyzeFixture) {
  ExperimentConfig c;
  c.tensor_paths = {fs::path(FOCAL_FIXTURE_DIR) / "group.json"};
  c.output_dir = Scratch("analyze");
  c.Finalize(Command::kAnalyze);
  std::ostringstream log;
  EXPECT_EQ(RunCommand(Command::kAnalyze, c, log), 0);
  for (const char* f : {"transition_matrix.csv", "transition_matrix.svg", "headroom_quintiles.csv",
                        "weight_cosine.csv", "criterion_buckets.csv"}) {
    EXPECT_TRUE(fs::exists(c.output_dir / f)) << f;
  }
  const auto matrix = ReadFile(c.output_dir / "transition_matrix.csv");
  EXPECT_EQ(std::count(matrix.begin(), matrix.end(), '\n'), 26);
  fs::remove_all(c.output_dir);
}

TEST(RunCommand, SimulateWritesPairedOutputsDeterministically) {
  ExperimentConfig c;
  c.sim.steps = 20;
  c.seeds = {1, 2};
  c.Finalize(Command::kSimulate);
  std::string first;
  for (int round = 0; round < 2; ++round) {
    c.output_dir = Scratch("sim" + std::to_string(round));
    std::ostringstream log;
    ASSERT_EQ(RunCommand(Command::kSimulate, c, log), 0);
    const auto traj = ReadFile(c.output_dir / "trajectory_focal_seed2.csv");
    EXPECT_EQ(traj.substr(0, traj.find('\n')),
              "step,criterion_id,ability,saturation,weight,bucket,mean_score");
    // 21 steps x 3 criteria plus the header.
    EXPECT_EQ(std::count(traj.begin(), traj.end(), '\n'), 64);
    EXPECT_TRUE(fs::exists(c.output_dir / "paired_comparison.csv"));
    EXPECT_TRUE(fs::exists(c.output_dir / "saturation_static.svg"));
    const auto all = ReadFile(c.output_dir / "simulation_summary.csv") + traj;
    if (round == 0) {
      first = all;
    } else {
      EXPECT_EQ(all, first);
    }
    fs::remove_all(c.output_dir);
  }
}

TEST(RunCommand, VerifyTheoryReportsAndFailsNothing) {
  ExperimentConfig c;
  c.theory.mc_samples = 20'000;
  c.theory.mc_instances = 5;
  c.theory.gap_models = 10;
  c.theory.sphere_directions = 500;
  c.theory.gibbs_instances = 500;
  c.theory.shift_tensors = 20;
  c.json_report = true;
  c.output_dir = Scratch("verify");
  c.Finalize(Command::kVerifyTheory);
  std::ostringstream log;
  EXPECT_EQ(RunCommand(Command::kVerifyTheory, c, log), 0) << log.str();
  const auto csv = ReadFile(c.output_dir / "verification_report.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "check,relation,computed,target,tolerance,pass");
  EXPECT_EQ(csv.find(",false"), std::string::npos);
  EXPECT_TRUE(fs::exists(c.output_dir / "verification_report.json"));
  fs::remove_all(c.output_dir);
}

TEST(RunCommand, UnwritableOutputIsAnError) {
  ExperimentConfig c;
  c.sim.steps = 1;
  c.output_dir = "/proc/focal_cannot_write_here";
  c.Finalize(Command::kSimulate);
  std::ostringstream log;
  EXPECT_THROW(RunCommand(Command::kSimulate, c, log), Error);
}

TEST(RunTheorySuite, AllChecksCarryTolerances) {
  TheorySuiteOptions o;
  o.mc_samples = 5'000;
  o.mc_instances = 3;
  o.gap_models = 5;
  o.sphere_directions = 200;
  o.gibbs_instances = 200;
  o.shift_tensors = 5;
  const auto report = RunTheorySuite(o);
  EXPECT_TRUE(report.AllPassed());
  EXPECT_GE(report.checks().size(), 15u);
  for (const auto& c : report.checks()) EXPECT_GE(c.tolerance, 0.0) << c.name;
}

}  // namespace
}  // namespace focal
