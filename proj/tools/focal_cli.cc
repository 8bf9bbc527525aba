// focal: reward synthesis, rubric simulation and theory checks from the
// command line. Exit status: 0 success, 1 a verification check failed,
// 2 bad arguments, configuration or input.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "focal/error.h"
#include "focal/experiment.h"
#include "focal/sim.h"

namespace {

struct Flags {
  std::string config_path;
  double tau = 0.0;
  double temperature = 0.0;
  double gamma = 0.0;
  double epsilon = 0.0;
  std::vector<std::string> tensors;
  std::vector<std::string> modes;
  std::string seeds;
  std::uint64_t seed = 0;
  std::string out;
  bool json_report = false;
  bool average_duplicates = false;
  std::vector<double> frozen_weights;
  std::size_t steps = 0;
  std::size_t group_size = 0;
  double noise = 0.0;
  double learning_rate = 0.0;
  std::int64_t mc_samples = 0;
};

void AddSynthesisFlags(CLI::App* app, Flags& f) {
  app->add_option("--tau", f.tau, "decisive-win margin threshold");
  app->add_option("--temp", f.temperature, "Gibbs temperature");
  app->add_option("--gamma", f.gamma, "focusing exponent");
  app->add_option("--epsilon", f.epsilon, "headroom floor");
}

void AddCommonFlags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config_path, "JSON config file")->check(CLI::ExistingFile);
  app->add_option("--out", f.out, "output directory");
}

bool Given(const CLI::App* app, const char* name) {
  const CLI::Option* opt = app->get_option_no_throw(name);
  return opt != nullptr && opt->count() > 0;
}

// Config file first, then flags given on the command line.
focal::ExperimentConfig BuildConfig(const CLI::App* app, const Flags& f) {
  focal::ExperimentConfig config;
  if (Given(app, "--config")) focal::ApplyConfigFile(f.config_path, config);
  auto& s = config.synthesis;
  if (Given(app, "--tau")) s.tau = f.tau;
  if (Given(app, "--temp")) s.temperature = f.temperature;
  if (Given(app, "--gamma")) s.gamma = f.gamma;
  if (Given(app, "--epsilon")) s.epsilon = f.epsilon;
  if (Given(app, "--tensor")) {
    config.tensor_paths.assign(f.tensors.begin(), f.tensors.end());
  }
  if (Given(app, "--mode")) {
    config.modes.clear();
    for (const auto& m : f.modes) config.modes.push_back(focal::sim::ParseMode(m));
  }
  if (Given(app, "--seeds")) {
    config.seeds = focal::ParseSeedList(f.seeds);
  }
  if (Given(app, "--seed")) {
    if (app->get_name() == "verify-theory") {
      config.theory.seed = f.seed;
    } else {
      config.seeds = {f.seed};
    }
  }
  if (Given(app, "--out")) config.output_dir = f.out;
  if (Given(app, "--json-report")) {
    config.json_report = true;
  }
  if (Given(app, "--average-duplicates")) {
    config.average_duplicates = true;
  }
  if (Given(app, "--frozen-weights")) {
    config.frozen_weights = f.frozen_weights;
  }
  if (Given(app, "--steps")) config.sim.steps = f.steps;
  if (Given(app, "--group-size")) {
    config.sim.group_size = f.group_size;
  }
  if (Given(app, "--noise")) {
    config.sim.noise_scale = f.noise;
  }
  if (Given(app, "--lr")) {
    config.sim.learning_rate = f.learning_rate;
  }
  if (Given(app, "--mc-samples")) {
    config.theory.mc_samples = f.mc_samples;
  }
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Criterion-level rubric scores to scalar rewards"};
  app.require_subcommand(1);
  Flags f;

  auto* synthesize = app.add_subcommand("synthesize", "per-rollout rewards for score groups");
  AddCommonFlags(synthesize, f);
  AddSynthesisFlags(synthesize, f);
  synthesize->add_option("--tensor", f.tensors, "score group JSON (repeatable)")
      ->check(CLI::ExistingFile);
  synthesize->add_option("--mode", f.modes, "static|focal|no-frontier|frozen (repeatable)");
  synthesize->add_flag("--average-duplicates", f.average_duplicates,
                       "average repeated (i, j) records");
  synthesize->add_option("--frozen-weights", f.frozen_weights, "weights for mode frozen");

  auto* simulate = app.add_subcommand("simulate", "synthetic rubric training runs");
  AddCommonFlags(simulate, f);
  AddSynthesisFlags(simulate, f);
  simulate->add_option("--mode", f.modes, "static|focal|no-frontier|frozen (repeatable)");
  simulate->add_option("--seeds", f.seeds, "seed list: 1..20, 3,5,8 or 42");
  simulate->add_option("--seed", f.seed, "single seed");
  simulate->add_option("--steps", f.steps, "update steps");
  simulate->add_option("--group-size", f.group_size, "rollouts per group");
  simulate->add_option("--noise", f.noise, "quality noise scale");
  simulate->add_option("--lr", f.learning_rate, "learning rate");

  auto* verify = app.add_subcommand("verify-theory", "randomized checks of the theory");
  AddCommonFlags(verify, f);
  verify->add_option("--seed", f.seed, "suite seed");
  verify->add_option("--mc-samples", f.mc_samples, "Monte Carlo samples per instance");
  verify->add_flag("--json-report", f.json_report, "also write verification_report.json");

  auto* analyze = app.add_subcommand("analyze", "diagnostics over stored score groups");
  AddCommonFlags(analyze, f);
  AddSynthesisFlags(analyze, f);
  analyze->add_option("--tensor", f.tensors, "score group JSON (repeatable)")
      ->check(CLI::ExistingFile);
  analyze->add_option("--mode", f.modes, "reweighting compared against static");
  analyze->add_flag("--average-duplicates", f.average_duplicates,
                    "average repeated (i, j) records");
  analyze->add_option("--frozen-weights", f.frozen_weights, "weights for mode frozen");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const std::pair<CLI::App*, focal::Command> commands[] = {
      {synthesize, focal::Command::kSynthesize},
      {simulate, focal::Command::kSimulate},
      {verify, focal::Command::kVerifyTheory},
      {analyze, focal::Command::kAnalyze},
  };
  for (const auto& [sub, command] : commands) {
    if (!sub->parsed()) continue;
    focal::ExperimentConfig config;
    try {
      config = BuildConfig(sub, f);
      config.Finalize(command);
    } catch (const focal::Error& e) {
      std::cerr << "focal: " << e.what() << '\n';
      return 2;
    }
    try {
      return focal::RunCommand(command, config, std::cout);
    } catch (const focal::Error& e) {
      std::cerr << "focal: " << e.what() << '\n';
      return 2;
    }
  }
  return 2;
}
