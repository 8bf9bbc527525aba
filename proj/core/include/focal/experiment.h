#ifndef FOCAL_EXPERIMENT_H_
#define FOCAL_EXPERIMENT_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "focal/report.h"
#include "focal/rubric.h"
#include "focal/sim.h"

namespace focal {

struct TheorySuiteOptions {
  std::uint64_t seed = 7;
  std::int64_t mc_samples = 1'000'000;
  std::size_t mc_instances = 50;
  std::size_t gap_models = 100;
  std::size_t sphere_directions = 10'000;
  std::size_t gibbs_instances = 10'000;
  std::size_t shift_tensors = 100;
};

// Randomized and closed-form checks of the misallocation bound, the static
// gap identity, Gibbs frontier concentration, the shift probe, and the
// temperature limits of the Gibbs weights.
VerificationReport RunTheorySuite(const TheorySuiteOptions& options);

enum class Command { kSynthesize, kSimulate, kVerifyTheory, kAnalyze };

struct ExperimentConfig {
  SynthesisConfig synthesis;
  std::vector<std::filesystem::path> tensor_paths;
  std::vector<sim::Mode> modes;
  std::vector<double> frozen_weights;
  bool average_duplicates = false;
  // Simulation rubric; uniform weights over the simulated criteria if unset.
  std::optional<Rubric> rubric;
  sim::SimSpec sim = sim::SimSpec::DefaultHeterogeneous();
  std::vector<std::uint64_t> seeds;
  TheorySuiteOptions theory;
  std::filesystem::path output_dir = "focal_out";
  bool json_report = false;

  // Fills command-specific defaults (modes, seeds) and validates.
  void Finalize(Command command);
};

// Overlays the keys of a JSON config document onto `config`. Unknown keys are
// rejected. Relative paths resolve against `base_dir`.
void ApplyConfigJson(std::string_view json_text, std::string_view source,
                     const std::filesystem::path& base_dir,
                     ExperimentConfig& config);
void ApplyConfigFile(const std::filesystem::path& path, ExperimentConfig& config);

// "1..20", "3,5,8" or "42".
std::vector<std::uint64_t> ParseSeedList(std::string_view text);

// Writes artifacts under config.output_dir and a human-readable log. Returns
// the process exit status: 0 on success, 1 if any verification check fails.
int RunCommand(Command command, const ExperimentConfig& config, std::ostream& log);

}  // namespace focal

#endif  // FOCAL_EXPERIMENT_H_
