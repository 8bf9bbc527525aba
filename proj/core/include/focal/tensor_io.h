#ifndef FOCAL_TENSOR_IO_H_
#define FOCAL_TENSOR_IO_H_

#include <filesystem>
#include <string>
#include <string_view>

#include "focal/error.h"
#include "focal/rubric.h"

namespace focal {

// A parse failure with the source name and a JSON-pointer-like location,
// e.g. "group.json:/scores/3/values/1".
class ParseError : public Error {
 public:
  ParseError(ErrorCode code, std::string location, const std::string& message);

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

// One rollout group as stored on disk:
//
//   {
//     "group_id": "prompt-17",
//     "G": 3, "K": 2, "s_max": 10,
//     "criteria": [{"id": "accuracy", "kind": "principle", "base_weight": 0.5},
//                  {"id": "no_pii", "kind": "hard_rule", "base_weight": 0.5}],
//     "scores": [{"i": 1, "j": 2, "values": [8, true]}, ...]
//   }
//
// Rollout indices are 1-based. "values" is either a K-array in criterion
// order or an object keyed by criterion id. Hard-rule entries may be booleans
// (true -> s_max, false -> 0).
struct ScoreGroup {
  std::string group_id;
  Rubric rubric;
  ScoreTensor tensor;
};

struct LoadOptions {
  // Average repeated (i, j) records, e.g. a pair judged in both prompt
  // orders. Without it a repeated record is an error.
  bool average_duplicates = false;
};

ScoreGroup ParseScoreGroup(std::string_view json_text,
                           std::string_view source_name,
                           const LoadOptions& options = {});

ScoreGroup LoadScoreGroup(const std::filesystem::path& path,
                          const LoadOptions& options = {});

std::string SerializeScoreGroup(const ScoreGroup& group);

void WriteScoreGroup(const std::filesystem::path& path, const ScoreGroup& group);

std::string_view CriterionKindName(CriterionKind kind);

}  // namespace focal

#endif  // FOCAL_TENSOR_IO_H_
