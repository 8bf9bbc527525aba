#include "focal/tensor_io.h"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <utility>
#include <vector>

#include <fmt/format.h>

#include "json.hpp"

namespace focal {
namespace {

using nlohmann::json;

class Parser {
 public:
  Parser(std::string_view source, const LoadOptions& options)
      : source_(source), options_(options) {}

  ScoreGroup Parse(std::string_view text) {
    json doc;
    try {
      doc = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
      Fail(ErrorCode::kParse, fmt::format("byte {}", e.byte), e.what());
    }
    if (!doc.is_object()) Fail(ErrorCode::kParse, "", "document must be an object");

    const std::string group_id =
        doc.contains("group_id") ? Get<std::string>(doc, "group_id", "/group_id")
                                 : std::string();
    const auto g = GetCount(doc, "G");
    const auto k = GetCount(doc, "K");
    const double s_max =
        doc.contains("s_max") ? GetNumber(doc.at("s_max"), "/s_max") : kDefaultScoreMax;

    Rubric rubric = ParseCriteria(doc, k, s_max);
    ScoreTensor tensor = ParseScores(doc, g, rubric);
    return ScoreGroup{group_id, std::move(rubric), std::move(tensor)};
  }

 private:
  [[noreturn]] void Fail(ErrorCode code, const std::string& pointer,
                         const std::string& message) const {
    throw ParseError(code, fmt::format("{}:{}", source_, pointer), message);
  }

  template <typename T>
  T Get(const json& obj, const char* key, const std::string& pointer) const {
    try {
      return obj.at(key).get<T>();
    } catch (const json::exception& e) {
      Fail(ErrorCode::kParse, pointer, e.what());
    }
  }

  double GetNumber(const json& value, const std::string& pointer) const {
    if (!value.is_number()) Fail(ErrorCode::kParse, pointer, "expected a number");
    return value.get<double>();
  }

  std::size_t GetCount(const json& doc, const char* key) const {
    const std::string pointer = fmt::format("/{}", key);
    if (!doc.contains(key)) Fail(ErrorCode::kParse, pointer, "missing field");
    const json& v = doc.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) {
      Fail(ErrorCode::kParse, pointer, "expected a positive integer");
    }
    return static_cast<std::size_t>(v.get<long long>());
  }

  Rubric ParseCriteria(const json& doc, std::size_t k, double s_max) const {
    if (!doc.contains("criteria") || !doc.at("criteria").is_array()) {
      Fail(ErrorCode::kParse, "/criteria", "expected an array of criteria");
    }
    const json& list = doc.at("criteria");
    if (list.size() != k) {
      Fail(ErrorCode::kDimensionMismatch, "/criteria",
           fmt::format("{} criteria listed but K = {}", list.size(), k));
    }
    std::vector<Criterion> criteria;
    for (std::size_t n = 0; n < list.size(); ++n) {
      const std::string at = fmt::format("/criteria/{}", n);
      const json& entry = list.at(n);
      if (!entry.is_object()) Fail(ErrorCode::kParse, at, "expected an object");
      Criterion c;
      c.id = Get<std::string>(entry, "id", at + "/id");
      const std::string kind =
          entry.contains("kind") ? Get<std::string>(entry, "kind", at + "/kind")
                                 : std::string("principle");
      if (kind == "hard_rule") {
        c.kind = CriterionKind::kHardRule;
      } else if (kind == "principle") {
        c.kind = CriterionKind::kPrinciple;
      } else {
        Fail(ErrorCode::kParse, at + "/kind",
             fmt::format("unknown kind '{}' (expected hard_rule or principle)", kind));
      }
      c.base_weight = entry.contains("base_weight")
                          ? GetNumber(entry.at("base_weight"), at + "/base_weight")
                          : 1.0;
      criteria.push_back(std::move(c));
    }
    try {
      return Rubric(std::move(criteria), s_max);
    } catch (const Error& e) {
      Fail(e.code(), "/criteria", e.what());
    }
  }

  double ParseValue(const json& v, const Criterion& c, double s_max,
                    const std::string& at) const {
    if (v.is_boolean()) {
      if (c.kind != CriterionKind::kHardRule) {
        Fail(ErrorCode::kParse, at,
             fmt::format("boolean score for principle criterion '{}'", c.id));
      }
      return v.get<bool>() ? s_max : 0.0;
    }
    const double score = GetNumber(v, at);
    if (!(score >= 0.0 && score <= s_max)) {
      Fail(ErrorCode::kOutOfRange, at,
           fmt::format("score {} outside [0, {}]", score, s_max));
    }
    return score;
  }

  ScoreTensor ParseScores(const json& doc, std::size_t g, const Rubric& rubric) const {
    if (!doc.contains("scores") || !doc.at("scores").is_array()) {
      Fail(ErrorCode::kParse, "/scores", "expected an array of pair records");
    }
    const std::size_t k = rubric.size();
    // (i, j) -> accumulated values and record count.
    std::map<std::pair<std::size_t, std::size_t>, std::pair<std::vector<double>, int>>
        records;
    const json& list = doc.at("scores");
    for (std::size_t n = 0; n < list.size(); ++n) {
      const std::string at = fmt::format("/scores/{}", n);
      const json& rec = list.at(n);
      if (!rec.is_object()) Fail(ErrorCode::kParse, at, "expected an object");
      const auto read_index = [&](const char* key) {
        const std::string p = at + "/" + key;
        if (!rec.contains(key) || !rec.at(key).is_number_integer()) {
          Fail(ErrorCode::kParse, p, "expected an integer rollout index");
        }
        const long long idx = rec.at(key).get<long long>();
        if (idx < 1 || idx > static_cast<long long>(g)) {
          Fail(ErrorCode::kInvalidPair, p,
               fmt::format("rollout index {} outside [1, {}]", idx, g));
        }
        return static_cast<std::size_t>(idx - 1);
      };
      const std::size_t i = read_index("i");
      const std::size_t j = read_index("j");
      if (i == j) {
        Fail(ErrorCode::kInvalidPair, at,
             fmt::format("diagonal pair ({}, {}) is undefined", i + 1, j + 1));
      }
      if (!rec.contains("values")) Fail(ErrorCode::kParse, at + "/values", "missing");
      const json& values = rec.at("values");
      std::vector<double> parsed(k, std::nan(""));
      if (values.is_array()) {
        if (values.size() != k) {
          Fail(ErrorCode::kDimensionMismatch, at + "/values",
               fmt::format("{} values but K = {}", values.size(), k));
        }
        for (std::size_t c = 0; c < k; ++c) {
          parsed[c] = ParseValue(values.at(c), rubric[c], rubric.s_max(),
                                 fmt::format("{}/values/{}", at, c));
        }
      } else if (values.is_object()) {
        for (const auto& [id, v] : values.items()) {
          std::size_t c = 0;
          while (c < k && rubric[c].id != id) ++c;
          if (c == k) {
            Fail(ErrorCode::kParse, fmt::format("{}/values/{}", at, id),
                 fmt::format("unknown criterion id '{}'", id));
          }
          parsed[c] = ParseValue(v, rubric[c], rubric.s_max(),
                                 fmt::format("{}/values/{}", at, id));
        }
        for (std::size_t c = 0; c < k; ++c) {
          if (std::isnan(parsed[c])) {
            Fail(ErrorCode::kIncomplete, at + "/values",
                 fmt::format("missing criterion '{}'", rubric[c].id));
          }
        }
      } else {
        Fail(ErrorCode::kParse, at + "/values", "expected an array or object");
      }

      auto [it, inserted] =
          records.try_emplace({i, j}, std::move(parsed), 1);
      if (!inserted) {
        if (!options_.average_duplicates) {
          Fail(ErrorCode::kParse, at,
               fmt::format("duplicate record for pair ({}, {})", i + 1, j + 1));
        }
        for (std::size_t c = 0; c < k; ++c) it->second.first[c] += parsed[c];
        ++it->second.second;
      }
    }

    ScoreTensor tensor(g, k);
    for (std::size_t i = 0; i < g; ++i) {
      for (std::size_t j = 0; j < g; ++j) {
        if (i == j) continue;
        const auto it = records.find({i, j});
        if (it == records.end()) {
          Fail(ErrorCode::kIncomplete, "/scores",
               fmt::format("missing pair ({}, {})", i + 1, j + 1));
        }
        const auto& [sums, count] = it->second;
        for (std::size_t c = 0; c < k; ++c) {
          tensor.Set(i, j, c, count == 1 ? sums[c] : sums[c] / count);
        }
      }
    }
    return tensor;
  }

  std::string source_;
  LoadOptions options_;
};

}  // namespace

ParseError::ParseError(ErrorCode code, std::string location,
                       const std::string& message)
    : Error(code, location + ": " + message), location_(std::move(location)) {}

std::string_view CriterionKindName(CriterionKind kind) {
  return kind == CriterionKind::kHardRule ? "hard_rule" : "principle";
}

ScoreGroup ParseScoreGroup(std::string_view json_text,
                           std::string_view source_name,
                           const LoadOptions& options) {
  return Parser(source_name, options).Parse(json_text);
}

ScoreGroup LoadScoreGroup(const std::filesystem::path& path,
                          const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, fmt::format("cannot open '{}'", path.string()));
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return ParseScoreGroup(buffer.str(), path.filename().string(), options);
}

std::string SerializeScoreGroup(const ScoreGroup& group) {
  nlohmann::ordered_json doc;
  doc["group_id"] = group.group_id;
  doc["G"] = group.tensor.group_size();
  doc["K"] = group.tensor.num_criteria();
  doc["s_max"] = group.rubric.s_max();
  auto& criteria = doc["criteria"] = nlohmann::ordered_json::array();
  for (const auto& c : group.rubric.criteria()) {
    criteria.push_back(
        {{"id", c.id}, {"kind", CriterionKindName(c.kind)}, {"base_weight", c.base_weight}});
  }
  auto& scores = doc["scores"] = nlohmann::ordered_json::array();
  const std::size_t g = group.tensor.group_size();
  for (std::size_t i = 0; i < g; ++i) {
    for (std::size_t j = 0; j < g; ++j) {
      if (i == j) continue;
      const auto pair = group.tensor.Pair(i, j);
      scores.push_back({{"i", i + 1},
                        {"j", j + 1},
                        {"values", std::vector<double>(pair.begin(), pair.end())}});
    }
  }
  return doc.dump(2) + "\n";
}

void WriteScoreGroup(const std::filesystem::path& path, const ScoreGroup& group) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorCode::kIo, fmt::format("cannot write '{}'", path.string()));
  }
  out << SerializeScoreGroup(group);
}

}  // namespace focal
