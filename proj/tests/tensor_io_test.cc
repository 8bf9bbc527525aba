#include "focal/tensor_io.h"

#include <filesystem>
#include <string>

#include <gtest/gtest.h>

#include "focal/random_instances.h"
#include "json.hpp"

namespace focal {
namespace {

using nlohmann::json;

json TwoByOne() {
  return json::parse(R"({
    "group_id": "g", "G": 2, "K": 2, "s_max": 10,
    "criteria": [{"id": "style", "kind": "principle", "base_weight": 0.5},
                 {"id": "safe", "kind": "hard_rule", "base_weight": 0.5}],
    "scores": [{"i": 1, "j": 2, "values": [7, true]},
               {"i": 2, "j": 1, "values": {"style": 4.5, "safe": false}}]
  })");
}

ParseError ParseFailure(const json& doc, LoadOptions opts = {}) {
  try {
    ParseScoreGroup(doc.dump(), "doc.json", opts);
  } catch (const ParseError& e) {
    return e;
  }
  ADD_FAILURE() << "document parsed";
  return ParseError(ErrorCode::kIo, "", "");
}

TEST(ParseScoreGroup, ReadsArraysObjectsAndBooleans) {
  const auto g = ParseScoreGroup(TwoByOne().dump(), "doc.json");
  EXPECT_EQ(g.group_id, "g");
  EXPECT_EQ(g.rubric[1].kind, CriterionKind::kHardRule);
  EXPECT_EQ(g.tensor(0, 1, 0), 7.0);
  EXPECT_EQ(g.tensor(0, 1, 1), 10.0);
  EXPECT_EQ(g.tensor(1, 0, 0), 4.5);
  EXPECT_EQ(g.tensor(1, 0, 1), 0.0);
}

TEST(ParseScoreGroup, FixtureLoads) {
  const auto g = LoadScoreGroup(std::filesystem::path(FOCAL_FIXTURE_DIR) / "group.json");
  EXPECT_EQ(g.group_id, "prompt-17");
  EXPECT_EQ(g.tensor.group_size(), 3u);
  EXPECT_EQ(g.rubric.size(), 3u);
  EXPECT_EQ(g.tensor(2, 0, 2), 0.0);
  EXPECT_EQ(g.tensor(1, 2, 1), 7.5);
}

TEST(ParseScoreGroup, MissingPairNamesThePair) {
  json doc = TwoByOne();
  doc["scores"].erase(1);
  const auto e = ParseFailure(doc);
  EXPECT_EQ(e.code(), ErrorCode::kIncomplete);
  EXPECT_NE(std::string(e.what()).find("(2, 1)"), std::string::npos) << e.what();
}

TEST(ParseScoreGroup, DuplicatesAverageOnlyWhenAsked) {
  json doc = TwoByOne();
  doc["scores"][0]["values"] = json::array({6, true});
  doc["scores"].push_back({{"i", 1}, {"j", 2}, {"values", json::array({8, true})}});
  EXPECT_EQ(ParseFailure(doc).location(), "doc.json:/scores/2");
  const auto g = ParseScoreGroup(doc.dump(), "doc.json", {true});
  EXPECT_EQ(g.tensor(0, 1, 0), 7.0);
  EXPECT_EQ(g.tensor(0, 1, 1), 10.0);
}

TEST(ParseScoreGroup, StructuredErrorsCarryLocations) {
  {
    json doc = TwoByOne();
    doc["scores"][0]["values"][0] = 10.5;
    const auto e = ParseFailure(doc);
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
    EXPECT_EQ(e.location(), "doc.json:/scores/0/values/0");
  }
  {
    json doc = TwoByOne();
    doc["scores"][1]["values"]["tone"] = 3;
    const auto e = ParseFailure(doc);
    EXPECT_EQ(e.code(), ErrorCode::kParse);
    EXPECT_EQ(e.location(), "doc.json:/scores/1/values/tone");
  }
  {
    json doc = TwoByOne();
    doc["scores"][0]["values"][0] = true;  // boolean on a principle
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kParse);
  }
  {
    json doc = TwoByOne();
    doc["scores"][0]["j"] = 1;
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kInvalidPair);
  }
  {
    json doc = TwoByOne();
    doc["scores"][0]["i"] = 3;
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kInvalidPair);
  }
  {
    json doc = TwoByOne();
    doc["K"] = 3;
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kDimensionMismatch);
  }
  {
    json doc = TwoByOne();
    doc["criteria"][0]["kind"] = "guideline";
    EXPECT_EQ(ParseFailure(doc).location(), "doc.json:/criteria/0/kind");
  }
  {
    json doc = TwoByOne();
    doc["criteria"][1]["id"] = "style";
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kInvalidArgument);
  }
  {
    json doc = TwoByOne();
    doc["scores"][1]["values"].erase("safe");
    EXPECT_EQ(ParseFailure(doc).code(), ErrorCode::kIncomplete);
  }
  EXPECT_THROW(ParseScoreGroup("{not json", "bad.json"), ParseError);
  EXPECT_THROW(LoadScoreGroup("/nonexistent/group.json"), Error);
}

TEST(SerializeScoreGroup, RoundTripIsValueIdentical) {
  random::Rng rng(77);
  const auto dir = std::filesystem::temp_directory_path() / "focal_tensor_io_test";
  std::filesystem::create_directories(dir);
  for (int n = 0; n < 25; ++n) {
    const auto g = random::UniformIndex(rng, 2, 7);
    const auto k = random::UniformIndex(rng, 1, 9);
    ScoreGroup group{"group-" + std::to_string(n), random::RandomRubric(rng, k, 10.0),
                     random::UniformTensor(rng, g, k, 10.0)};
    const auto path = dir / "g.json";
    WriteScoreGroup(path, group);
    const auto back = LoadScoreGroup(path);
    EXPECT_EQ(back.group_id, group.group_id);
    EXPECT_TRUE(back.tensor == group.tensor);
    EXPECT_EQ(back.rubric.base_weights(), group.rubric.base_weights());
    EXPECT_EQ(SerializeScoreGroup(back), SerializeScoreGroup(group));
  }
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace focal
