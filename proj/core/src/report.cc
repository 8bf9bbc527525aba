#include "focal/report.h"

#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "json.hpp"

namespace focal {

std::string FormatNumber(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";  // folds -0
  return fmt::format("{:.9g}", value);
}

std::string RelationName(Relation relation) {
  switch (relation) {
    case Relation::kAtMost:
      return "at_most";
    case Relation::kAtLeast:
      return "at_least";
    case Relation::kNear:
      return "near";
  }
  return "unknown";
}

const Check& VerificationReport::Add(std::string name, Relation relation,
                                     double computed, double target,
                                     double tolerance) {
  Check check{std::move(name), relation, computed, target, tolerance, false};
  switch (relation) {
    case Relation::kAtMost:
      check.passed = computed <= target + tolerance;
      break;
    case Relation::kAtLeast:
      check.passed = computed >= target - tolerance;
      break;
    case Relation::kNear:
      check.passed = std::abs(computed - target) <= tolerance;
      break;
  }
  checks_.push_back(std::move(check));
  return checks_.back();
}

bool VerificationReport::AllPassed() const {
  for (const auto& c : checks_) {
    if (!c.passed) return false;
  }
  return true;
}

void VerificationReport::WriteCsv(std::ostream& out) const {
  out << "check,relation,computed,target,tolerance,pass\n";
  for (const auto& c : checks_) {
    out << c.name << ',' << RelationName(c.relation) << ','
        << FormatNumber(c.computed) << ',' << FormatNumber(c.target) << ','
        << FormatNumber(c.tolerance) << ',' << (c.passed ? "true" : "false")
        << '\n';
  }
}

std::string VerificationReport::ToJson() const {
  nlohmann::ordered_json rows = nlohmann::ordered_json::array();
  for (const auto& c : checks_) {
    rows.push_back({{"check", c.name},
                    {"relation", RelationName(c.relation)},
                    {"computed", c.computed},
                    {"target", c.target},
                    {"tolerance", c.tolerance},
                    {"pass", c.passed}});
  }
  nlohmann::ordered_json doc = {{"all_passed", AllPassed()}, {"checks", rows}};
  return doc.dump(2) + "\n";
}

}  // namespace focal
