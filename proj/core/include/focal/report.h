#ifndef FOCAL_REPORT_H_
#define FOCAL_REPORT_H_

#include <iosfwd>
#include <string>
#include <vector>

namespace focal {

// Fixed nine-significant-digit rendering used by every CSV writer.
std::string FormatNumber(double value);

enum class Relation {
  kAtMost,   // computed <= target + tolerance
  kAtLeast,  // computed >= target - tolerance
  kNear,     // |computed - target| <= tolerance
};

struct Check {
  std::string name;
  Relation relation = Relation::kAtMost;
  double computed = 0.0;
  double target = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

class VerificationReport {
 public:
  // Evaluates the relation and appends the row.
  const Check& Add(std::string name, Relation relation, double computed,
                   double target, double tolerance);

  const std::vector<Check>& checks() const { return checks_; }
  bool AllPassed() const;

  // Header: check,relation,computed,target,tolerance,pass
  void WriteCsv(std::ostream& out) const;
  std::string ToJson() const;

 private:
  std::vector<Check> checks_;
};

std::string RelationName(Relation relation);

}  // namespace focal

#endif  // FOCAL_REPORT_H_
