#pragma once

#include <string>
#include <vector>

#include "smate/finite_field.hpp"

namespace smate {

enum class VerifyLevel { kQuick, kExhaustive };

struct VerifyOptions {
  VerifyLevel level = VerifyLevel::kQuick;
  // Overwrites one Vandermonde coefficient before the MDS checks run, so the
  // suite can demonstrate that it catches a broken code.
  bool corrupt_vandermonde = false;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct VerifySummary {
  std::vector<CheckResult> checks;
  bool passed() const;
};

// Every t x t column minor of h must be invertible.
CheckResult check_mds(const FieldContext& field, const CoefficientMatrix& h,
                      const std::string& name);

// Quick: small property suites, a few seconds. Exhaustive: all erasure
// patterns for k <= 8, t <= 3 and exhaustive GF(2^8) axioms.
VerifySummary run_verification(const VerifyOptions& options = {});

}  // namespace smate
