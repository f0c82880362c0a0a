#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "curvlab/scalar.hpp"

namespace curvlab {

// Machine-readable verdict for one check: every residual must be a ring zero
// (or below tolerance in float mode) for the verdict to be "pass".
struct LemmaReport {
  std::string lemma;
  std::map<std::string, std::string> params;
  std::string mode = "exact";  // "exact" | "float"
  struct Residual {
    std::string desc;
    std::string value;
    bool zero = false;
  };
  std::vector<Residual> residuals;
  std::vector<std::string> notes;  // informational, never affect the verdict
  bool pass = true;
  std::int64_t ms = 0;

  void add_residual(const std::string& desc, const Scalar& value,
                    double tol = kDefaultTol) {
    const bool zero = value.is_zero(tol);
    residuals.push_back({desc, value.str(), zero});
    if (!zero) pass = false;
  }

  void add_condition(const std::string& desc, bool ok) {
    residuals.push_back({desc, ok ? "ok" : "violated", ok});
    if (!ok) pass = false;
  }

  void note(std::string text) { notes.push_back(std::move(text)); }
};

inline bool all_pass(const std::vector<LemmaReport>& reports) {
  for (const auto& r : reports)
    if (!r.pass) return false;
  return true;
}

}  // namespace curvlab
