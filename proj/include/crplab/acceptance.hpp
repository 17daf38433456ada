#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "crplab/stats.hpp"

namespace crplab {

struct CriterionResult {
  std::string id;
  std::string title;
  bool pass = false;
  // Seeds tried, in order; more than one means the first attempt failed.
  std::vector<std::uint64_t> attempts;
  std::vector<TestReport> checks;
  double seconds = 0.0;  // not part of the summary
};

struct AcceptanceOptions {
  std::uint64_t seed = 42;
  std::vector<std::string> only;  // empty: all of A1..A13
};

std::vector<std::string> criterion_ids();

// A1..A13 (or the subset in `only`).
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& opts);
// run_acceptance twice plus the determinism criterion A14.
std::vector<CriterionResult> run_full_acceptance(const AcceptanceOptions& opts);

// Fixed-precision text without timings: one header line per criterion
// followed by its checks.
std::string summary_text(const std::vector<CriterionResult>& results);
nlohmann::json summary_json(const std::vector<CriterionResult>& results);

}  // namespace crplab
