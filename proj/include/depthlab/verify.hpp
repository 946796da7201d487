#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace depthlab {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool pass = false;
  std::string detail;
  double seconds = 0.0;
  // Deterministic numeric output of the check (no timings).
  std::string csv;
};

struct VerifyOptions {
  // Criterion ids to run; empty runs all.
  std::vector<int> filter;
  int threads = 1;
  std::uint64_t seed = 20240917;
  // Replacement experiment configs keyed by preset name.
  std::map<std::string, nlohmann::json> preset_overrides;
};

inline constexpr int kCriterionCount = 14;

std::string criterion_name(int id);
// "1,3-5" -> {1, 3, 4, 5}.  Throws ConfigError on malformed or out-of-range ids.
std::vector<int> parse_filter(const std::string& text);

// Runs one criterion; exceptions become a failed result naming the error.
CriterionResult run_criterion(int id, const VerifyOptions& opts);
std::vector<CriterionResult> run_verify(const VerifyOptions& opts);

// One PASS/FAIL line per criterion, then a summary line.
std::string verify_report(const std::vector<CriterionResult>& results);
// Concatenated criterion CSVs, each preceded by a "#criterion,<id>,<name>" line.
std::string verify_csv(const std::vector<CriterionResult>& results);
bool all_passed(const std::vector<CriterionResult>& results);

}  // namespace depthlab
