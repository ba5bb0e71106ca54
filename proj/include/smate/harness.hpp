#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "smate/scenario.hpp"

namespace smate {

// One scenario x repetition outcome.
struct ReportRow {
  std::string scenario;
  std::string scheme;
  std::size_t k = 0;
  std::size_t t = 0;
  std::size_t repetition = 0;
  std::string status = "ok";  // "ok" or "infeasible"
  std::string error;
  Rational normalized_capacity;
  Rational measured_capacity;
  std::size_t working_paths = 0;
  std::size_t failure_budget = 0;
  std::size_t columns_total = 0;
  std::size_t columns_intact = 0;
  std::size_t columns_recovered = 0;
  std::size_t columns_unrecoverable = 0;
  double recovery_rate = 1.0;
  Rational goodput_ratio;
  bool payload_delivered = false;
  std::string payload_hash;
  std::uint64_t seed = 0;
  std::uint64_t failure_seed = 0;
  double runtime_ms = 0.0;

  bool feasible() const { return status == "ok"; }
  // An unrecoverable column under a failure budget within t is a defect.
  bool violates_budget() const;
};

struct RunOptions {
  // Replaces every scenario's payload and failure seed.
  std::optional<std::uint64_t> seed;
  std::size_t threads = 0;  // 0 = hardware concurrency
};

// Validates every scenario first; throws ConfigError naming the scenario
// when one is infeasible. Rows come back in scenario, repetition order.
std::vector<ReportRow> run_scenarios(const std::vector<Scenario>& scenarios,
                                     const RunOptions& options = {});

inline constexpr std::size_t kSweepGuard = 10000;

// Cartesian product of paths x budget values. Infeasible points become rows
// with status "infeasible" instead of errors.
std::vector<ReportRow> run_sweep(const SweepSpec& sweep, const RunOptions& options = {});

std::string to_json_line(const ReportRow& row, bool timing = false);
std::string csv_header(bool timing = false);
std::string to_csv(const ReportRow& row, bool timing = false);

// 0 when no row violates its budget, 1 otherwise.
int exit_code_for(const std::vector<ReportRow>& rows);

// First "<dir>/<stem>-NNNN" for which neither a .jsonl nor a .csv file
// exists; reports are never overwritten.
std::filesystem::path next_report_base(const std::filesystem::path& dir,
                                       const std::string& stem);

}  // namespace smate
