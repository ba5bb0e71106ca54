#include "smate/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <exception>
#include <functional>
#include <json.hpp>
#include <sstream>
#include <thread>

namespace smate {
namespace {

struct Job {
  const Scenario* scenario;
  std::size_t repetition;
};

std::string rational_string(const Rational& r) {
  return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

ReportRow execute(const Scenario& sc, std::size_t repetition, const RunOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const CodingPlan plan = build_plan(sc);

  ReportRow row;
  row.scenario = sc.name;
  row.scheme = std::string(to_string(sc.scheme));
  row.k = plan.paths();
  row.t = plan.protection_budget();
  row.repetition = repetition;
  row.seed = options.seed.value_or(sc.payload_seed) + repetition;
  row.failure_seed = options.seed.value_or(sc.failure.seed) + repetition;

  FailureModel failures = sc.failure;
  failures.seed = row.failure_seed;
  const std::vector<std::uint8_t> payload = make_payload(sc.payload_size, row.seed);

  SessionOptions session;
  session.session = static_cast<std::uint32_t>(repetition);
  session.encrypt = sc.encrypt;
  session.key_seed = row.seed;
  const SessionReport report = run_session(plan, payload, failures, sc.chunk_size, session);

  row.normalized_capacity = normalized_capacity(plan);
  row.measured_capacity = report.measured_capacity;
  row.working_paths = plan.working_paths_per_round();
  row.failure_budget = failures.max_erasures_per_round(plan.paths());
  row.columns_total = report.columns_total;
  row.columns_intact = report.columns_intact;
  row.columns_recovered = report.columns_recovered;
  row.columns_unrecoverable = report.columns_unrecoverable;
  row.recovery_rate =
      report.columns_total == 0
          ? 1.0
          : static_cast<double>(report.columns_intact + report.columns_recovered) /
                static_cast<double>(report.columns_total);
  row.goodput_ratio = report.goodput_ratio;
  row.payload_delivered = report.payload_delivered;
  row.payload_hash = report.delivered_payload_hash;
  row.runtime_ms = std::chrono::duration<double, std::milli>(
                       std::chrono::steady_clock::now() - start)
                       .count();
  return row;
}

// Runs fn(i) for i in [0, count) on a small pool; rethrows the first
// failure in index order.
void parallel_for(std::size_t count, std::size_t threads,
                  const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = std::min(threads, count);
  std::vector<std::exception_ptr> errors(count);
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < count; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

std::vector<ReportRow> run_jobs(const std::vector<Job>& jobs, const RunOptions& options) {
  std::vector<ReportRow> rows(jobs.size());
  parallel_for(jobs.size(), options.threads, [&](std::size_t i) {
    rows[i] = execute(*jobs[i].scenario, jobs[i].repetition, options);
  });
  return rows;
}

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

bool ReportRow::violates_budget() const {
  return feasible() && failure_budget <= t && columns_unrecoverable > 0;
}

std::vector<ReportRow> run_scenarios(const std::vector<Scenario>& scenarios,
                                     const RunOptions& options) {
  std::vector<Job> jobs;
  for (const Scenario& sc : scenarios) {
    try {
      const CodingPlan plan = build_plan(sc);
      if (sc.chunk_size % plan.field().symbol_unit() != 0) {
        throw PlanError("chunk_size must be a multiple of the field symbol unit");
      }
      sc.failure.erasures(plan, 0);
    } catch (const Error& e) {
      throw ConfigError("[scenario." + sc.name + "]: infeasible scenario: " + e.what());
    }
    for (std::size_t r = 0; r < sc.repetitions; ++r) jobs.push_back({&sc, r});
  }
  return run_jobs(jobs, options);
}

std::vector<ReportRow> run_sweep(const SweepSpec& sweep, const RunOptions& options) {
  const std::size_t points = sweep.paths_values.size() * sweep.budget_values.size();
  if (points > kSweepGuard || points * sweep.base.repetitions > kSweepGuard) {
    throw ConfigError("[sweep." + sweep.base.name + "]: grid of " + std::to_string(points) +
                      " points x " + std::to_string(sweep.base.repetitions) +
                      " repetitions exceeds the guard of " + std::to_string(kSweepGuard));
  }

  // Slots hold either a job or a ready-made infeasible row.
  std::vector<Scenario> expanded;
  expanded.reserve(points);
  std::vector<std::optional<ReportRow>> infeasible;
  for (std::size_t k : sweep.paths_values) {
    for (std::size_t t : sweep.budget_values) {
      Scenario sc = sweep.base;
      sc.paths = k;
      sc.budget = t;
      sc.name = sweep.base.name + "/k=" + std::to_string(k) + ",t=" + std::to_string(t);
      std::optional<ReportRow> bad;
      try {
        const bool single = sc.scheme == Scheme::kDedicatedSingle ||
                            sc.scheme == Scheme::kRotatingSingle;
        if (single && t != 1) throw PlanError("single-failure schemes have t = 1");
        if (sc.scheme == Scheme::kTwoDedicated && t != 2) {
          throw PlanError("two_dedicated has t = 2");
        }
        if (k < 2) throw PlanError("at least two paths are required");
        const CodingPlan plan = build_plan(sc);
        if (sc.chunk_size % plan.field().symbol_unit() != 0) {
          throw PlanError("chunk_size must be a multiple of the field symbol unit");
        }
        sc.failure.erasures(plan, 0);
      } catch (const Error& e) {
        ReportRow row;
        row.scenario = sc.name;
        row.scheme = std::string(to_string(sc.scheme));
        row.k = k;
        row.t = t;
        row.status = "infeasible";
        row.error = e.what();
        row.recovery_rate = 0.0;
        bad = row;
      }
      expanded.push_back(std::move(sc));
      infeasible.push_back(std::move(bad));
    }
  }

  std::vector<Job> jobs;
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    if (infeasible[i]) continue;
    for (std::size_t r = 0; r < expanded[i].repetitions; ++r) jobs.push_back({&expanded[i], r});
  }
  std::vector<ReportRow> ran = run_jobs(jobs, options);

  std::vector<ReportRow> rows;
  std::size_t next = 0;
  for (std::size_t i = 0; i < expanded.size(); ++i) {
    if (infeasible[i]) {
      rows.push_back(*infeasible[i]);
      continue;
    }
    for (std::size_t r = 0; r < expanded[i].repetitions; ++r) rows.push_back(ran[next++]);
  }
  return rows;
}

std::string to_json_line(const ReportRow& row, bool timing) {
  nlohmann::ordered_json j;
  j["scenario"] = row.scenario;
  j["scheme"] = row.scheme;
  j["k"] = row.k;
  j["t"] = row.t;
  j["repetition"] = row.repetition;
  j["status"] = row.status;
  if (!row.feasible()) {
    j["error"] = row.error;
    return j.dump();
  }
  j["normalized_capacity"] = rational_string(row.normalized_capacity);
  j["capacity"] = boost::rational_cast<double>(row.normalized_capacity);
  j["measured_capacity"] = rational_string(row.measured_capacity);
  j["working_paths"] = row.working_paths;
  j["failure_budget"] = row.failure_budget;
  j["columns_total"] = row.columns_total;
  j["columns_intact"] = row.columns_intact;
  j["columns_recovered"] = row.columns_recovered;
  j["columns_unrecoverable"] = row.columns_unrecoverable;
  j["recovery_rate"] = row.recovery_rate;
  j["goodput_ratio"] = rational_string(row.goodput_ratio);
  j["payload_delivered"] = row.payload_delivered;
  j["payload_sha256"] = row.payload_hash;
  j["seed"] = row.seed;
  j["failure_seed"] = row.failure_seed;
  if (timing) j["runtime_ms"] = row.runtime_ms;
  return j.dump();
}

std::string csv_header(bool timing) {
  std::string h =
      "scenario,scheme,k,t,repetition,status,normalized_capacity,measured_capacity,"
      "working_paths,failure_budget,columns_total,columns_intact,columns_recovered,"
      "columns_unrecoverable,recovery_rate,goodput_ratio,payload_delivered,payload_sha256,"
      "seed,failure_seed";
  if (timing) h += ",runtime_ms";
  return h;
}

std::string to_csv(const ReportRow& row, bool timing) {
  std::ostringstream os;
  os << csv_escape(row.scenario) << ',' << row.scheme << ',' << row.k << ',' << row.t << ','
     << row.repetition << ',' << row.status << ',';
  if (row.feasible()) {
    char rate[32];
    std::snprintf(rate, sizeof rate, "%.6f", row.recovery_rate);
    os << rational_string(row.normalized_capacity) << ','
       << rational_string(row.measured_capacity) << ',' << row.working_paths << ','
       << row.failure_budget << ',' << row.columns_total << ',' << row.columns_intact << ','
       << row.columns_recovered << ',' << row.columns_unrecoverable << ',' << rate << ','
       << rational_string(row.goodput_ratio) << ',' << (row.payload_delivered ? "true" : "false")
       << ',' << row.payload_hash << ',' << row.seed << ',' << row.failure_seed;
  } else {
    os << ",,,,,,,,,,,,,";
  }
  if (timing) os << ',' << row.runtime_ms;
  return os.str();
}

int exit_code_for(const std::vector<ReportRow>& rows) {
  return std::any_of(rows.begin(), rows.end(),
                     [](const ReportRow& r) { return r.violates_budget(); })
             ? 1
             : 0;
}

std::filesystem::path next_report_base(const std::filesystem::path& dir,
                                       const std::string& stem) {
  for (unsigned i = 1;; ++i) {
    char suffix[16];
    std::snprintf(suffix, sizeof suffix, "-%04u", i);
    const std::filesystem::path base = dir / (stem + suffix);
    auto with = [&](const char* ext) {
      auto p = base;
      p += ext;
      return p;
    };
    if (!std::filesystem::exists(with(".jsonl")) && !std::filesystem::exists(with(".csv"))) {
      return base;
    }
  }
}

}  // namespace smate
