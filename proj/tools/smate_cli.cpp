// smate: run scenario files, sweeps and verification suites.

#include <CLI11.hpp>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "smate/harness.hpp"
#include "smate/packet_wire.hpp"
#include "smate/scenario.hpp"
#include "smate/verify.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitConfig = 2;

struct ReportFlags {
  std::optional<std::uint64_t> seed;
  std::string out_dir;
  bool csv = false;
  bool timing = false;
  std::size_t threads = 0;
};

void add_report_flags(CLI::App* cmd, ReportFlags& flags) {
  cmd->add_option("--seed", flags.seed, "Override every payload and failure seed");
  cmd->add_option("--out", flags.out_dir,
                  "Report directory (default: $SMATE_REPORT_DIR, else stdout)");
  cmd->add_flag("--csv", flags.csv, "Also write a CSV mirror (CSV only on stdout)");
  cmd->add_flag("--timing", flags.timing, "Include per-row runtime (breaks byte-identity)");
  cmd->add_option("--threads", flags.threads, "Worker threads (0 = all cores)");
}

int write_reports(const std::vector<smate::ReportRow>& rows, const ReportFlags& flags,
                  const std::filesystem::path& config) {
  std::string dir = flags.out_dir;
  if (dir.empty()) {
    if (const char* env = std::getenv("SMATE_REPORT_DIR")) dir = env;
  }
  if (dir.empty()) {
    if (flags.csv) {
      std::cout << smate::csv_header(flags.timing) << '\n';
      for (const auto& row : rows) std::cout << smate::to_csv(row, flags.timing) << '\n';
    } else {
      for (const auto& row : rows) std::cout << smate::to_json_line(row, flags.timing) << '\n';
    }
    return smate::exit_code_for(rows);
  }

  std::filesystem::create_directories(dir);
  const auto base = smate::next_report_base(dir, config.stem().string());
  auto path_with = [&](const char* ext) {
    auto p = base;
    p += ext;
    return p;
  };
  {
    std::ofstream out(path_with(".jsonl"), std::ios::binary);
    for (const auto& row : rows) out << smate::to_json_line(row, flags.timing) << '\n';
    if (!out) throw smate::Error("cannot write " + path_with(".jsonl").string());
  }
  std::cerr << "wrote " << path_with(".jsonl").string() << '\n';
  if (flags.csv) {
    std::ofstream out(path_with(".csv"), std::ios::binary);
    out << smate::csv_header(flags.timing) << '\n';
    for (const auto& row : rows) out << smate::to_csv(row, flags.timing) << '\n';
    if (!out) throw smate::Error("cannot write " + path_with(".csv").string());
    std::cerr << "wrote " << path_with(".csv").string() << '\n';
  }
  return smate::exit_code_for(rows);
}

smate::RunOptions run_options(const ReportFlags& flags) {
  smate::RunOptions opts;
  opts.seed = flags.seed;
  opts.threads = flags.threads;
  return opts;
}

int cmd_run(const std::string& config, const ReportFlags& flags) {
  const auto file = smate::load_scenarios(config);
  const auto rows = smate::run_scenarios(file.scenarios, run_options(flags));
  return write_reports(rows, flags, config);
}

int cmd_sweep(const std::string& config, const ReportFlags& flags) {
  const auto file = smate::load_scenarios(config);
  std::vector<smate::ReportRow> rows;
  for (const auto& sweep : file.sweeps) {
    auto part = smate::run_sweep(sweep, run_options(flags));
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return write_reports(rows, flags, config);
}

int cmd_verify(bool exhaustive, bool inject_fault) {
  smate::VerifyOptions opts;
  opts.level = exhaustive ? smate::VerifyLevel::kExhaustive : smate::VerifyLevel::kQuick;
  opts.corrupt_vandermonde = inject_fault;
  const auto summary = smate::run_verification(opts);
  std::size_t passed = 0;
  for (const auto& c : summary.checks) {
    std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << " (" << std::fixed
              << std::setprecision(3) << c.seconds << " s)";
    if (!c.passed) std::cout << ": " << c.detail;
    std::cout << '\n';
    passed += c.passed ? 1 : 0;
  }
  std::cout << passed << "/" << summary.checks.size() << " checks passed\n";
  return summary.passed() ? kExitOk : kExitFailure;
}

int cmd_fmt_packet(const std::string& hex) {
  const auto bytes = smate::from_hex(hex);
  try {
    std::cout << smate::describe_frame(bytes);
  } catch (const smate::WireError& e) {
    std::cerr << "invalid frame: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multipath erasure-coding simulator"};
  app.require_subcommand(1);

  ReportFlags run_flags;
  std::string run_config;
  auto* run = app.add_subcommand("run", "Run every [scenario.*] section of a config file");
  run->add_option("config", run_config, "Scenario file")->required();
  add_report_flags(run, run_flags);

  ReportFlags sweep_flags;
  std::string sweep_config;
  auto* sweep = app.add_subcommand("sweep", "Run every [sweep.*] grid of a config file");
  sweep->add_option("config", sweep_config, "Scenario file")->required();
  add_report_flags(sweep, sweep_flags);

  bool exhaustive = false;
  bool inject_fault = false;
  auto* verify = app.add_subcommand("verify", "Run the built-in property suites");
  verify->add_flag("--exhaustive", exhaustive, "Enumerate all erasure patterns (k <= 8, t <= 3)");
  verify->add_flag("--inject-fault", inject_fault)->group("");

  std::string hex;
  auto* fmt = app.add_subcommand("fmt-packet", "Pretty-print a hex-encoded frame");
  fmt->add_option("hex", hex, "Frame bytes as hex")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_config, run_flags);
    if (*sweep) return cmd_sweep(sweep_config, sweep_flags);
    if (*verify) return cmd_verify(exhaustive, inject_fault);
    if (*fmt) return cmd_fmt_packet(hex);
  } catch (const smate::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const smate::WireError& e) {
    std::cerr << "packet error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitOk;
}
