#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "smate/codec.hpp"
#include "smate/coding_plan.hpp"

namespace smate {

enum class FailureKind : std::uint8_t {
  kNone,
  kSingleRandomPerRound,
  kFixedPaths,
  kAdversarialWorstCase,
  kPerPathBernoulli,
};

std::string_view to_string(FailureKind kind);

// Decides which (path, round) slots are lost. Every random choice derives
// from `seed` and the round index, so rounds are independent of each other
// and of how many rounds were simulated before.
struct FailureModel {
  FailureKind kind = FailureKind::kNone;
  std::vector<PathIndex> fixed_paths;
  std::size_t adversary_budget = 0;
  std::vector<double> erasure_probability;
  std::uint64_t seed = 0;

  static FailureModel none();
  static FailureModel single_random(std::uint64_t seed);
  static FailureModel fixed(std::vector<PathIndex> paths);
  // Erases up to `budget` slots per round, plain slots first.
  static FailureModel adversarial(std::size_t budget, std::uint64_t seed);
  // One probability per path, or a single value applied to every path.
  static FailureModel bernoulli(std::vector<double> probability, std::uint64_t seed);

  // Sorted erased paths for one round.
  std::vector<PathIndex> erasures(const CodingPlan& plan, RoundIndex round) const;

  // Largest number of slots this model can erase in one round of `paths`.
  std::size_t max_erasures_per_round(std::size_t paths) const;

  friend bool operator==(const FailureModel&, const FailureModel&) = default;
};

struct SessionOptions {
  std::uint32_t session = 0;
  std::uint16_t sender_id = 1;
  // Per-path keystream transform applied before encoding.
  bool encrypt = false;
  std::uint64_t key_seed = 0;
};

struct ErasedSlot {
  PathIndex path = 0;
  RoundIndex round = 0;

  friend bool operator==(const ErasedSlot&, const ErasedSlot&) = default;
};

struct SessionReport {
  std::size_t columns_total = 0;
  std::size_t columns_intact = 0;
  std::size_t columns_recovered = 0;
  std::size_t columns_unrecoverable = 0;
  std::vector<ErasedSlot> erased_slots;
  // SHA-256 of the delivered byte stream, hex encoded.
  std::string delivered_payload_hash;
  bool payload_delivered = false;
  Rational measured_capacity;
  // Plain cells received or recovered over all cells sent.
  Rational goodput_ratio;

  friend bool operator==(const SessionReport&, const SessionReport&) = default;
};

std::string sha256_hex(std::span<const std::uint8_t> bytes);

// Runs one session: chunk, (encrypt), encode, frame, erase, parse, decode,
// (decrypt), reassemble. The payload is padded with empty chunks to whole
// cycles. Deterministic for identical inputs.
SessionReport run_session(const CodingPlan& plan, std::span<const std::uint8_t> payload,
                          const FailureModel& failures, std::size_t chunk_size,
                          const SessionOptions& options = {});

inline constexpr std::size_t kPatternGuard = 100000;

// Every erasure set of size <= t_max over the plan's paths, smallest first.
// Throws SimulationError when the count exceeds kPatternGuard.
std::vector<std::vector<PathIndex>> enumerate_failure_patterns(const CodingPlan& plan,
                                                               std::size_t t_max);

// Plain cells counted over one cycle divided by k*m.
Rational measure_capacity(const CodingPlan& plan);

}  // namespace smate
