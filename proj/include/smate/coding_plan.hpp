#pragma once

#include <boost/rational.hpp>

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "smate/finite_field.hpp"

namespace smate {

// Paths and rounds are 0-based throughout the library.
using PathIndex = std::uint16_t;
using RoundIndex = std::uint32_t;
using Rational = boost::rational<std::int64_t>;

enum class Scheme : std::uint8_t {
  kDedicatedSingle = 1,
  kRotatingSingle = 2,
  kTwoDedicated = 3,
  kNpsT = 4,
  kQos = 5,
};

std::string_view to_string(Scheme scheme);
std::optional<Scheme> parse_scheme(std::string_view name);

enum class SlotKind : std::uint8_t { kPlain, kParity };

struct Slot {
  SlotKind kind = SlotKind::kPlain;
  // 1..t for parity slots, 0 for plain slots.
  std::uint8_t parity_index = 0;

  static constexpr Slot plain() { return {}; }
  static constexpr Slot parity(std::uint8_t index) { return {SlotKind::kParity, index}; }
  bool is_parity() const { return kind == SlotKind::kParity; }

  friend bool operator==(const Slot&, const Slot&) = default;
};

struct QosDemand {
  PathIndex path = 0;
  std::uint32_t protection_slots = 0;
  std::uint32_t data_slots = 0;
  // Lower rank means more bandwidth-demanding traffic.
  std::int32_t priority = 0;

  friend bool operator==(const QosDemand&, const QosDemand&) = default;
};

struct PlanOptions {
  std::shared_ptr<const FieldContext> field = FieldContext::gf256();
  // Nonzero seeds rotate the dedicated parity paths from session to session.
  std::uint64_t session_seed = 0;
};

// Slot schedule for one cycle: which (path, round) cells carry parity and
// the coefficient row each parity cell applies to the plain cells of its
// round column. Immutable once built.
class CodingPlan {
 public:
  // Validates the grid (path-major, paths x rounds) and coefficients
  // (budget x paths). Every column must hold exactly `budget` parity cells
  // with distinct indices in [1, budget].
  static CodingPlan from_grid(Scheme scheme, std::shared_ptr<const FieldContext> field,
                              std::size_t paths, std::size_t rounds,
                              std::size_t budget, std::vector<Slot> grid,
                              CoefficientMatrix coefficients,
                              std::vector<QosDemand> demands = {},
                              std::vector<PathIndex> dedicated_paths = {},
                              std::uint64_t session_seed = 0);

  Scheme scheme() const { return scheme_; }
  std::size_t paths() const { return paths_; }
  std::size_t rounds_per_cycle() const { return rounds_; }
  std::size_t protection_budget() const { return budget_; }
  const FieldContext& field() const { return *field_; }
  const std::shared_ptr<const FieldContext>& field_ptr() const { return field_; }
  const CoefficientMatrix& coefficients() const { return coefficients_; }
  std::span<const QosDemand> demands() const { return demands_; }
  std::span<const PathIndex> dedicated_paths() const { return dedicated_paths_; }
  std::uint64_t session_seed() const { return session_seed_; }

  // `round` is reduced modulo the cycle length.
  Slot slot(PathIndex path, RoundIndex round) const;
  std::vector<PathIndex> plain_paths(RoundIndex round) const;
  // Parity paths ordered by parity index.
  std::vector<PathIndex> parity_paths(RoundIndex round) const;
  FieldElement coefficient(std::uint8_t parity_index, PathIndex path) const;

  std::size_t plain_cells_per_cycle() const { return plain_cells_; }
  std::size_t working_paths_per_round() const { return paths_ - budget_; }

  // Dedicated-path schemes rotate their parity paths by a seeded offset;
  // other schemes return an identical plan.
  CodingPlan for_session(std::uint32_t session) const;
  std::size_t session_offset(std::uint32_t session) const;

  // One line per path, e.g. "P P Y1 Y2 P".
  std::string grid_string() const;

  friend bool operator==(const CodingPlan& a, const CodingPlan& b);

 private:
  CodingPlan() = default;

  Scheme scheme_ = Scheme::kRotatingSingle;
  std::shared_ptr<const FieldContext> field_;
  std::size_t paths_ = 0;
  std::size_t rounds_ = 0;
  std::size_t budget_ = 0;
  std::vector<Slot> grid_;
  CoefficientMatrix coefficients_;
  std::vector<QosDemand> demands_;
  std::vector<PathIndex> dedicated_paths_;
  std::uint64_t session_seed_ = 0;
  std::size_t plain_cells_ = 0;
};

// One fixed path carries XOR parity in each of the m rounds. The parity
// path defaults to the last one.
CodingPlan plan_dedicated_single(std::size_t k, std::size_t m,
                                 std::optional<PathIndex> parity_path = std::nullopt,
                                 const PlanOptions& options = {});

// Cycle of k rounds; round r carries parity on path r.
CodingPlan plan_rotating_single(std::size_t k, const PlanOptions& options = {});

// Paths j and k2 carry parity rows 1 and 2 in every round.
CodingPlan plan_two_dedicated(std::size_t n, PathIndex j, PathIndex k2,
                              const PlanOptions& options = {});

// m = ceil(n/t) rounds; round r carries parity on paths r*t ... r*t+t-1,
// wrapping modulo n for the final short group.
CodingPlan plan_npst(std::size_t n, std::size_t t, const PlanOptions& options = {});

// Per-path protection budgets; m = sum(p_i) / t.
CodingPlan plan_qos(std::size_t k, std::size_t t, std::span<const QosDemand> demands,
                    const PlanOptions& options = {});

// (k - t) / k from the plan's parameters, as an exact rational.
Rational normalized_capacity(const CodingPlan& plan);

}  // namespace smate
