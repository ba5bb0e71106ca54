#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <vector>

#include "smate/coding_plan.hpp"

namespace smate {

// A data unit carried by one slot: a byte string read as a vector over the
// plan's field.
using Symbol = std::vector<std::uint8_t>;

struct Cell {
  Slot slot;
  Symbol data;

  friend bool operator==(const Cell&, const Cell&) = default;
};

// One round of transmission: one cell per path plus the set of paths whose
// cell the receiver knows to be lost.
struct RoundColumn {
  RoundIndex round = 0;
  std::vector<Cell> cells;
  std::set<PathIndex> erased;

  // Marks the cell lost and drops its contents.
  void erase(PathIndex path);
  bool is_erased(PathIndex path) const { return erased.contains(path); }

  friend bool operator==(const RoundColumn&, const RoundColumn&) = default;
};

enum class RecoveryStatus : std::uint8_t { kIntact, kRecovered, kUnrecoverable };

std::string_view to_string(RecoveryStatus status);

struct RecoveryOutcome {
  RecoveryStatus status = RecoveryStatus::kIntact;
  std::map<PathIndex, Symbol> recovered_cells;
  std::size_t equations_used = 0;
  // Coefficients of the erased plain cells in the equations solved; rows
  // follow the parity rows used, columns the erased paths in ascending order.
  FieldMatrix system;
};

// Builds the column for `round`: plain cells from `plain_cells` (exactly the
// plan's plain paths, equal lengths) and every parity cell l as
// sum_i coefficient(l, i) * x_i.
RoundColumn encode_column(const CodingPlan& plan, RoundIndex round,
                          const std::map<PathIndex, Symbol>& plain_cells);

// Recovers erased plain cells from surviving parity cells. Too many erasures
// yield kUnrecoverable; only a structurally invalid column throws.
RecoveryOutcome decode_column(const CodingPlan& plan, const RoundColumn& column);

// Fills plain slots in (round, path) order; the stream length must be a
// multiple of the plan's plain cells per cycle.
std::vector<RoundColumn> encode_session(const CodingPlan& plan,
                                        std::span<const Symbol> stream);

struct SessionDecode {
  // Plain symbols in the order they were encoded; nullopt marks a gap.
  std::vector<std::optional<Symbol>> stream;
  std::vector<RecoveryOutcome> outcomes;

  bool complete() const;
};

SessionDecode decode_session(const CodingPlan& plan, std::span<const RoundColumn> columns);

}  // namespace smate
