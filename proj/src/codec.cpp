#include "smate/codec.hpp"

#include <string>

#include "combinations.hpp"

namespace smate {
namespace {

std::string str(std::size_t v) { return std::to_string(v); }

void check_symbol_length(const CodingPlan& plan, std::size_t length) {
  const std::size_t unit = plan.field().symbol_unit();
  if (unit == 0) {
    throw CodecError("byte symbols are unsupported over GF(2^" +
                     str(plan.field().degree()) + ")");
  }
  if (length % unit != 0) {
    throw CodecError("symbol length " + str(length) + " is not a multiple of " + str(unit));
  }
}

}  // namespace

void RoundColumn::erase(PathIndex path) {
  if (path >= cells.size()) throw CodecError("erased path " + str(path) + " out of range");
  erased.insert(path);
  cells[path].data.clear();
}

std::string_view to_string(RecoveryStatus status) {
  switch (status) {
    case RecoveryStatus::kIntact:
      return "intact";
    case RecoveryStatus::kRecovered:
      return "recovered";
    case RecoveryStatus::kUnrecoverable:
      return "unrecoverable";
  }
  return "unknown";
}

RoundColumn encode_column(const CodingPlan& plan, RoundIndex round,
                          const std::map<PathIndex, Symbol>& plain_cells) {
  const std::vector<PathIndex> plain = plan.plain_paths(round);
  if (plain_cells.size() != plain.size()) {
    throw CodecError("round " + str(round) + " expects " + str(plain.size()) +
                     " plain cells, got " + str(plain_cells.size()));
  }
  std::optional<std::size_t> length;
  for (PathIndex p : plain) {
    auto it = plain_cells.find(p);
    if (it == plain_cells.end()) {
      throw CodecError("missing plain cell for path " + str(p) + " in round " + str(round));
    }
    if (length && *length != it->second.size()) {
      throw CodecError("plain cells in round " + str(round) + " differ in length");
    }
    length = it->second.size();
  }
  const std::size_t size = length.value_or(0);
  check_symbol_length(plan, size);

  RoundColumn column;
  column.round = round;
  column.cells.resize(plan.paths());
  for (std::size_t p = 0; p < plan.paths(); ++p) {
    const Slot slot = plan.slot(static_cast<PathIndex>(p), round);
    column.cells[p].slot = slot;
    if (!slot.is_parity()) {
      column.cells[p].data = plain_cells.at(static_cast<PathIndex>(p));
      continue;
    }
    Symbol parity(size, 0);
    for (PathIndex i : plain) {
      plan.field().multiply_accumulate(plan.coefficient(slot.parity_index, i),
                                       plain_cells.at(i), parity);
    }
    column.cells[p].data = std::move(parity);
  }
  return column;
}

RecoveryOutcome decode_column(const CodingPlan& plan, const RoundColumn& column) {
  if (column.cells.size() != plan.paths()) {
    throw CodecError("column has " + str(column.cells.size()) + " cells, plan has " +
                     str(plan.paths()) + " paths");
  }
  for (PathIndex p : column.erased) {
    if (p >= plan.paths()) throw CodecError("erased path " + str(p) + " out of range");
  }
  std::optional<std::size_t> length;
  for (std::size_t p = 0; p < plan.paths(); ++p) {
    const auto path = static_cast<PathIndex>(p);
    if (column.cells[p].slot != plan.slot(path, column.round)) {
      throw CodecError("cell on path " + str(p) + " does not match the plan's slot");
    }
    if (column.is_erased(path)) continue;
    if (length && *length != column.cells[p].data.size()) {
      throw CodecError("present cells in round " + str(column.round) + " differ in length");
    }
    length = column.cells[p].data.size();
  }

  std::vector<std::size_t> lost;  // erased plain paths, ascending
  std::vector<std::size_t> rows;  // surviving parity rows (0-based)
  for (PathIndex p : column.erased) {
    if (!column.cells[p].slot.is_parity()) lost.push_back(p);
  }
  const std::vector<PathIndex> parity = plan.parity_paths(column.round);
  for (std::size_t l = 0; l < parity.size(); ++l) {
    if (!column.is_erased(parity[l])) rows.push_back(l);
  }

  RecoveryOutcome outcome;
  if (lost.empty()) return outcome;
  outcome.status = RecoveryStatus::kUnrecoverable;
  if (lost.size() > rows.size() || !length) return outcome;
  check_symbol_length(plan, *length);

  const FieldContext& field = plan.field();
  std::vector<std::size_t> chosen;
  FieldMatrix system;
  detail::for_each_combination(rows.size(), lost.size(), [&](const auto& pick) {
    std::vector<std::size_t> candidate;
    for (std::size_t i : pick) candidate.push_back(rows[i]);
    FieldMatrix m = plan.coefficients().select(candidate, lost);
    if (!is_invertible(field, m)) return true;
    chosen = std::move(candidate);
    system = std::move(m);
    return false;
  });
  if (chosen.empty()) return outcome;

  // Right-hand sides: each chosen parity cell minus the surviving plain terms.
  std::vector<Symbol> rhs;
  rhs.reserve(chosen.size());
  for (std::size_t l : chosen) {
    Symbol acc = column.cells[parity[l]].data;
    for (std::size_t p = 0; p < plan.paths(); ++p) {
      const auto path = static_cast<PathIndex>(p);
      if (column.cells[p].slot.is_parity() || column.is_erased(path)) continue;
      field.multiply_accumulate(plan.coefficient(static_cast<std::uint8_t>(l + 1), path),
                                column.cells[p].data, acc);
    }
    rhs.push_back(std::move(acc));
  }

  const FieldMatrix inverse = invert(field, system);
  for (std::size_t w = 0; w < lost.size(); ++w) {
    Symbol x(*length, 0);
    for (std::size_t j = 0; j < rhs.size(); ++j) {
      field.multiply_accumulate(inverse.at(w, j), rhs[j], x);
    }
    outcome.recovered_cells.emplace(static_cast<PathIndex>(lost[w]), std::move(x));
  }
  outcome.status = RecoveryStatus::kRecovered;
  outcome.equations_used = lost.size();
  outcome.system = std::move(system);
  return outcome;
}

std::vector<RoundColumn> encode_session(const CodingPlan& plan,
                                        std::span<const Symbol> stream) {
  const std::size_t per_cycle = plan.plain_cells_per_cycle();
  if (per_cycle == 0) throw CodecError("plan has no plain slots");
  if (stream.size() % per_cycle != 0) {
    throw CodecError("stream underrun: " + str(stream.size()) +
                     " symbols do not fill whole cycles of " + str(per_cycle));
  }
  const std::size_t rounds = stream.size() / per_cycle * plan.rounds_per_cycle();
  std::vector<RoundColumn> columns;
  columns.reserve(rounds);
  std::size_t next = 0;
  for (std::size_t r = 0; r < rounds; ++r) {
    const auto round = static_cast<RoundIndex>(r);
    std::map<PathIndex, Symbol> plain;
    for (PathIndex p : plan.plain_paths(round)) plain.emplace(p, stream[next++]);
    columns.push_back(encode_column(plan, round, plain));
  }
  return columns;
}

bool SessionDecode::complete() const {
  for (const auto& s : stream) {
    if (!s) return false;
  }
  return true;
}

SessionDecode decode_session(const CodingPlan& plan, std::span<const RoundColumn> columns) {
  SessionDecode out;
  out.outcomes.reserve(columns.size());
  for (const RoundColumn& column : columns) {
    RecoveryOutcome outcome = decode_column(plan, column);
    for (PathIndex p : plan.plain_paths(column.round)) {
      if (!column.is_erased(p)) {
        out.stream.emplace_back(column.cells[p].data);
      } else if (auto it = outcome.recovered_cells.find(p);
                 it != outcome.recovered_cells.end()) {
        out.stream.emplace_back(it->second);
      } else {
        out.stream.emplace_back(std::nullopt);
      }
    }
    out.outcomes.push_back(std::move(outcome));
  }
  return out;
}

}  // namespace smate
