#include "smate/simnet.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <map>
#include <optional>

#include "combinations.hpp"
#include "seeding.hpp"
#include "smate/packet_wire.hpp"

namespace smate {
namespace {

std::string str(std::size_t v) { return std::to_string(v); }

// Portable Fisher-Yates: std::shuffle's use of distributions is
// implementation-defined, raw engine output is not.
template <typename T>
void shuffle(std::vector<T>& v, std::mt19937_64& engine) {
  for (std::size_t i = v.size(); i > 1; --i) {
    std::swap(v[i - 1], v[engine() % i]);
  }
}

double unit_interval(std::mt19937_64& engine) {
  return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

std::uint64_t nonce(std::uint32_t session, RoundIndex round) {
  return (static_cast<std::uint64_t>(session) << 32) | round;
}

}  // namespace

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::kNone:
      return "none";
    case FailureKind::kSingleRandomPerRound:
      return "single_random";
    case FailureKind::kFixedPaths:
      return "fixed";
    case FailureKind::kAdversarialWorstCase:
      return "adversarial";
    case FailureKind::kPerPathBernoulli:
      return "bernoulli";
  }
  return "unknown";
}

FailureModel FailureModel::none() { return {}; }

FailureModel FailureModel::single_random(std::uint64_t seed) {
  FailureModel fm;
  fm.kind = FailureKind::kSingleRandomPerRound;
  fm.seed = seed;
  return fm;
}

FailureModel FailureModel::fixed(std::vector<PathIndex> paths) {
  FailureModel fm;
  fm.kind = FailureKind::kFixedPaths;
  std::sort(paths.begin(), paths.end());
  paths.erase(std::unique(paths.begin(), paths.end()), paths.end());
  fm.fixed_paths = std::move(paths);
  return fm;
}

FailureModel FailureModel::adversarial(std::size_t budget, std::uint64_t seed) {
  FailureModel fm;
  fm.kind = FailureKind::kAdversarialWorstCase;
  fm.adversary_budget = budget;
  fm.seed = seed;
  return fm;
}

FailureModel FailureModel::bernoulli(std::vector<double> probability, std::uint64_t seed) {
  for (double p : probability) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw SimulationError("erasure probabilities must lie in [0, 1]");
    }
  }
  FailureModel fm;
  fm.kind = FailureKind::kPerPathBernoulli;
  fm.erasure_probability = std::move(probability);
  fm.seed = seed;
  return fm;
}

std::vector<PathIndex> FailureModel::erasures(const CodingPlan& plan, RoundIndex round) const {
  const std::size_t k = plan.paths();
  std::vector<PathIndex> out;
  switch (kind) {
    case FailureKind::kNone:
      break;
    case FailureKind::kSingleRandomPerRound: {
      auto engine = detail::make_engine(seed, {round});
      out.push_back(static_cast<PathIndex>(engine() % k));
      break;
    }
    case FailureKind::kFixedPaths:
      for (PathIndex p : fixed_paths) {
        if (p >= k) throw SimulationError("failed path " + str(p) + " out of range");
        out.push_back(p);
      }
      break;
    case FailureKind::kAdversarialWorstCase: {
      auto engine = detail::make_engine(seed, {round});
      std::vector<PathIndex> plain = plan.plain_paths(round);
      std::vector<PathIndex> parity = plan.parity_paths(round);
      shuffle(plain, engine);
      shuffle(parity, engine);
      std::size_t budget = std::min(adversary_budget, k);
      for (PathIndex p : plain) {
        if (budget == 0) break;
        out.push_back(p);
        --budget;
      }
      for (PathIndex p : parity) {
        if (budget == 0) break;
        out.push_back(p);
        --budget;
      }
      break;
    }
    case FailureKind::kPerPathBernoulli: {
      if (erasure_probability.size() != k && erasure_probability.size() != 1) {
        throw SimulationError("bernoulli model needs one probability, or one per path (" +
                              str(k) + ")");
      }
      auto engine = detail::make_engine(seed, {round});
      for (std::size_t p = 0; p < k; ++p) {
        const double q = erasure_probability[erasure_probability.size() == 1 ? 0 : p];
        if (unit_interval(engine) < q) {
          out.push_back(static_cast<PathIndex>(p));
        }
      }
      break;
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::size_t FailureModel::max_erasures_per_round(std::size_t paths) const {
  switch (kind) {
    case FailureKind::kNone:
      return 0;
    case FailureKind::kSingleRandomPerRound:
      return 1;
    case FailureKind::kFixedPaths:
      return std::min(fixed_paths.size(), paths);
    case FailureKind::kAdversarialWorstCase:
      return std::min(adversary_budget, paths);
    case FailureKind::kPerPathBernoulli:
      if (erasure_probability.size() == 1) return erasure_probability[0] > 0.0 ? paths : 0;
      return static_cast<std::size_t>(std::count_if(
          erasure_probability.begin(), erasure_probability.end(),
          [](double p) { return p > 0.0; }));
  }
  return paths;
}

std::string sha256_hex(std::span<const std::uint8_t> bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int size = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &size, EVP_sha256(), nullptr) != 1) {
    throw SimulationError("SHA-256 digest failed");
  }
  return to_hex(std::span<const std::uint8_t>(digest, size));
}

SessionReport run_session(const CodingPlan& base_plan, std::span<const std::uint8_t> payload,
                          const FailureModel& failures, std::size_t chunk_size,
                          const SessionOptions& options) {
  const CodingPlan plan = base_plan.for_session(options.session);
  const std::size_t k = plan.paths();
  const std::size_t unit = plan.field().symbol_unit();
  if (unit == 0) {
    throw SimulationError("byte payloads are unsupported over GF(2^" +
                          str(plan.field().degree()) + ")");
  }
  if (chunk_size == 0 || chunk_size % unit != 0) {
    throw SimulationError("chunk size " + str(chunk_size) + " must be a positive multiple of " +
                          str(unit));
  }

  Chunks chunks = chunk(payload, chunk_size);
  const std::size_t data_chunks = chunks.symbols.size();
  const std::size_t per_cycle = plan.plain_cells_per_cycle();
  while (chunks.symbols.size() % per_cycle != 0) {
    chunks.symbols.emplace_back(chunk_size, 0);
    chunks.lengths.push_back(0);
  }

  // Which path and round carry stream position c.
  std::vector<std::pair<PathIndex, RoundIndex>> placement;
  placement.reserve(chunks.symbols.size());
  for (RoundIndex r = 0; placement.size() < chunks.symbols.size(); ++r) {
    for (PathIndex p : plan.plain_paths(r)) placement.emplace_back(p, r);
  }

  const KeyRing keys(k, options.key_seed, !options.encrypt);
  std::vector<Symbol> stream;
  stream.reserve(chunks.symbols.size());
  for (std::size_t c = 0; c < chunks.symbols.size(); ++c) {
    const auto [path, round] = placement[c];
    stream.push_back(keys.key(path).apply(chunks.symbols[c], nonce(options.session, round)));
  }

  const std::vector<RoundColumn> sent = encode_session(plan, stream);

  // Ingress: frame every cell. Channel: drop erased slots.
  std::map<std::pair<RoundIndex, PathIndex>, std::uint32_t> logical_len;
  for (std::size_t c = 0; c < placement.size(); ++c) {
    logical_len[{placement[c].second, placement[c].first}] = chunks.lengths[c];
  }
  SessionReport report;
  std::vector<std::vector<std::uint8_t>> wire;
  for (const RoundColumn& column : sent) {
    const std::vector<PathIndex> lost = failures.erasures(plan, column.round);
    for (std::size_t p = 0; p < k; ++p) {
      const auto path = static_cast<PathIndex>(p);
      if (std::binary_search(lost.begin(), lost.end(), path)) {
        report.erased_slots.push_back({path, column.round});
        continue;
      }
      const Cell& cell = column.cells[p];
      Packet packet;
      packet.sender_id = options.sender_id;
      packet.path = path;
      packet.session = options.session;
      packet.round = column.round;
      packet.scheme = static_cast<std::uint8_t>(plan.scheme());
      packet.kind = cell.slot.is_parity() ? PacketKind::kEncoded : PacketKind::kPlain;
      packet.parity_index = cell.slot.parity_index;
      packet.payload_len = cell.slot.is_parity()
                               ? static_cast<std::uint32_t>(cell.data.size())
                               : logical_len.at({column.round, path});
      packet.payload = cell.data;
      wire.push_back(seal(packet));
    }
  }

  // Egress: rebuild columns from the round and path tags in the frames.
  std::vector<RoundColumn> received(sent.size());
  for (std::size_t r = 0; r < received.size(); ++r) {
    received[r].round = static_cast<RoundIndex>(r);
    received[r].cells.resize(k);
    for (std::size_t p = 0; p < k; ++p) {
      received[r].cells[p].slot = plan.slot(static_cast<PathIndex>(p), received[r].round);
      received[r].erased.insert(static_cast<PathIndex>(p));
    }
  }
  for (const auto& frame : wire) {
    Packet packet = parse(frame);
    if (packet.session != options.session || packet.round >= received.size() ||
        packet.path >= k) {
      throw SimulationError("frame tagged outside the session");
    }
    Cell& cell = received[packet.round].cells[packet.path];
    if (cell.slot.parity_index != packet.parity_index) {
      throw SimulationError("frame role disagrees with the plan");
    }
    cell.data = std::move(packet.payload);
    received[packet.round].erased.erase(packet.path);
  }

  const SessionDecode decoded = decode_session(plan, received);
  for (const RecoveryOutcome& o : decoded.outcomes) {
    switch (o.status) {
      case RecoveryStatus::kIntact:
        ++report.columns_intact;
        break;
      case RecoveryStatus::kRecovered:
        ++report.columns_recovered;
        break;
      case RecoveryStatus::kUnrecoverable:
        ++report.columns_unrecoverable;
        break;
    }
  }
  report.columns_total = decoded.outcomes.size();

  // Only the last data chunk is short and padding chunks are empty, so the
  // session length fixes every logical length, including recovered ones.
  std::vector<std::uint8_t> delivered;
  std::size_t delivered_cells = 0;
  for (std::size_t c = 0; c < decoded.stream.size(); ++c) {
    if (!decoded.stream[c]) continue;
    ++delivered_cells;
    if (c >= data_chunks) continue;
    const auto [path, round] = placement[c];
    const Symbol plain = keys.key(path).invert(*decoded.stream[c], nonce(options.session, round));
    const std::size_t len = std::min(chunk_size, payload.size() - c * chunk_size);
    delivered.insert(delivered.end(), plain.begin(), plain.begin() + static_cast<std::ptrdiff_t>(len));
  }

  report.delivered_payload_hash = sha256_hex(delivered);
  report.payload_delivered =
      decoded.complete() && std::equal(delivered.begin(), delivered.end(), payload.begin(),
                                       payload.end());
  report.measured_capacity = measure_capacity(plan);
  const std::size_t cells = report.columns_total * k;
  report.goodput_ratio = cells == 0 ? Rational(0)
                                    : Rational(static_cast<std::int64_t>(delivered_cells),
                                               static_cast<std::int64_t>(cells));
  return report;
}

std::vector<std::vector<PathIndex>> enumerate_failure_patterns(const CodingPlan& plan,
                                                               std::size_t t_max) {
  const std::size_t k = plan.paths();
  const std::size_t limit = std::min(t_max, k);
  std::size_t total = 0;
  std::size_t binom = 1;
  for (std::size_t e = 0; e <= limit; ++e) {
    if (e > 0) binom = binom * (k - e + 1) / e;
    total += binom;
    if (total > kPatternGuard) {
      throw SimulationError("enumerating erasure sets of size <= " + str(t_max) + " over " +
                            str(k) + " paths exceeds the guard of " + str(kPatternGuard));
    }
  }
  std::vector<std::vector<PathIndex>> out;
  out.reserve(total);
  for (std::size_t e = 0; e <= limit; ++e) {
    detail::for_each_combination(k, e, [&](const auto& idx) {
      out.emplace_back(idx.begin(), idx.end());
      return true;
    });
  }
  return out;
}

Rational measure_capacity(const CodingPlan& plan) {
  std::int64_t plain = 0;
  for (std::size_t r = 0; r < plan.rounds_per_cycle(); ++r) {
    for (std::size_t p = 0; p < plan.paths(); ++p) {
      if (!plan.slot(static_cast<PathIndex>(p), static_cast<RoundIndex>(r)).is_parity()) {
        ++plain;
      }
    }
  }
  return Rational(plain, static_cast<std::int64_t>(plan.paths() * plan.rounds_per_cycle()));
}

}  // namespace smate
