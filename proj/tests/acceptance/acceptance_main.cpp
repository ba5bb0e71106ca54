// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Runtime limits are part of each criterion.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>

#include "oracles.hpp"
#include "smate/codec.hpp"
#include "smate/coding_plan.hpp"
#include "smate/harness.hpp"
#include "smate/packet_wire.hpp"
#include "smate/scenario.hpp"
#include "smate/simnet.hpp"
#include "smate/verify.hpp"

using namespace smate;

namespace {

constexpr std::uint32_t kPoly = 0x11B;

struct Criterion {
  const char* id;
  const char* title;
  double limit_seconds;
  // Returns an empty string on success, else the first discrepancy.
  std::function<std::string()> body;
};

Symbol random_symbol(std::mt19937_64& rng, std::size_t n) {
  Symbol s(n);
  for (auto& b : s) b = static_cast<std::uint8_t>(rng());
  return s;
}

std::map<PathIndex, Symbol> random_plain(const CodingPlan& plan, RoundIndex r,
                                         std::mt19937_64& rng, std::size_t n) {
  std::map<PathIndex, Symbol> out;
  for (PathIndex p : plan.plain_paths(r)) out[p] = random_symbol(rng, n);
  return out;
}

std::vector<QosDemand> spread_demands(std::size_t k, std::size_t t, std::uint32_t m) {
  // Deal t*m parity cells round-robin, so p_i differ by at most one.
  std::vector<QosDemand> d(k);
  for (std::size_t i = 0; i < k; ++i) {
    d[i].path = static_cast<PathIndex>(i);
    d[i].priority = static_cast<std::int32_t>(i);
  }
  for (std::size_t c = 0; c < t * m; ++c) ++d[c % k].protection_slots;
  for (auto& x : d) x.data_slots = m - x.protection_slots;
  return d;
}

std::vector<CodingPlan> single_failure_families(std::size_t k) {
  return {plan_dedicated_single(k, k - 1), plan_rotating_single(k), plan_npst(k, 1),
          plan_qos(k, 1, spread_demands(k, 1, static_cast<std::uint32_t>(k)))};
}

std::string name(const CodingPlan& plan) {
  return std::string(to_string(plan.scheme())) + " k=" + std::to_string(plan.paths()) +
         " t=" + std::to_string(plan.protection_budget());
}

// Erases `set` from a fresh random column and checks the decoder's answer
// against the original plain cells.
RecoveryOutcome erase_and_decode(const CodingPlan& plan, RoundIndex r,
                                 const std::vector<PathIndex>& set, std::mt19937_64& rng,
                                 bool* exact) {
  const auto plain = random_plain(plan, r, rng, 24);
  auto col = encode_column(plan, r, plain);
  for (PathIndex p : set) col.erase(p);
  auto out = decode_column(plan, col);
  *exact = true;
  if (out.status == RecoveryStatus::kUnrecoverable) return out;
  for (const auto& [p, data] : plain) {
    if (!col.is_erased(p)) continue;
    auto it = out.recovered_cells.find(p);
    if (it == out.recovered_cells.end() || it->second != data) *exact = false;
  }
  return out;
}

// ---------------------------------------------------------------------------

std::string capacity_identities() {
  for (std::int64_t k = 2; k <= 16; ++k) {
    const auto kk = static_cast<std::size_t>(k);
    for (const auto& plan : {plan_dedicated_single(kk, kk - 1), plan_rotating_single(kk)}) {
      if (measure_capacity(plan) != Rational(k - 1, k)) return name(plan) + ": capacity";
    }
  }
  for (std::int64_t n = 3; n <= 16; ++n) {
    for (std::int64_t t = 1; t <= 4 && t < n; ++t) {
      const auto plan = plan_npst(static_cast<std::size_t>(n), static_cast<std::size_t>(t));
      if (measure_capacity(plan) != Rational(n - t, n)) return name(plan) + ": capacity";
    }
  }
  for (std::size_t k = 2; k <= 16; ++k) {
    for (std::size_t t = 1; t <= 4 && t < k; ++t) {
      for (std::uint32_t m : {1u, 3u, 7u}) {
        const auto plan = plan_qos(k, t, spread_demands(k, t, m));
        for (RoundIndex r = 0; r < plan.rounds_per_cycle(); ++r) {
          std::size_t working = 0;
          for (PathIndex p = 0; p < k; ++p) working += plan.slot(p, r).is_parity() ? 0 : 1;
          if (working != k - t) return name(plan) + ": working paths per round";
        }
      }
    }
  }
  return {};
}

std::string single_failure_recovery() {
  std::mt19937_64 rng(2024);
  for (std::size_t k = 2; k <= 8; ++k) {
    for (const auto& plan : single_failure_families(k)) {
      for (RoundIndex r = 0; r < plan.rounds_per_cycle(); ++r) {
        for (PathIndex lost = 0; lost < k; ++lost) {
          for (int trial = 0; trial < 100; ++trial) {
            bool exact = false;
            const auto out = erase_and_decode(plan, r, {lost}, rng, &exact);
            if (out.status == RecoveryStatus::kUnrecoverable || !exact) {
              return name(plan) + ": round " + std::to_string(r) + " path " +
                     std::to_string(lost);
            }
          }
        }
      }
      // End to end through framing, with the same path lost in every round.
      for (PathIndex lost = 0; lost < k; ++lost) {
        std::vector<std::uint8_t> payload(1 + rng() % 3000);
        for (auto& b : payload) b = static_cast<std::uint8_t>(rng());
        const auto rep = run_session(plan, payload, FailureModel::fixed({lost}), 1 + rng() % 40);
        if (rep.columns_unrecoverable != 0 || rep.delivered_payload_hash != sha256_hex(payload)) {
          return name(plan) + ": session with path " + std::to_string(lost) + " lost";
        }
      }
    }
  }
  return {};
}

std::string two_failure_recovery() {
  std::mt19937_64 rng(77);
  for (std::size_t n = 3; n <= 10; ++n) {
    for (PathIndex j = 0; j < n; ++j) {
      for (PathIndex k2 = static_cast<PathIndex>(j + 1); k2 < n; ++k2) {
        const auto plan = plan_two_dedicated(n, j, k2);
        const auto& f = plan.field();
        for (PathIndex a = 0; a < n; ++a) {
          for (PathIndex b = static_cast<PathIndex>(a + 1); b < n; ++b) {
            bool exact = false;
            const auto out = erase_and_decode(plan, 0, {a, b}, rng, &exact);
            const int parity_lost = (a == j || a == k2) + (b == j || b == k2);
            const auto want = parity_lost == 2 ? RecoveryStatus::kIntact : RecoveryStatus::kRecovered;
            if (out.status != want || !exact) {
              return name(plan) + " parity {" + std::to_string(j) + "," + std::to_string(k2) +
                     "}: erased {" + std::to_string(a) + "," + std::to_string(b) + "}";
            }
            if (parity_lost == 0) {
              // Two working paths: rows (1, 1) and (alpha^a, alpha^b).
              const auto& s = out.system;
              if (s.rows() != 2 || s.at(0, 0) != FieldElement(1) || s.at(0, 1) != FieldElement(1) ||
                  s.at(1, 0) != f.alpha_pow(a) || s.at(1, 1) != f.alpha_pow(b)) {
                return name(plan) + ": unexpected elimination system";
              }
            }
          }
        }
      }
    }
  }
  // The pair {1,3} yields exactly [[1,1],[alpha,alpha^3]].
  const auto plan = plan_two_dedicated(5, 2, 4);
  bool exact = false;
  const auto out = erase_and_decode(plan, 0, {1, 3}, rng, &exact);
  const std::uint32_t alpha = plan.field().generator().value;
  if (!exact || out.system.at(1, 0).value != alpha ||
      out.system.at(1, 1).value != oracle::gf_pow(alpha, 3, kPoly, 8)) {
    return "worked example {1,3}";
  }
  return {};
}

std::string npst_radius() {
  std::mt19937_64 rng(5);
  for (std::size_t n = 2; n <= 10; ++n) {
    for (std::size_t t = 1; t <= 3 && t < n; ++t) {
      const auto plan = plan_npst(n, t);
      const auto within = enumerate_failure_patterns(plan, t);
      for (RoundIndex r = 0; r < plan.rounds_per_cycle(); ++r) {
        for (const auto& set : within) {
          bool exact = false;
          const auto out = erase_and_decode(plan, r, set, rng, &exact);
          if (out.status == RecoveryStatus::kUnrecoverable || !exact) {
            return name(plan) + ": set of size " + std::to_string(set.size()) + " in round " +
                   std::to_string(r) + " not recovered";
          }
        }
        // Size t+1: every set touching a plain cell must fail, and one must exist.
        std::size_t witnesses = 0;
        std::string err;
        std::vector<std::size_t> idx(t + 1);
        for (std::size_t i = 0; i <= t; ++i) idx[i] = i;
        while (true) {
          std::vector<PathIndex> set(idx.begin(), idx.end());
          bool hits_plain = false;
          for (PathIndex p : set) hits_plain = hits_plain || !plan.slot(p, r).is_parity();
          if (hits_plain) {
            bool exact = false;
            if (erase_and_decode(plan, r, set, rng, &exact).status != RecoveryStatus::kUnrecoverable) {
              return name(plan) + ": round " + std::to_string(r) + " decoded t+1 erasures";
            }
            ++witnesses;
          }
          std::size_t i = t + 1;
          while (i > 0 && idx[i - 1] == n - (t + 1) + (i - 1)) --i;
          if (i == 0) break;
          ++idx[i - 1];
          for (std::size_t j = i; j <= t; ++j) idx[j] = idx[j - 1] + 1;
        }
        if (witnesses == 0) return name(plan) + ": no size t+1 witness in round " + std::to_string(r);
      }
    }
  }
  return {};
}

// Every t x t minor checked with the library and with cofactor determinants.
std::string mds_suite(const std::function<CoefficientMatrix(std::size_t, std::size_t)>& make) {
  const auto& f = *FieldContext::gf256();
  for (std::size_t t = 1; t <= 4; ++t) {
    for (std::size_t n = t; n <= 12; ++n) {
      const auto h = make(t, n);
      if (!check_mds(f, h, "").passed) {
        return "t=" + std::to_string(t) + " n=" + std::to_string(n) + ": library check";
      }
      std::vector<std::size_t> idx(t);
      for (std::size_t i = 0; i < t; ++i) idx[i] = i;
      while (true) {
        oracle::Matrix m(t, std::vector<std::uint32_t>(t));
        for (std::size_t r = 0; r < t; ++r)
          for (std::size_t c = 0; c < t; ++c) m[r][c] = h.at(r, idx[c]).value;
        if (oracle::det(m, kPoly, 8) == 0) {
          return "t=" + std::to_string(t) + " n=" + std::to_string(n) + ": singular minor";
        }
        std::size_t i = t;
        while (i > 0 && idx[i - 1] == n - t + (i - 1)) --i;
        if (i == 0) break;
        ++idx[i - 1];
        for (std::size_t j = i; j < t; ++j) idx[j] = idx[j - 1] + 1;
      }
    }
  }
  return {};
}

std::string mds_property() {
  const auto& f = *FieldContext::gf256();
  auto clean = [&](std::size_t t, std::size_t n) { return build_vandermonde(f, t, n); };
  if (auto err = mds_suite(clean); !err.empty()) return err;
  // Path 5 reusing path 1's exponent must make the same suite fail.
  auto corrupt = [&](std::size_t t, std::size_t n) {
    auto h = build_vandermonde(f, t, n);
    if (t == 3 && n == 7) {
      for (std::size_t r = 0; r < t; ++r) h.at(r, 5) = h.at(r, 1);
    }
    return h;
  };
  if (mds_suite(corrupt).empty()) return "corrupted matrix passed the suite";
  return {};
}

std::string oracle_equivalence() {
  std::mt19937_64 rng(1000);
  std::size_t recovered = 0;
  for (int instance = 0; instance < 1000; ++instance) {
    const std::size_t n = 3 + rng() % 6;
    CodingPlan plan = plan_rotating_single(n);
    switch (rng() % 4) {
      case 0:
        break;
      case 1:
        plan = plan_npst(n, 1 + rng() % std::min<std::size_t>(3, n - 1));
        break;
      case 2:
        plan = plan_two_dedicated(n, 0, static_cast<PathIndex>(n - 1));
        break;
      default: {
        const std::size_t t = 1 + rng() % std::min<std::size_t>(3, n - 1);
        plan = plan_qos(n, t, spread_demands(n, t, 1 + static_cast<std::uint32_t>(rng() % 4)));
      }
    }
    const RoundIndex r = static_cast<RoundIndex>(rng() % plan.rounds_per_cycle());
    const std::size_t len = 1 + rng() % 12;
    const auto plain = random_plain(plan, r, rng, len);
    auto col = encode_column(plan, r, plain);
    const std::size_t e = rng() % (plan.protection_budget() + 2);
    for (std::size_t i = 0; i < e; ++i) col.erase(static_cast<PathIndex>(rng() % n));

    oracle::Matrix rows;
    std::vector<Symbol> parity;
    for (PathIndex p = 0; p < n; ++p) {
      const Slot s = plan.slot(p, r);
      if (!s.is_parity() || col.is_erased(p)) continue;
      std::vector<std::uint32_t> row(n);
      for (PathIndex i = 0; i < n; ++i) row[i] = plan.coefficient(s.parity_index, i).value;
      rows.push_back(row);
      parity.push_back(col.cells[p].data);
    }
    std::vector<std::optional<Symbol>> known(n);
    for (PathIndex p = 0; p < n; ++p) {
      if (plan.slot(p, r).is_parity()) {
        known[p] = Symbol(len, 0);
      } else if (!col.is_erased(p)) {
        known[p] = col.cells[p].data;
      }
    }
    const auto want = oracle::decode(rows, parity, known, kPoly);
    const auto got = decode_column(plan, col);
    if (want.has_value() != (got.status != RecoveryStatus::kUnrecoverable)) {
      return "instance " + std::to_string(instance) + ": recoverability differs";
    }
    if (!want) continue;
    std::size_t j = 0;
    for (PathIndex p = 0; p < n; ++p) {
      if (known[p]) continue;
      auto it = got.recovered_cells.find(p);
      if (it == got.recovered_cells.end() || it->second != (*want)[j]) {
        return "instance " + std::to_string(instance) + ": recovered cell differs";
      }
      ++j;
      ++recovered;
    }
  }
  if (recovered == 0) return "no instance exercised recovery";

  // GF(2) single erasures: try every candidate byte against the XOR parity.
  PlanOptions gf2;
  gf2.field = std::make_shared<const FieldContext>(1, 0x3, 0x1);
  for (int instance = 0; instance < 100; ++instance) {
    const std::size_t k = 2 + rng() % 7;
    const auto plan = plan_rotating_single(k, gf2);
    const RoundIndex r = static_cast<RoundIndex>(rng() % k);
    const auto plain = random_plain(plan, r, rng, 4);
    auto col = encode_column(plan, r, plain);
    const PathIndex lost = plan.plain_paths(r)[rng() % (k - 1)];
    col.erase(lost);
    const auto got = decode_column(plan, col);
    for (std::size_t byte = 0; byte < 4; ++byte) {
      int matches = 0;
      std::uint8_t found = 0;
      for (int cand = 0; cand < 256; ++cand) {
        std::uint8_t x = static_cast<std::uint8_t>(cand);
        for (PathIndex p : plan.plain_paths(r)) {
          if (p != lost) x ^= col.cells[p].data[byte];
        }
        if (x == col.cells[plan.parity_paths(r)[0]].data[byte]) {
          ++matches;
          found = static_cast<std::uint8_t>(cand);
        }
      }
      if (matches != 1 || got.recovered_cells.at(lost)[byte] != found) {
        return "GF(2) instance " + std::to_string(instance) + " differs";
      }
    }
  }
  return {};
}

std::vector<std::uint8_t> read_hex(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_hex(ss.str());
}

std::string wire_format() {
  std::mt19937_64 rng(7);
  std::vector<std::vector<std::uint8_t>> corpus;
  for (int i = 0; i < 10000; ++i) {
    Packet p;
    p.sender_id = static_cast<std::uint16_t>(rng());
    p.path = static_cast<std::uint16_t>(rng());
    p.session = static_cast<std::uint32_t>(rng());
    p.round = static_cast<std::uint32_t>(rng());
    p.scheme = static_cast<std::uint8_t>(rng());
    p.kind = rng() & 1 ? PacketKind::kEncoded : PacketKind::kPlain;
    p.parity_index = p.kind == PacketKind::kEncoded ? static_cast<std::uint8_t>(1 + rng() % 255) : 0;
    p.payload = random_symbol(rng, rng() % 128);
    p.payload_len = static_cast<std::uint32_t>(rng() % (p.payload.size() + 1));
    const auto frame = seal(p);
    if (parse(frame) != p) return "random packet " + std::to_string(i) + " did not round-trip";
    if (i < 64) corpus.push_back(frame);
  }

  Packet golden;
  golden.sender_id = 1;
  golden.path = 3;
  golden.session = 1;
  golden.round = 2;
  golden.scheme = 2;
  golden.payload = {'A', 'B'};
  golden.payload_len = 2;
  const auto fixture = read_hex(SMATE_FIXTURES "/golden_packet.hex");
  if (seal(golden) != fixture || seal(golden) != seal(golden)) return "golden fixture bytes changed";
  std::vector<std::uint8_t> body(fixture.begin(), fixture.end() - 4);
  const std::uint32_t crc = oracle::crc32(body);
  if (fixture[fixture.size() - 4] != (crc >> 24) || fixture.back() != (crc & 0xFF)) {
    return "golden fixture CRC disagrees with the bitwise oracle";
  }
  corpus.push_back(fixture);
  corpus.push_back(read_hex(SMATE_FIXTURES "/golden_encoded.hex"));

  for (std::size_t f = 0; f < corpus.size(); ++f) {
    for (std::size_t i = 0; i < corpus[f].size(); ++i) {
      for (int delta = 1; delta < 256; ++delta) {
        auto bad = corpus[f];
        bad[i] = static_cast<std::uint8_t>(bad[i] ^ delta);
        try {
          parse(bad);
          return "corruption of byte " + std::to_string(i) + " in frame " + std::to_string(f) +
                 " went undetected";
        } catch (const WireError&) {
        }
      }
    }
  }
  return {};
}

std::string render(const std::vector<ReportRow>& rows) {
  std::string out;
  for (const auto& r : rows) out += to_json_line(r) + "\n";
  out += csv_header() + "\n";
  for (const auto& r : rows) out += to_csv(r) + "\n";
  return out;
}

std::string determinism() {
  for (const char* cfg : {SMATE_CONFIGS "/capacity.ini", SMATE_CONFIGS "/sweeps.ini"}) {
    std::string first;
    for (std::size_t threads : {1u, 4u, 0u}) {
      const auto file = load_scenarios(cfg);
      RunOptions opts;
      opts.threads = threads;
      auto rows = run_scenarios(file.scenarios, opts);
      for (const auto& s : file.sweeps) {
        auto part = run_sweep(s, opts);
        rows.insert(rows.end(), part.begin(), part.end());
      }
      const std::string text = render(rows);
      if (rows.empty()) return std::string(cfg) + ": empty report";
      if (first.empty()) {
        first = text;
      } else if (text != first) {
        return std::string(cfg) + ": reports differ between runs";
      }
    }
  }
  return {};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"AC1", "capacity identities", 1.0, capacity_identities},
      {"AC2", "single-failure recovery, exhaustive", 30.0, single_failure_recovery},
      {"AC3", "two-failure recovery, exhaustive", 30.0, two_failure_recovery},
      {"AC4", "t-failure radius", 120.0, npst_radius},
      {"AC5", "MDS coefficient property", 5.0, mds_property},
      {"AC6", "oracle equivalence", 60.0, oracle_equivalence},
      {"AC7", "wire format", 60.0, wire_format},
      {"AC8", "determinism", 60.0, determinism},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string err;
    try {
      err = c.body();
    } catch (const std::exception& e) {
      err = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (err.empty() && secs >= c.limit_seconds) err = "runtime limit exceeded";
    char line[256];
    std::snprintf(line, sizeof line, "%s %s %s (%.3f s, limit %.0f s)", err.empty() ? "PASS" : "FAIL",
                  c.id, c.title, secs, c.limit_seconds);
    std::cout << line;
    if (!err.empty()) std::cout << ": " << err;
    std::cout << std::endl;
    failures += err.empty() ? 0 : 1;
  }
  return failures == 0 ? 0 : 1;
}
