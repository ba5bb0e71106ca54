#include "smate/verify.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <random>
#include <sstream>

#include "combinations.hpp"
#include "seeding.hpp"
#include "smate/codec.hpp"
#include "smate/coding_plan.hpp"
#include "smate/packet_wire.hpp"
#include "smate/simnet.hpp"

namespace smate {
namespace {

using Clock = std::chrono::steady_clock;

CheckResult timed(const std::string& name, const std::function<std::string()>& body) {
  CheckResult result;
  result.name = name;
  const auto start = Clock::now();
  try {
    result.detail = body();
    result.passed = result.detail.empty();
  } catch (const std::exception& e) {
    result.detail = std::string("exception: ") + e.what();
  }
  result.seconds = std::chrono::duration<double>(Clock::now() - start).count();
  if (result.passed) result.detail = "ok";
  return result;
}

std::string axioms(const FieldContext& f, bool exhaustive_triples, std::uint64_t seed) {
  const std::uint32_t q = f.order();
  for (std::uint32_t a = 0; a < q; ++a) {
    const FieldElement x(static_cast<std::uint16_t>(a));
    if (f.mul(x, FieldElement(1)) != x) return "1 is not a multiplicative identity";
    if (a != 0 && f.mul(x, f.inv(x)) != FieldElement(1)) {
      return "inverse of " + std::to_string(a) + " is wrong";
    }
    for (std::uint32_t b = 0; b < q; ++b) {
      const FieldElement y(static_cast<std::uint16_t>(b));
      if (f.mul(x, y) != f.mul(y, x)) return "multiplication is not commutative";
    }
  }
  auto triple = [&](FieldElement x, FieldElement y, FieldElement z) -> std::string {
    if (f.mul(f.mul(x, y), z) != f.mul(x, f.mul(y, z))) return "multiplication is not associative";
    if (f.mul(x, f.add(y, z)) != f.add(f.mul(x, y), f.mul(x, z))) {
      return "multiplication does not distribute over addition";
    }
    return {};
  };
  if (exhaustive_triples) {
    for (std::uint32_t a = 0; a < q; ++a)
      for (std::uint32_t b = 0; b < q; ++b)
        for (std::uint32_t c = 0; c < q; ++c) {
          auto err = triple(FieldElement(static_cast<std::uint16_t>(a)),
                            FieldElement(static_cast<std::uint16_t>(b)),
                            FieldElement(static_cast<std::uint16_t>(c)));
          if (!err.empty()) return err;
        }
  } else {
    auto rng = detail::make_engine(seed, {1});
    std::uniform_int_distribution<std::uint32_t> pick(0, q - 1);
    for (int i = 0; i < 200000; ++i) {
      auto err = triple(FieldElement(static_cast<std::uint16_t>(pick(rng))),
                        FieldElement(static_cast<std::uint16_t>(pick(rng))),
                        FieldElement(static_cast<std::uint16_t>(pick(rng))));
      if (!err.empty()) return err;
    }
  }
  return {};
}

Symbol random_symbol(std::mt19937_64& rng, std::size_t bytes) {
  Symbol s(bytes);
  for (auto& b : s) b = static_cast<std::uint8_t>(rng());
  return s;
}

// Encodes a random column, erases `erased`, decodes and compares. Returns
// the decode status, or kUnrecoverable if the recovered data is wrong.
RecoveryStatus try_pattern(const CodingPlan& plan, RoundIndex round,
                           const std::vector<PathIndex>& erased, std::mt19937_64& rng) {
  const std::size_t bytes = 4 * std::max<std::size_t>(1, plan.field().symbol_unit());
  std::map<PathIndex, Symbol> plain;
  for (PathIndex p : plan.plain_paths(round)) plain[p] = random_symbol(rng, bytes);
  RoundColumn column = encode_column(plan, round, plain);
  for (PathIndex p : erased) column.erase(p);
  const RecoveryOutcome out = decode_column(plan, column);
  if (out.status == RecoveryStatus::kUnrecoverable) return out.status;
  for (const auto& [path, data] : plain) {
    if (column.is_erased(path)) {
      auto it = out.recovered_cells.find(path);
      if (it == out.recovered_cells.end() || it->second != data) {
        return RecoveryStatus::kUnrecoverable;
      }
    }
  }
  return out.status;
}

std::string describe(const CodingPlan& plan) {
  std::ostringstream os;
  os << to_string(plan.scheme()) << " k=" << plan.paths() << " t=" << plan.protection_budget();
  return os.str();
}

// Every erasure set of size <= t in every round must decode correctly.
std::string radius_within(const CodingPlan& plan, std::uint64_t seed, std::size_t* patterns) {
  auto rng = detail::make_engine(seed, {2, plan.paths(), plan.protection_budget()});
  const auto sets = enumerate_failure_patterns(plan, plan.protection_budget());
  for (RoundIndex r = 0; r < plan.rounds_per_cycle(); ++r) {
    for (const auto& set : sets) {
      if (try_pattern(plan, r, set, rng) == RecoveryStatus::kUnrecoverable) {
        std::ostringstream os;
        os << describe(plan) << ": round " << r << " erasure set {";
        for (std::size_t i = 0; i < set.size(); ++i) os << (i ? "," : "") << set[i];
        os << "} not recovered";
        return os.str();
      }
      if (patterns) ++*patterns;
    }
  }
  return {};
}

// Every size t+1 erasure set touching a plain cell must be reported lost.
std::string radius_beyond(const CodingPlan& plan, std::uint64_t seed) {
  auto rng = detail::make_engine(seed, {3, plan.paths(), plan.protection_budget()});
  const std::size_t e = plan.protection_budget() + 1;
  if (e > plan.paths()) return {};
  std::string err;
  for (RoundIndex r = 0; r < plan.rounds_per_cycle() && err.empty(); ++r) {
    detail::for_each_combination(plan.paths(), e, [&](const auto& idx) {
      std::vector<PathIndex> set(idx.begin(), idx.end());
      const bool hits_plain = std::any_of(set.begin(), set.end(), [&](PathIndex p) {
        return !plan.slot(p, r).is_parity();
      });
      if (!hits_plain) return true;
      if (try_pattern(plan, r, set, rng) != RecoveryStatus::kUnrecoverable) {
        err = describe(plan) + ": round " + std::to_string(r) + " decoded past its radius";
        return false;
      }
      return true;
    });
  }
  return err;
}

std::vector<CodingPlan> single_failure_plans(std::size_t k) {
  std::vector<CodingPlan> plans;
  plans.push_back(plan_dedicated_single(k, k - 1));
  plans.push_back(plan_rotating_single(k));
  plans.push_back(plan_npst(k, 1));
  std::vector<QosDemand> demands;
  for (std::size_t p = 0; p < k; ++p) {
    demands.push_back({static_cast<PathIndex>(p), 1, static_cast<std::uint32_t>(k - 1),
                       static_cast<std::int32_t>(p)});
  }
  plans.push_back(plan_qos(k, 1, demands));
  return plans;
}

CoefficientMatrix maybe_corrupt(CoefficientMatrix h, bool corrupt) {
  // Copying column 0 into column 1 makes that pair dependent.
  if (corrupt && h.rows() >= 2 && h.cols() >= 2) h.at(1, 1) = h.at(1, 0);
  return h;
}

std::string mds_sweep(std::size_t t_max, std::size_t n_max, bool corrupt) {
  const auto& f = *FieldContext::gf256();
  for (std::size_t t = 1; t <= t_max; ++t) {
    for (std::size_t n = t; n <= n_max; ++n) {
      const auto h = maybe_corrupt(build_vandermonde(f, t, n), corrupt);
      CheckResult r = check_mds(f, h, "");
      if (!r.passed) return "t=" + std::to_string(t) + " n=" + std::to_string(n) + ": " + r.detail;
    }
  }
  return {};
}

std::string capacity_identities(std::size_t k_max) {
  for (std::size_t k = 2; k <= k_max; ++k) {
    for (const CodingPlan& plan : single_failure_plans(k)) {
      if (measure_capacity(plan) != Rational(static_cast<std::int64_t>(k - 1),
                                             static_cast<std::int64_t>(k))) {
        return describe(plan) + ": capacity is not (k-1)/k";
      }
    }
    for (std::size_t t = 1; t < k && t <= 4; ++t) {
      const CodingPlan plan = plan_npst(k, t);
      if (measure_capacity(plan) != normalized_capacity(plan)) {
        return describe(plan) + ": measured capacity differs from (n-t)/n";
      }
    }
  }
  return {};
}

std::string wire_round_trip(std::size_t count, std::uint64_t seed) {
  auto rng = detail::make_engine(seed, {4});
  for (std::size_t i = 0; i < count; ++i) {
    Packet p;
    p.sender_id = static_cast<std::uint16_t>(rng());
    p.path = static_cast<std::uint16_t>(rng());
    p.session = static_cast<std::uint32_t>(rng());
    p.round = static_cast<std::uint32_t>(rng());
    p.scheme = static_cast<std::uint8_t>(1 + rng() % 5);
    p.kind = rng() % 2 ? PacketKind::kEncoded : PacketKind::kPlain;
    p.parity_index = p.kind == PacketKind::kEncoded ? static_cast<std::uint8_t>(1 + rng() % 4) : 0;
    p.payload = random_symbol(rng, rng() % 80);
    p.payload_len = p.payload.empty() ? 0 : static_cast<std::uint32_t>(rng() % (p.payload.size() + 1));
    if (parse(seal(p)) != p) return "packet " + std::to_string(i) + " did not round-trip";
  }
  return {};
}

}  // namespace

bool VerifySummary::passed() const {
  return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

CheckResult check_mds(const FieldContext& field, const CoefficientMatrix& h,
                      const std::string& name) {
  return timed(name, [&]() -> std::string {
    const auto bad = find_singular_minor(field, h);
    if (!bad) return {};
    std::ostringstream os;
    os << "MDS property violated: columns {";
    for (std::size_t i = 0; i < bad->size(); ++i) os << (i ? "," : "") << (*bad)[i];
    os << "} are linearly dependent";
    return os.str();
  });
}

VerifySummary run_verification(const VerifyOptions& options) {
  const bool full = options.level == VerifyLevel::kExhaustive;
  const std::size_t k_max = full ? 8 : 5;
  const std::size_t t_max = full ? 3 : 2;
  const std::uint64_t seed = 0x5eed;
  VerifySummary s;

  s.checks.push_back(timed("GF(2^4) field axioms, exhaustive", [&] {
    return axioms(FieldContext(4, FieldContext::default_polynomial(4), 2), true, seed);
  }));
  s.checks.push_back(timed(full ? "GF(2^8) field axioms, exhaustive"
                                : "GF(2^8) field axioms, sampled",
                           [&] { return axioms(*FieldContext::gf256(), full, seed); }));

  const std::size_t mds_t = full ? 4 : 3;
  const std::size_t mds_n = full ? 12 : 8;
  s.checks.push_back(timed("MDS: Vandermonde t<=" + std::to_string(mds_t) +
                               ", n<=" + std::to_string(mds_n),
                           [&] { return mds_sweep(mds_t, mds_n, options.corrupt_vandermonde); }));

  s.checks.push_back(timed("capacity: measured equals formula, k<=" + std::to_string(k_max * 2),
                           [&] { return capacity_identities(k_max * 2); }));

  s.checks.push_back(timed("single failure: all t=1 families, k<=" + std::to_string(k_max),
                           [&]() -> std::string {
                             for (std::size_t k = 2; k <= k_max; ++k) {
                               for (const CodingPlan& plan : single_failure_plans(k)) {
                                 auto err = radius_within(plan, seed, nullptr);
                                 if (!err.empty()) return err;
                               }
                             }
                             return {};
                           }));

  s.checks.push_back(timed("two dedicated: all pairs, n<=" + std::to_string(full ? 10 : 6),
                           [&]() -> std::string {
                             for (std::size_t n = 3; n <= (full ? 10u : 6u); ++n) {
                               const CodingPlan plan = plan_two_dedicated(
                                   n, static_cast<PathIndex>(n - 2), static_cast<PathIndex>(n - 1));
                               auto err = radius_within(plan, seed, nullptr);
                               if (!err.empty()) return err;
                             }
                             return {};
                           }));

  s.checks.push_back(timed("NPS-T: radius exactly t, n<=" + std::to_string(k_max) +
                               ", t<=" + std::to_string(t_max),
                           [&]() -> std::string {
                             for (std::size_t n = 2; n <= k_max; ++n) {
                               for (std::size_t t = 1; t <= t_max && t < n; ++t) {
                                 const CodingPlan plan = plan_npst(n, t);
                                 auto err = radius_within(plan, seed, nullptr);
                                 if (err.empty()) err = radius_beyond(plan, seed);
                                 if (!err.empty()) return err;
                               }
                             }
                             return {};
                           }));

  if (full) {
    std::size_t recovered = 0;
    CheckResult r = timed("rotating k=5: single-erasure patterns", [&]() -> std::string {
      const CodingPlan plan = plan_rotating_single(5);
      auto rng = detail::make_engine(seed, {5});
      for (PathIndex p = 0; p < 5; ++p) {
        bool all = true;
        for (RoundIndex round = 0; round < plan.rounds_per_cycle(); ++round) {
          all = all && try_pattern(plan, round, {p}, rng) != RecoveryStatus::kUnrecoverable;
        }
        if (all) ++recovered;
      }
      return recovered == 5 ? "" : std::to_string(recovered) + "/5 patterns recovered";
    });
    r.name = "rotating k=5: " + std::to_string(recovered) + "/5 single-erasure patterns recovered";
    s.checks.push_back(r);
  }

  s.checks.push_back(timed("wire: seal/parse round-trip", [&] {
    return wire_round_trip(full ? 10000 : 500, seed);
  }));
  return s;
}

}  // namespace smate
