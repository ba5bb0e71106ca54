#include "smate/coding_plan.hpp"

#include <algorithm>
#include <array>
#include <numeric>
#include <sstream>
#include <tuple>
#include <utility>

#include "seeding.hpp"

namespace smate {
namespace {

constexpr std::array<std::pair<Scheme, std::string_view>, 5> kSchemeNames = {{
    {Scheme::kDedicatedSingle, "dedicated"},
    {Scheme::kRotatingSingle, "rotating"},
    {Scheme::kTwoDedicated, "two_dedicated"},
    {Scheme::kNpsT, "npst"},
    {Scheme::kQos, "qos"},
}};

std::string str(std::size_t v) { return std::to_string(v); }

void require_field(const PlanOptions& options) {
  if (!options.field) throw PlanError("plan options carry no field context");
}

// Coefficient rows for a column code with `budget` parity rows over `paths`
// path-indexed columns. A single parity row is the all-ones XOR row, which
// needs no distinct column nodes and therefore works over any field.
CoefficientMatrix coefficient_rows(const FieldContext& field, std::size_t budget,
                                   std::size_t paths) {
  if (budget == 0) return CoefficientMatrix(0, paths);
  if (budget == 1) {
    CoefficientMatrix ones(1, paths);
    for (std::size_t i = 0; i < paths; ++i) ones.at(0, i) = FieldElement(1);
    return ones;
  }
  if (paths > field.order() - 1) {
    throw PlanError("n=" + str(paths) + " exceeds the field bound q-1=" +
                    str(field.order() - 1) + " for t=" + str(budget));
  }
  return build_vandermonde(field, budget, paths);
}

}  // namespace

std::string_view to_string(Scheme scheme) {
  for (const auto& [s, name] : kSchemeNames) {
    if (s == scheme) return name;
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (const auto& [s, n] : kSchemeNames) {
    if (n == name) return s;
  }
  return std::nullopt;
}

CodingPlan CodingPlan::from_grid(Scheme scheme, std::shared_ptr<const FieldContext> field,
                                 std::size_t paths, std::size_t rounds,
                                 std::size_t budget, std::vector<Slot> grid,
                                 CoefficientMatrix coefficients,
                                 std::vector<QosDemand> demands,
                                 std::vector<PathIndex> dedicated_paths,
                                 std::uint64_t session_seed) {
  if (!field) throw PlanError("plan has no field context");
  if (paths == 0 || rounds == 0) throw PlanError("plan needs at least one path and round");
  if (paths > 0xFFFF) throw PlanError("at most 65535 paths are addressable");
  if (budget >= paths && budget != 0) {
    throw PlanError("protection budget t=" + str(budget) + " must be below path count " +
                    str(paths));
  }
  if (budget > 255) throw PlanError("protection budget exceeds 255 parity rows");
  if (grid.size() != paths * rounds) throw PlanError("grid size does not match paths x rounds");
  if (coefficients.rows() != budget || coefficients.cols() != paths) {
    throw PlanError("coefficient matrix must be t x paths");
  }
  for (std::size_t r = 0; r < rounds; ++r) {
    std::vector<bool> used(budget + 1, false);
    std::size_t parity = 0;
    for (std::size_t p = 0; p < paths; ++p) {
      const Slot& s = grid[p * rounds + r];
      if (!s.is_parity()) {
        if (s.parity_index != 0) throw PlanError("plain slot carries a parity index");
        continue;
      }
      if (s.parity_index < 1 || s.parity_index > budget || used[s.parity_index]) {
        throw PlanError("round " + str(r) + " has an invalid or repeated parity index");
      }
      used[s.parity_index] = true;
      ++parity;
    }
    if (parity != budget) {
      throw PlanError("round " + str(r) + " has " + str(parity) +
                      " parity cells, expected " + str(budget));
    }
  }

  CodingPlan plan;
  plan.scheme_ = scheme;
  plan.field_ = std::move(field);
  plan.paths_ = paths;
  plan.rounds_ = rounds;
  plan.budget_ = budget;
  plan.grid_ = std::move(grid);
  plan.coefficients_ = std::move(coefficients);
  plan.demands_ = std::move(demands);
  plan.dedicated_paths_ = std::move(dedicated_paths);
  plan.session_seed_ = session_seed;
  plan.plain_cells_ = (paths - budget) * rounds;
  return plan;
}

Slot CodingPlan::slot(PathIndex path, RoundIndex round) const {
  if (path >= paths_) throw PlanError("path " + str(path) + " out of range");
  return grid_[static_cast<std::size_t>(path) * rounds_ + round % rounds_];
}

std::vector<PathIndex> CodingPlan::plain_paths(RoundIndex round) const {
  std::vector<PathIndex> out;
  for (std::size_t p = 0; p < paths_; ++p) {
    if (!slot(static_cast<PathIndex>(p), round).is_parity()) {
      out.push_back(static_cast<PathIndex>(p));
    }
  }
  return out;
}

std::vector<PathIndex> CodingPlan::parity_paths(RoundIndex round) const {
  std::vector<PathIndex> out(budget_);
  for (std::size_t p = 0; p < paths_; ++p) {
    const Slot s = slot(static_cast<PathIndex>(p), round);
    if (s.is_parity()) out[s.parity_index - 1] = static_cast<PathIndex>(p);
  }
  return out;
}

FieldElement CodingPlan::coefficient(std::uint8_t parity_index, PathIndex path) const {
  if (parity_index < 1 || parity_index > budget_) {
    throw PlanError("parity index " + str(parity_index) + " out of range");
  }
  return coefficients_.at(parity_index - 1U, path);
}

std::size_t CodingPlan::session_offset(std::uint32_t session) const {
  if (session_seed_ == 0) return 0;
  if (scheme_ != Scheme::kDedicatedSingle && scheme_ != Scheme::kTwoDedicated) return 0;
  return detail::derive_seed(session_seed_, {session}) % paths_;
}

CodingPlan CodingPlan::for_session(std::uint32_t session) const {
  const std::size_t offset = session_offset(session);
  if (offset == 0) return *this;
  CodingPlan out = *this;
  for (std::size_t p = 0; p < paths_; ++p) {
    const std::size_t to = (p + offset) % paths_;
    for (std::size_t r = 0; r < rounds_; ++r) {
      out.grid_[to * rounds_ + r] = grid_[p * rounds_ + r];
    }
  }
  for (auto& d : out.dedicated_paths_) d = static_cast<PathIndex>((d + offset) % paths_);
  return out;
}

std::string CodingPlan::grid_string() const {
  std::ostringstream os;
  for (std::size_t p = 0; p < paths_; ++p) {
    for (std::size_t r = 0; r < rounds_; ++r) {
      const Slot& s = grid_[p * rounds_ + r];
      if (r != 0) os << ' ';
      if (s.is_parity()) {
        os << 'Y' << static_cast<int>(s.parity_index);
      } else {
        os << 'P';
      }
    }
    os << '\n';
  }
  return os.str();
}

bool operator==(const CodingPlan& a, const CodingPlan& b) {
  const auto field_key = [](const CodingPlan& p) {
    return std::tuple(p.field_->degree(), p.field_->polynomial(), p.field_->generator());
  };
  return a.scheme_ == b.scheme_ && field_key(a) == field_key(b) && a.paths_ == b.paths_ &&
         a.rounds_ == b.rounds_ && a.budget_ == b.budget_ && a.grid_ == b.grid_ &&
         a.coefficients_ == b.coefficients_ && a.demands_ == b.demands_ &&
         a.dedicated_paths_ == b.dedicated_paths_ && a.session_seed_ == b.session_seed_;
}

CodingPlan plan_dedicated_single(std::size_t k, std::size_t m,
                                 std::optional<PathIndex> parity_path,
                                 const PlanOptions& options) {
  require_field(options);
  if (k < 2) throw PlanError("dedicated plan needs k >= 2, got k=" + str(k));
  if (m < 1) throw PlanError("dedicated plan needs m >= 1 rounds");
  const PathIndex j = parity_path.value_or(static_cast<PathIndex>(k - 1));
  if (j >= k) throw PlanError("parity path " + str(j) + " out of range for k=" + str(k));

  std::vector<Slot> grid(k * m);
  for (std::size_t r = 0; r < m; ++r) grid[j * m + r] = Slot::parity(1);
  return CodingPlan::from_grid(Scheme::kDedicatedSingle, options.field, k, m, 1,
                               std::move(grid), coefficient_rows(*options.field, 1, k), {},
                               {j}, options.session_seed);
}

CodingPlan plan_rotating_single(std::size_t k, const PlanOptions& options) {
  require_field(options);
  if (k < 2) throw PlanError("rotating plan needs k >= 2, got k=" + str(k));
  std::vector<Slot> grid(k * k);
  for (std::size_t r = 0; r < k; ++r) grid[r * k + r] = Slot::parity(1);
  return CodingPlan::from_grid(Scheme::kRotatingSingle, options.field, k, k, 1,
                               std::move(grid), coefficient_rows(*options.field, 1, k), {},
                               {}, options.session_seed);
}

CodingPlan plan_two_dedicated(std::size_t n, PathIndex j, PathIndex k2,
                              const PlanOptions& options) {
  require_field(options);
  if (n < 3) throw PlanError("two-dedicated plan needs n >= 3, got n=" + str(n));
  if (j >= n || k2 >= n) throw PlanError("parity paths must be below n=" + str(n));
  if (j == k2) throw PlanError("parity paths must be distinct");

  // One round per cycle: the layout is identical in every round.
  std::vector<Slot> grid(n);
  grid[j] = Slot::parity(1);
  grid[k2] = Slot::parity(2);
  return CodingPlan::from_grid(Scheme::kTwoDedicated, options.field, n, 1, 2,
                               std::move(grid), coefficient_rows(*options.field, 2, n), {},
                               {j, k2}, options.session_seed);
}

CodingPlan plan_npst(std::size_t n, std::size_t t, const PlanOptions& options) {
  require_field(options);
  if (t < 1) throw PlanError("NPS-T needs t >= 1");
  if (t >= n) throw PlanError("NPS-T needs t < n (t=" + str(t) + ", n=" + str(n) + ")");
  const std::size_t m = (n + t - 1) / t;
  std::vector<Slot> grid(n * m);
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t l = 0; l < t; ++l) {
      const std::size_t p = (r * t + l) % n;
      grid[p * m + r] = Slot::parity(static_cast<std::uint8_t>(l + 1));
    }
  }
  return CodingPlan::from_grid(Scheme::kNpsT, options.field, n, m, t, std::move(grid),
                               coefficient_rows(*options.field, t, n), {}, {},
                               options.session_seed);
}

CodingPlan plan_qos(std::size_t k, std::size_t t, std::span<const QosDemand> demands,
                    const PlanOptions& options) {
  require_field(options);
  if (k < 2) throw PlanError("QoS plan needs k >= 2");
  if (t < 1 || t >= k) throw PlanError("QoS plan needs 1 <= t < k");
  if (demands.size() != k) {
    throw PlanError("QoS plan needs one demand per path (" + str(k) + "), got " +
                    str(demands.size()));
  }
  std::vector<QosDemand> by_path(k);
  std::vector<bool> seen(k, false);
  for (const QosDemand& d : demands) {
    if (d.path >= k || seen[d.path]) throw PlanError("QoS demands must cover each path once");
    seen[d.path] = true;
    by_path[d.path] = d;
  }
  const std::size_t m = by_path[0].data_slots + by_path[0].protection_slots;
  if (m < 1) throw PlanError("QoS demands describe an empty cycle");
  std::size_t total_parity = 0;
  for (const QosDemand& d : by_path) {
    if (d.data_slots + d.protection_slots != m) {
      throw PlanError("path " + str(d.path) + ": d_i + p_i must equal m=" + str(m));
    }
    total_parity += d.protection_slots;
  }
  if (total_parity != t * m) {
    throw PlanError("infeasible demands: sum of p_i is " + str(total_parity) +
                    ", expected t*m=" + str(t * m));
  }

  // Least-demanding paths (highest priority rank) first.
  std::vector<PathIndex> order(k);
  std::iota(order.begin(), order.end(), PathIndex{0});
  std::stable_sort(order.begin(), order.end(), [&](PathIndex a, PathIndex b) {
    return by_path[a].priority > by_path[b].priority;
  });

  std::vector<std::size_t> remaining(k);
  for (std::size_t p = 0; p < k; ++p) remaining[p] = by_path[p].protection_slots;

  std::vector<Slot> grid(k * m);
  std::vector<std::size_t> rank(k);
  for (std::size_t r = 0; r < m; ++r) {
    // Round-robin over the priority order, but paths with the most parity
    // still to place go first; that keeps every later round fillable.
    for (std::size_t i = 0; i < k; ++i) rank[order[(r * t + i) % k]] = i;
    std::vector<PathIndex> candidates;
    for (std::size_t p = 0; p < k; ++p) {
      if (remaining[p] > 0) candidates.push_back(static_cast<PathIndex>(p));
    }
    std::sort(candidates.begin(), candidates.end(), [&](PathIndex a, PathIndex b) {
      if (remaining[a] != remaining[b]) return remaining[a] > remaining[b];
      return rank[a] < rank[b];
    });
    std::vector<bool> chosen(k, false);
    for (std::size_t i = 0; i < t; ++i) chosen[candidates[i]] = true;
    std::uint8_t index = 0;
    for (std::size_t p = 0; p < k; ++p) {
      if (!chosen[p]) continue;
      --remaining[p];
      grid[p * m + r] = Slot::parity(++index);
    }
  }

  return CodingPlan::from_grid(Scheme::kQos, options.field, k, m, t, std::move(grid),
                               coefficient_rows(*options.field, t, k),
                               std::move(by_path), {}, options.session_seed);
}

Rational normalized_capacity(const CodingPlan& plan) {
  const auto k = static_cast<std::int64_t>(plan.paths());
  const auto t = static_cast<std::int64_t>(plan.protection_budget());
  return Rational(k - t, k);
}

}  // namespace smate
