#include "smate/scenario.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include "seeding.hpp"

namespace smate {
namespace {

using boost::property_tree::ptree;

const std::set<std::string, std::less<>> kScenarioKeys = {
    "scheme",          "paths",          "budget",         "rounds",
    "parity_paths",    "qos_protection", "qos_priority",   "session_seed",
    "field_degree",    "field_polynomial", "field_generator", "payload_size",
    "payload_seed",    "failure",        "failure_paths",  "failure_budget",
    "failure_probability", "failure_seed", "chunk_size",   "repetitions",
    "encrypt",
};

std::string trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t at = s.find(sep, start);
    out.push_back(trim(s.substr(start, at == std::string_view::npos ? at : at - start)));
    if (at == std::string_view::npos) break;
    start = at + 1;
  }
  return out;
}

// Typed access to one section, with errors that name section and key.
class Section {
 public:
  Section(std::string source, std::string name, const ptree& tree)
      : source_(std::move(source)), name_(std::move(name)), tree_(tree) {}

  [[noreturn]] void fail(std::string_view key, const std::string& what) const {
    throw ConfigError(source_ + ": [" + name_ + "] key '" + std::string(key) + "': " + what);
  }

  std::optional<std::string> raw(std::string_view key) const {
    auto it = tree_.find(std::string(key));
    if (it == tree_.not_found()) return std::nullopt;
    return trim(it->second.data());
  }

  std::string require(std::string_view key) const {
    auto v = raw(key);
    if (!v) fail(key, "required key is missing");
    return *v;
  }

  std::uint64_t to_unsigned(std::string_view key, const std::string& text) const {
    std::string_view digits = text;
    int base = 10;
    if (digits.size() > 2 && digits[0] == '0' && (digits[1] == 'x' || digits[1] == 'X')) {
      digits.remove_prefix(2);
      base = 16;
    }
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value, base);
    if (digits.empty() || ec != std::errc() || ptr != digits.data() + digits.size()) {
      fail(key, "expected a non-negative integer, got '" + text + "'");
    }
    return value;
  }

  std::uint64_t get_unsigned(std::string_view key, std::uint64_t fallback,
                             std::uint64_t min = 0,
                             std::uint64_t max = UINT64_MAX) const {
    auto v = raw(key);
    if (!v) return fallback;
    const std::uint64_t value = to_unsigned(key, *v);
    if (value < min || value > max) {
      fail(key, "must be in [" + std::to_string(min) + ", " + std::to_string(max) +
                    "], got " + std::to_string(value));
    }
    return value;
  }

  std::vector<std::uint64_t> get_list(std::string_view key) const {
    std::vector<std::uint64_t> out;
    auto v = raw(key);
    if (!v || v->empty()) return out;
    for (const std::string& item : split(*v, ',')) out.push_back(to_unsigned(key, item));
    return out;
  }

  // "3", "1,2,4" or an inclusive range "2..10".
  std::vector<std::size_t> get_values(std::string_view key) const {
    const std::string text = require(key);
    std::vector<std::size_t> out;
    for (const std::string& item : split(text, ',')) {
      if (const auto dots = item.find(".."); dots != std::string::npos) {
        const auto lo = to_unsigned(key, trim(item.substr(0, dots)));
        const auto hi = to_unsigned(key, trim(item.substr(dots + 2)));
        if (lo > hi) fail(key, "range '" + item + "' is empty");
        if (hi - lo > 100000) fail(key, "range '" + item + "' is too large");
        for (auto v = lo; v <= hi; ++v) out.push_back(static_cast<std::size_t>(v));
      } else {
        out.push_back(static_cast<std::size_t>(to_unsigned(key, item)));
      }
    }
    return out;
  }

  std::vector<std::int32_t> get_int_list(std::string_view key) const {
    std::vector<std::int32_t> out;
    auto v = raw(key);
    if (!v || v->empty()) return out;
    for (const std::string& item : split(*v, ',')) {
      std::int32_t value = 0;
      auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), value);
      if (item.empty() || ec != std::errc() || ptr != item.data() + item.size()) {
        fail(key, "expected an integer list, got '" + *v + "'");
      }
      out.push_back(value);
    }
    return out;
  }

  std::vector<double> get_double_list(std::string_view key) const {
    std::vector<double> out;
    auto v = raw(key);
    if (!v || v->empty()) return out;
    for (const std::string& item : split(*v, ',')) {
      std::istringstream is(item);
      is.imbue(std::locale::classic());
      double value = 0;
      if (!(is >> value) || !is.eof()) fail(key, "expected a number list, got '" + *v + "'");
      out.push_back(value);
    }
    return out;
  }

  bool get_bool(std::string_view key, bool fallback) const {
    auto v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "yes" || *v == "1") return true;
    if (*v == "false" || *v == "no" || *v == "0") return false;
    fail(key, "expected true or false, got '" + *v + "'");
  }

  void reject_unknown_keys(const std::set<std::string, std::less<>>& allowed) const {
    for (const auto& [key, child] : tree_) {
      if (!allowed.contains(key)) fail(key, "unknown key");
      if (!child.empty()) fail(key, "nested keys are not supported");
    }
  }

 private:
  std::string source_;
  std::string name_;
  const ptree& tree_;
};

std::vector<PathIndex> to_paths(const Section& s, std::string_view key,
                                const std::vector<std::uint64_t>& values) {
  std::vector<PathIndex> out;
  for (auto v : values) {
    if (v > 0xFFFF) s.fail(key, "path index " + std::to_string(v) + " exceeds 65535");
    out.push_back(static_cast<PathIndex>(v));
  }
  return out;
}

Scenario parse_scenario(const Section& s, std::string name, bool sweep) {
  Scenario sc;
  sc.name = std::move(name);
  const std::string scheme = s.require("scheme");
  const auto parsed = parse_scheme(scheme);
  if (!parsed) {
    s.fail("scheme", "expected dedicated, rotating, two_dedicated, npst or qos, got '" +
                         scheme + "'");
  }
  sc.scheme = *parsed;
  if (!sweep) sc.paths = s.get_unsigned("paths", 0, 2, 0xFFFF);
  if (!s.raw("paths")) s.fail("paths", "required key is missing");

  const std::size_t default_budget = sc.scheme == Scheme::kTwoDedicated ? 2 : 1;
  sc.budget = sweep ? default_budget : s.get_unsigned("budget", default_budget, 1, 255);
  if ((sc.scheme == Scheme::kDedicatedSingle || sc.scheme == Scheme::kRotatingSingle) &&
      sc.budget != 1) {
    s.fail("budget", "single-failure schemes have budget 1");
  }
  if (sc.scheme == Scheme::kTwoDedicated && sc.budget != 2) {
    s.fail("budget", "two_dedicated has budget 2");
  }
  sc.rounds = s.get_unsigned("rounds", 1, 1, 1U << 20);
  sc.parity_paths = to_paths(s, "parity_paths", s.get_list("parity_paths"));
  for (auto v : s.get_list("qos_protection")) {
    if (v > UINT32_MAX) s.fail("qos_protection", "value too large");
    sc.qos_protection.push_back(static_cast<std::uint32_t>(v));
  }
  sc.qos_priority = s.get_int_list("qos_priority");
  if (sc.scheme == Scheme::kQos && sc.qos_protection.empty()) {
    s.fail("qos_protection", "required for scheme qos");
  }
  if (!sc.qos_priority.empty() && sc.qos_priority.size() != sc.qos_protection.size()) {
    s.fail("qos_priority", "needs one entry per qos_protection entry");
  }
  sc.session_seed = s.get_unsigned("session_seed", 0);

  sc.field.degree = static_cast<unsigned>(s.get_unsigned("field_degree", 8, 1, 16));
  sc.field.polynomial = static_cast<std::uint32_t>(s.get_unsigned(
      "field_polynomial", FieldContext::default_polynomial(sc.field.degree), 1, 0x1FFFF));
  sc.field.generator = static_cast<std::uint32_t>(s.get_unsigned(
      "field_generator", FieldContext::default_generator(sc.field.degree), 1, 0xFFFF));

  sc.payload_size = s.get_unsigned("payload_size", sc.payload_size, 0, 1U << 30);
  sc.payload_seed = s.get_unsigned("payload_seed", sc.payload_seed);
  sc.chunk_size = s.get_unsigned("chunk_size", sc.chunk_size, 1, 1U << 24);
  sc.repetitions = s.get_unsigned("repetitions", 1, 1, 100000);
  sc.encrypt = s.get_bool("encrypt", false);

  const std::string failure = s.raw("failure").value_or("none");
  const std::uint64_t failure_seed = s.get_unsigned("failure_seed", 0);
  if (failure == "none") {
    sc.failure = FailureModel::none();
  } else if (failure == "single_random") {
    sc.failure = FailureModel::single_random(failure_seed);
  } else if (failure == "fixed") {
    if (!s.raw("failure_paths")) s.fail("failure_paths", "required for failure = fixed");
    sc.failure = FailureModel::fixed(to_paths(s, "failure_paths", s.get_list("failure_paths")));
  } else if (failure == "adversarial") {
    sc.failure = FailureModel::adversarial(
        s.get_unsigned("failure_budget", 0, 0, 0xFFFF), failure_seed);
    if (!s.raw("failure_budget")) s.fail("failure_budget", "required for failure = adversarial");
  } else if (failure == "bernoulli") {
    auto probs = s.get_double_list("failure_probability");
    if (probs.empty()) s.fail("failure_probability", "required for failure = bernoulli");
    for (double p : probs) {
      if (!(p >= 0.0 && p <= 1.0)) s.fail("failure_probability", "values must lie in [0, 1]");
    }
    sc.failure = FailureModel::bernoulli(std::move(probs), failure_seed);
  } else {
    s.fail("failure",
           "expected none, single_random, fixed, adversarial or bernoulli, got '" + failure + "'");
  }
  return sc;
}

}  // namespace

ScenarioFile parse_scenarios(std::istream& in, const std::string& source) {
  ptree root;
  try {
    boost::property_tree::ini_parser::read_ini(in, root);
  } catch (const boost::property_tree::ini_parser_error& e) {
    throw ConfigError(source + ":" + std::to_string(e.line()) + ": " + e.message());
  }

  ScenarioFile file;
  bool have_version = false;
  std::set<std::string> names;
  for (const auto& [key, child] : root) {
    if (key == "schema_version") {
      const std::string v = trim(child.data());
      if (v != std::to_string(kScenarioSchemaVersion)) {
        throw ConfigError(source + ": top-level key 'schema_version': expected " +
                          std::to_string(kScenarioSchemaVersion) + ", got '" + v + "'");
      }
      have_version = true;
      continue;
    }
    if (child.empty() && !child.data().empty()) {
      throw ConfigError(source + ": top-level key '" + key + "': unknown key");
    }
    const auto dot = key.find('.');
    const std::string kind = key.substr(0, dot);
    const std::string name = dot == std::string::npos ? "" : key.substr(dot + 1);
    if ((kind != "scenario" && kind != "sweep") || name.empty()) {
      throw ConfigError(source + ": section [" + key +
                        "]: expected [scenario.<name>] or [sweep.<name>]");
    }
    if (!names.insert(name).second) {
      throw ConfigError(source + ": section [" + key + "]: duplicate name '" + name + "'");
    }
    const Section section(source, key, child);
    section.reject_unknown_keys(kScenarioKeys);
    if (kind == "scenario") {
      file.scenarios.push_back(parse_scenario(section, name, false));
    } else {
      SweepSpec sweep;
      sweep.base = parse_scenario(section, name, true);
      sweep.paths_values = section.get_values("paths");
      const std::size_t default_budget = sweep.base.scheme == Scheme::kTwoDedicated ? 2 : 1;
      sweep.budget_values = section.raw("budget") ? section.get_values("budget")
                                                  : std::vector<std::size_t>{default_budget};
      file.sweeps.push_back(std::move(sweep));
    }
  }
  if (!have_version) {
    throw ConfigError(source + ": top-level key 'schema_version': required key is missing");
  }
  return file;
}

ScenarioFile load_scenarios(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open file");
  return parse_scenarios(in, path.string());
}

CodingPlan build_plan(const Scenario& sc) {
  PlanOptions options;
  const FieldConfig defaults;
  if (!(sc.field == defaults)) {
    options.field =
        std::make_shared<const FieldContext>(sc.field.degree, sc.field.polynomial, sc.field.generator);
  }
  options.session_seed = sc.session_seed;

  switch (sc.scheme) {
    case Scheme::kDedicatedSingle: {
      if (sc.parity_paths.size() > 1) throw PlanError("parity_paths: dedicated takes one path");
      std::optional<PathIndex> j;
      if (!sc.parity_paths.empty()) j = sc.parity_paths[0];
      return plan_dedicated_single(sc.paths, sc.rounds, j, options);
    }
    case Scheme::kRotatingSingle:
      return plan_rotating_single(sc.paths, options);
    case Scheme::kTwoDedicated: {
      if (sc.paths < 3) throw PlanError("two_dedicated needs paths >= 3");
      std::vector<PathIndex> pp = sc.parity_paths;
      if (pp.empty()) {
        pp = {static_cast<PathIndex>(sc.paths - 2), static_cast<PathIndex>(sc.paths - 1)};
      }
      if (pp.size() != 2) throw PlanError("parity_paths: two_dedicated takes two paths");
      return plan_two_dedicated(sc.paths, pp[0], pp[1], options);
    }
    case Scheme::kNpsT:
      return plan_npst(sc.paths, sc.budget, options);
    case Scheme::kQos: {
      if (sc.qos_protection.size() != sc.paths) {
        throw PlanError("qos_protection needs one entry per path");
      }
      if (sc.budget == 0) throw PlanError("qos needs budget >= 1");
      std::uint64_t total = 0;
      for (auto p : sc.qos_protection) total += p;
      if (total == 0 || total % sc.budget != 0) {
        throw PlanError("infeasible demands: sum of qos_protection (" + std::to_string(total) +
                        ") is not a positive multiple of budget");
      }
      const std::uint64_t m = total / sc.budget;
      std::vector<QosDemand> demands;
      for (std::size_t i = 0; i < sc.paths; ++i) {
        if (sc.qos_protection[i] > m) {
          throw PlanError("infeasible demands: path " + std::to_string(i) + " needs " +
                          std::to_string(sc.qos_protection[i]) + " parity slots in a cycle of " +
                          std::to_string(m));
        }
        QosDemand d;
        d.path = static_cast<PathIndex>(i);
        d.protection_slots = sc.qos_protection[i];
        d.data_slots = static_cast<std::uint32_t>(m - sc.qos_protection[i]);
        d.priority = sc.qos_priority.empty() ? 0 : sc.qos_priority[i];
        demands.push_back(d);
      }
      return plan_qos(sc.paths, sc.budget, demands, options);
    }
  }
  throw PlanError("unknown scheme");
}

std::vector<std::uint8_t> make_payload(std::size_t size, std::uint64_t seed) {
  auto engine = detail::make_engine(seed, {size});
  std::vector<std::uint8_t> out(size);
  std::uint64_t word = 0;
  for (std::size_t i = 0; i < size; ++i) {
    if (i % 8 == 0) word = engine();
    out[i] = static_cast<std::uint8_t>(word >> (8 * (i % 8)));
  }
  return out;
}

std::string plan_to_config(const CodingPlan& plan, const std::string& name) {
  std::ostringstream os;
  const auto join = [](const auto& values) {
    std::string out;
    for (const auto& v : values) {
      if (!out.empty()) out += ',';
      out += std::to_string(v);
    }
    return out;
  };
  os << "[scenario." << name << "]\n";
  os << "scheme = " << to_string(plan.scheme()) << '\n';
  os << "paths = " << plan.paths() << '\n';
  os << "budget = " << plan.protection_budget() << '\n';
  if (plan.scheme() == Scheme::kDedicatedSingle) {
    os << "rounds = " << plan.rounds_per_cycle() << '\n';
  }
  if (plan.scheme() == Scheme::kDedicatedSingle || plan.scheme() == Scheme::kTwoDedicated) {
    os << "parity_paths = " << join(plan.dedicated_paths()) << '\n';
  }
  if (plan.scheme() == Scheme::kQos) {
    std::vector<std::uint32_t> protection;
    std::vector<std::int32_t> priority;
    for (const QosDemand& d : plan.demands()) {
      protection.push_back(d.protection_slots);
      priority.push_back(d.priority);
    }
    os << "qos_protection = " << join(protection) << '\n';
    os << "qos_priority = " << join(priority) << '\n';
  }
  os << "session_seed = " << plan.session_seed() << '\n';
  os << "field_degree = " << plan.field().degree() << '\n';
  os << std::hex << std::uppercase;
  os << "field_polynomial = 0x" << plan.field().polynomial() << '\n';
  os << "field_generator = 0x" << plan.field().generator().value << '\n';
  return os.str();
}

}  // namespace smate
