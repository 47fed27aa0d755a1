#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>
#include <string>

#include "spinmem/errors.hpp"
#include "spinmem/experiments/emit.hpp"
#include "spinmem/experiments/scenario.hpp"
#include "spinmem/qubit_register.hpp"

namespace spinmem {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(std::string_view field, const std::string& msg) {
  throw ValidationError("field '" + std::string(field) + "': " + msg);
}

constexpr std::pair<ScenarioKind, std::string_view> kKindNames[] = {
    {ScenarioKind::EncodeDecode, "encode-decode"},
    {ScenarioKind::DephasingCurve, "dephasing"},
    {ScenarioKind::Distribution, "distribution"},
    {ScenarioKind::ChiSweep, "chi-sweep"},
    {ScenarioKind::ThetaVariation, "theta-variation"},
    {ScenarioKind::Moments, "moments"},
};

constexpr std::pair<ThetaMode, std::string_view> kModeNames[] = {
    {ThetaMode::Fixed, "fixed"},
    {ThetaMode::PerSiteBand, "per-site-band"},
    {ThetaMode::PerRoundBand, "per-round-band"},
};

const std::set<std::string, std::less<>> kFixedInputs = {
    "up", "down", "plus", "bell-phi-minus", "bell-psi-minus"};

bool parse_number(std::string_view text, double& out) {
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<double> linspace(double lo, double hi, int points) {
  std::vector<double> v(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i) {
    v[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / (points - 1);
  }
  return v;
}

bool uses_inputs(ScenarioKind k) {
  return k == ScenarioKind::EncodeDecode || k == ScenarioKind::DephasingCurve ||
         k == ScenarioKind::ChiSweep || k == ScenarioKind::ThetaVariation;
}

bool storage_kind(ScenarioKind k) {
  return k == ScenarioKind::DephasingCurve || k == ScenarioKind::ChiSweep;
}

int input_qubits(const std::vector<InputSpec>& inputs) {
  int n = 0;
  for (const auto& in : inputs) n += in.qubits();
  return n;
}

}  // namespace

std::string_view to_string(ScenarioKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  return "?";
}

ScenarioKind parse_scenario_kind(std::string_view text) {
  for (const auto& [k, name] : kKindNames) {
    if (name == text) return k;
  }
  throw ValidationError("unknown scenario kind '" + std::string(text) + "'");
}

std::string_view to_string(ThetaMode mode) {
  for (const auto& [m, name] : kModeNames) {
    if (m == mode) return name;
  }
  return "?";
}

ThetaMode parse_theta_mode(std::string_view text) {
  for (const auto& [m, name] : kModeNames) {
    if (name == text) return m;
  }
  throw ValidationError("unknown theta mode '" + std::string(text) +
                        "' (expected fixed, per-site-band or per-round-band)");
}

double parse_angle(std::string_view text) {
  double value = 0.0;
  if (parse_number(text, value)) return value;
  if (text == "pi") return std::numbers::pi;
  if (text.starts_with("pi/") && parse_number(text.substr(3), value) &&
      value != 0.0) {
    // Keep pi/2 bit-identical to std::numbers::pi / 2.
    return std::numbers::pi / value;
  }
  throw ValidationError("cannot read angle '" + std::string(text) +
                        "' (use a number, pi or pi/<number>)");
}

int InputSpec::qubits() const {
  if (name == "random") return count;
  if (name.starts_with("bell-")) return 2;
  return 1;
}

std::string InputSpec::to_string() const {
  return random() ? "random(" + std::to_string(count) + ")" : name;
}

InputSpec parse_input_spec(std::string_view text) {
  if (kFixedInputs.contains(text)) return {std::string(text), 1};
  if (text.starts_with("random(") && text.ends_with(")")) {
    const auto inner = text.substr(7, text.size() - 8);
    int count = 0;
    auto [ptr, ec] = std::from_chars(inner.data(), inner.data() + inner.size(), count);
    if (ec == std::errc() && ptr == inner.data() + inner.size() && count >= 1) {
      return {"random", count};
    }
  }
  if (text == "random") return {"random", 1};
  throw ValidationError(
      "unknown input '" + std::string(text) +
      "' (expected up, down, plus, bell-phi-minus, bell-psi-minus, random(<count>))");
}

ScenarioConfig resolve(ScenarioConfig c) {
  const auto kind_name = std::string(to_string(c.kind));
  const bool storage = storage_kind(c.kind);

  if (!c.convention) {
    c.convention = storage ? EpsilonConvention::AmplitudeCosN
                           : EpsilonConvention::ProbabilityCos2N;
  }
  if (!c.epsilon) c.epsilon = storage ? 1e-2 : 1e-4;
  if (!(*c.epsilon > 0.0 && *c.epsilon < 1.0)) {
    field_error("epsilon", "must lie in (0, 1)");
  }
  if (c.repeats < 1) field_error("repeats", "must be >= 1");

  if (!uses_inputs(c.kind) && !c.inputs.empty()) {
    field_error("inputs", "not used by " + kind_name);
  }
  if (uses_inputs(c.kind) && c.inputs.empty()) {
    c.inputs = {c.kind == ScenarioKind::ThetaVariation ? InputSpec{"random", 4}
                                                       : InputSpec{"plus", 1}};
  }
  for (const auto& in : c.inputs) {
    if (in.count < 1) field_error("inputs", "random count must be >= 1");
  }
  const int n_inputs = input_qubits(c.inputs);
  if (storage && n_inputs != 1) {
    field_error("inputs", kind_name + " stores exactly one qubit");
  }
  if (c.kind == ScenarioKind::ThetaVariation) {
    for (const auto& in : c.inputs) {
      if (in.qubits() > 1 && !in.random()) {
        field_error("inputs", "theta-variation needs product inputs");
      }
    }
  }

  if (c.theta) {
    const auto& t = *c.theta;
    if (!(t.center > 0.0 && t.center <= std::numbers::pi / 2)) {
      field_error("theta", "center must lie in (0, pi/2]");
    }
    if (!(t.width >= 0.0 && t.width < 1.0)) {
      field_error("theta", "band width must lie in [0, 1)");
    }
    if (t.mode != ThetaMode::Fixed && c.kind != ScenarioKind::EncodeDecode &&
        c.kind != ScenarioKind::ThetaVariation) {
      field_error("theta", "angle bands are only used by encode-decode and "
                           "theta-variation");
    }
    if (t.mode == ThetaMode::Fixed && t.width != 0.0) {
      field_error("theta", "a fixed angle takes no band width");
    }
  } else if (!storage) {
    field_error("theta", "required for " + kind_name);
  }

  auto check_unused = [&](bool unused, std::string_view field) {
    if (unused) field_error(field, "not used by " + kind_name);
  };
  check_unused(c.kind != ScenarioKind::DephasingCurve && !c.tau_grid.empty(),
               "tau_grid");
  check_unused(c.kind != ScenarioKind::ChiSweep && !c.chi_grid.empty(),
               "chi_grid");
  check_unused(c.kind != ScenarioKind::ChiSweep && !c.n_grid.empty(), "n_grid");
  check_unused(c.kind != ScenarioKind::Distribution &&
                   c.kind != ScenarioKind::Moments && !c.l_grid.empty(),
               "l_grid");
  check_unused(c.kind != ScenarioKind::DephasingCurve && c.dephasing.has_value(),
               "dephasing");
  check_unused(c.kind != ScenarioKind::DephasingCurve &&
                   c.storage_sites.has_value(),
               "storage_sites");
  check_unused(c.kind == ScenarioKind::Moments && c.n.has_value(), "n");

  if (c.n && *c.n < 1) field_error("n", "chain length must be >= 1");

  switch (c.kind) {
    case ScenarioKind::EncodeDecode:
    case ScenarioKind::ThetaVariation: {
      if (!c.n) c.n = min_chain_length(c.theta->center, *c.epsilon, *c.convention);
      const auto dense = static_cast<std::size_t>(*c.n + 2 * n_inputs);
      if (n_inputs > 1 && dense > QubitRegister::kDenseCap) {
        field_error("n", "N + 2 x inputs = " + std::to_string(dense) +
                             " exceeds the dense register cap of " +
                             std::to_string(QubitRegister::kDenseCap));
      }
      break;
    }
    case ScenarioKind::DephasingCurve: {
      if (!c.n) field_error("n", "required for dephasing");
      if (c.storage_sites && (*c.storage_sites < 1 || *c.storage_sites > *c.n)) {
        field_error("storage_sites", "must lie in 1..N");
      }
      if (!c.theta) {
        c.theta = ThetaSpec{ThetaMode::Fixed,
                            storage_angle(c.storage_sites.value_or(*c.n),
                                          *c.epsilon, *c.convention),
                            0.0};
      }
      if (!c.dephasing) c.dephasing = DephasingSpec{};
      const auto& d = *c.dephasing;
      if (!(d.gamma >= 0.0) || !std::isfinite(d.gamma)) {
        field_error("dephasing", "gamma must be finite and >= 0");
      }
      if (d.profile == ProfileKind::SingleSite && (d.site < 1 || d.site > *c.n)) {
        field_error("dephasing", "site must lie in 1..N");
      }
      if (c.tau_grid.empty()) c.tau_grid = linspace(0.0, 1e-5, 51);
      for (double tau : c.tau_grid) {
        if (!(tau >= 0.0) || !std::isfinite(tau)) {
          field_error("tau_grid", "storage times must be finite and >= 0");
        }
      }
      break;
    }
    case ScenarioKind::Distribution:
      if (!c.n) field_error("n", "required for distribution");
      if (c.model != ExchangeModel::XY) {
        field_error("model", "distribution compares against the XY closed form");
      }
      if (c.l_grid.empty()) c.l_grid = {0, 1, 2};
      for (int l : c.l_grid) {
        if (l < 0) field_error("l_grid", "levels must be >= 0");
        if (static_cast<std::size_t>(*c.n + l + 1) > QubitRegister::kRestrictedCap) {
          field_error("l_grid", "level too large for the register cap");
        }
      }
      break;
    case ScenarioKind::ChiSweep:
      if (c.n_grid.empty()) {
        c.n_grid = c.n ? std::vector<int>{*c.n} : std::vector<int>{10, 20, 50, 100};
      } else if (c.n && c.n_grid != std::vector<int>{*c.n}) {
        field_error("n", "give either n or n_grid for chi-sweep");
      }
      c.n.reset();
      for (int n : c.n_grid) {
        if (n < 1) field_error("n_grid", "chain lengths must be >= 1");
      }
      if (c.chi_grid.empty()) {
        for (int i = -10; i <= 10; ++i) c.chi_grid.push_back(i / 100.0);
      }
      for (double chi : c.chi_grid) {
        if (!(chi > -1.0) || !std::isfinite(chi)) {
          field_error("chi_grid", "fractional mismatch must be finite and > -1");
        }
      }
      break;
    case ScenarioKind::Moments:
      if (c.l_grid.empty()) {
        for (int l = 0; l <= 10; ++l) c.l_grid.push_back(l);
      }
      for (int l : c.l_grid) {
        if (l < 0) field_error("l_grid", "levels must be >= 0");
      }
      if (c.theta->center >= std::numbers::pi / 2) {
        field_error("theta", "moments need theta < pi/2");
      }
      break;
  }
  return c;
}

json to_json(const ScenarioConfig& c) {
  json j;
  j["kind"] = std::string(to_string(c.kind));
  if (c.n) j["n"] = *c.n;
  if (c.theta) {
    j["theta"] = {{"mode", std::string(to_string(c.theta->mode))},
                  {"center", c.theta->center},
                  {"width", c.theta->width}};
  }
  j["model"] = std::string(to_string(c.model));
  if (!c.inputs.empty()) {
    auto& arr = j["inputs"] = json::array();
    for (const auto& in : c.inputs) arr.push_back(in.to_string());
  }
  j["seed"] = c.seed;
  if (!c.tau_grid.empty()) j["tau_grid"] = c.tau_grid;
  if (!c.chi_grid.empty()) j["chi_grid"] = c.chi_grid;
  if (!c.l_grid.empty()) j["l_grid"] = c.l_grid;
  if (!c.n_grid.empty()) j["n_grid"] = c.n_grid;
  j["repeats"] = c.repeats;
  if (c.epsilon) j["epsilon"] = *c.epsilon;
  if (c.convention) j["convention"] = std::string(to_string(*c.convention));
  if (c.storage_sites) j["storage_sites"] = *c.storage_sites;
  if (c.dephasing) {
    j["dephasing"] = {
        {"profile", c.dephasing->profile == ProfileKind::Homogeneous
                        ? "homogeneous"
                        : "single-site"},
        {"gamma", c.dephasing->gamma},
        {"site", c.dephasing->site}};
  }
  return j;
}

namespace {

template <class T>
T read_number(const json& v, std::string_view field) {
  if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) field_error(field, "expected an integer");
    if constexpr (std::is_unsigned_v<T>) {
      if (v.is_number_unsigned()) return v.get<T>();
      if (v.get<std::int64_t>() < 0) field_error(field, "expected an integer >= 0");
    }
    return v.get<T>();
  } else {
    if (!v.is_number()) field_error(field, "expected a number");
    return v.get<T>();
  }
}

double read_angle(const json& v, std::string_view field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) {
    try {
      return parse_angle(v.get<std::string>());
    } catch (const ValidationError& e) {
      field_error(field, e.what());
    }
  }
  field_error(field, "expected a number or an angle string");
}

std::string read_string(const json& v, std::string_view field) {
  if (!v.is_string()) field_error(field, "expected a string");
  return v.get<std::string>();
}

template <class T>
std::vector<T> read_list(const json& v, std::string_view field) {
  if (!v.is_array()) field_error(field, "expected a list");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(read_number<T>(e, field));
  return out;
}

template <class F>
auto with_field(std::string_view field, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    if (msg.starts_with("field '")) throw;
    field_error(field, msg);
  }
}

void reject_unknown(const json& obj, std::string_view where,
                    std::initializer_list<std::string_view> known) {
  for (const auto& [key, value] : obj.items()) {
    if (std::find(known.begin(), known.end(), key) == known.end()) {
      field_error(key, "unknown field" +
                           (where.empty() ? std::string() : " in " + std::string(where)));
    }
  }
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config must be a JSON object");
  reject_unknown(j, "",
                 {"kind", "n", "theta", "model", "inputs", "seed", "tau_grid",
                  "chi_grid", "l_grid", "n_grid", "repeats", "epsilon",
                  "convention", "storage_sites", "dephasing"});
  ScenarioConfig c;
  if (!j.contains("kind")) field_error("kind", "missing");
  c.kind = with_field("kind", [&] {
    return parse_scenario_kind(read_string(j.at("kind"), "kind"));
  });
  if (j.contains("n")) c.n = read_number<int>(j.at("n"), "n");
  if (j.contains("theta")) {
    const auto& t = j.at("theta");
    ThetaSpec spec;
    if (t.is_object()) {
      reject_unknown(t, "theta", {"mode", "center", "width"});
      if (t.contains("mode")) {
        spec.mode = with_field("mode", [&] {
          return parse_theta_mode(read_string(t.at("mode"), "mode"));
        });
      }
      if (!t.contains("center")) field_error("theta", "missing center");
      spec.center = read_angle(t.at("center"), "center");
      if (t.contains("width")) spec.width = read_number<double>(t.at("width"), "width");
    } else {
      spec.center = read_angle(t, "theta");
    }
    c.theta = spec;
  }
  if (j.contains("model")) {
    c.model = with_field("model", [&] {
      return parse_exchange_model(read_string(j.at("model"), "model"));
    });
  }
  if (j.contains("inputs")) {
    const auto& in = j.at("inputs");
    auto parse_one = [&](const json& v) {
      return with_field("inputs", [&] {
        return parse_input_spec(read_string(v, "inputs"));
      });
    };
    if (in.is_array()) {
      for (const auto& v : in) c.inputs.push_back(parse_one(v));
    } else {
      c.inputs.push_back(parse_one(in));
    }
  }
  if (j.contains("seed")) c.seed = read_number<std::uint64_t>(j.at("seed"), "seed");
  if (j.contains("tau_grid")) c.tau_grid = read_list<double>(j.at("tau_grid"), "tau_grid");
  if (j.contains("chi_grid")) c.chi_grid = read_list<double>(j.at("chi_grid"), "chi_grid");
  if (j.contains("l_grid")) c.l_grid = read_list<int>(j.at("l_grid"), "l_grid");
  if (j.contains("n_grid")) c.n_grid = read_list<int>(j.at("n_grid"), "n_grid");
  if (j.contains("repeats")) c.repeats = read_number<int>(j.at("repeats"), "repeats");
  if (j.contains("epsilon")) c.epsilon = read_number<double>(j.at("epsilon"), "epsilon");
  if (j.contains("convention")) {
    c.convention = with_field("convention", [&] {
      return parse_epsilon_convention(read_string(j.at("convention"), "convention"));
    });
  }
  if (j.contains("storage_sites")) {
    c.storage_sites = read_number<int>(j.at("storage_sites"), "storage_sites");
  }
  if (j.contains("dephasing")) {
    const auto& d = j.at("dephasing");
    if (!d.is_object()) field_error("dephasing", "expected an object");
    reject_unknown(d, "dephasing", {"profile", "gamma", "site"});
    DephasingSpec spec;
    if (d.contains("profile")) {
      const auto p = read_string(d.at("profile"), "profile");
      if (p == "homogeneous") {
        spec.profile = ProfileKind::Homogeneous;
      } else if (p == "single-site") {
        spec.profile = ProfileKind::SingleSite;
      } else {
        field_error("profile", "expected homogeneous or single-site");
      }
    }
    if (d.contains("gamma")) spec.gamma = read_number<double>(d.at("gamma"), "gamma");
    if (d.contains("site")) spec.site = read_number<int>(d.at("site"), "site");
    c.dephasing = spec;
  }
  return c;
}

namespace {

int line_of_offset(std::string_view text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(offset), '\n'));
}

// Line holding the first "field" used as a key, or 1 if there is none.
int line_of_field(std::string_view text, std::string_view field) {
  const std::string needle = "\"" + std::string(field) + "\"";
  for (auto pos = text.find(needle); pos != std::string_view::npos;
       pos = text.find(needle, pos + 1)) {
    const auto next = text.find_first_not_of(" \t\r\n", pos + needle.size());
    if (next != std::string_view::npos && text[next] == ':') {
      return line_of_offset(text, pos);
    }
  }
  return 1;
}

std::string field_of(const std::string& msg) {
  if (!msg.starts_with("field '")) return {};
  const auto end = msg.find('\'', 7);
  return end == std::string::npos ? std::string() : msg.substr(7, end - 7);
}

}  // namespace

ScenarioConfig parse_scenario_config(std::string_view text,
                                     std::string_view source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << line_of_offset(text, e.byte > 0 ? e.byte - 1 : 0)
       << ": malformed JSON: " << e.what();
    throw ValidationError(os.str());
  }
  try {
    auto config = config_from_json(j);
    resolve(config);
    return config;
  } catch (const ValidationError& e) {
    const std::string msg = e.what();
    const auto field = field_of(msg);
    std::ostringstream os;
    os << source << ":" << (field.empty() ? 1 : line_of_field(text, field))
       << ": " << msg;
    throw ValidationError(os.str());
  }
}

ScenarioConfig load_scenario_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read config file '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_config(buf.str(), path.string());
}

std::string config_json(const ScenarioConfig& config) {
  return to_json(config).dump();
}

std::string config_hash(const ScenarioConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char ch : config_json(config)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace spinmem
