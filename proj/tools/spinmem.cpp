// spinmem: command-line front end for the scenario runner.
//
//   spinmem <subcommand> [options]
//
// Data goes to --out (or stdout) as CSV or JSON; warnings and the summary go
// to stderr. Exit codes: 0 success, 1 validation error, 2 numerical tolerance
// failure, 3 I/O error.

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/experiments/emit.hpp"
#include "spinmem/experiments/scenario.hpp"

namespace {

using namespace spinmem;

constexpr int kExitValidation = 1;
constexpr int kExitTolerance = 2;
constexpr int kExitIo = 3;

struct SharedFlags {
  std::optional<int> n;
  std::optional<std::string> theta;
  std::string model = "xy";
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "csv";
  std::optional<double> epsilon;
  std::optional<std::string> convention;
  std::size_t workers = 0;
};

struct SubcommandFlags {
  std::vector<std::string> inputs;
  std::string theta_mode = "fixed";
  double width = 0.0;
  std::optional<int> repeats;
  // dephasing
  std::string profile = "single-site";
  double gamma = 1e6;
  int site = 1;
  double tau_max = 1e-5;
  int tau_points = 51;
  std::optional<int> storage_sites;
  // distribution / moments
  std::vector<int> levels;
  // chi-sweep
  std::vector<int> n_list;
  double chi_max = 0.1;
  int chi_points = 21;
  // scenario
  std::string config_path;
};

void add_shared(CLI::App* cmd, SharedFlags& f, bool scenario_flags) {
  cmd->add_option("--out", f.out, "Output file (default: stdout)");
  cmd->add_option("--format", f.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  cmd->add_option("--workers", f.workers, "Worker threads (0 = all cores)");
  if (!scenario_flags) return;
  cmd->add_option("--n", f.n, "Chain length N");
  cmd->add_option("--theta", f.theta, "Exchange angle (number, pi or pi/<d>)");
  cmd->add_option("--model", f.model, "xy or heisenberg");
  cmd->add_option("--seed", f.seed, "Master seed (64-bit)");
  cmd->add_option("--epsilon", f.epsilon, "Residual tolerance for sizing");
  cmd->add_option("--convention", f.convention, "prob or amp");
}

void add_theta_band(CLI::App* cmd, SubcommandFlags& s) {
  cmd->add_option("--theta-mode", s.theta_mode,
                  "fixed, per-site-band or per-round-band");
  cmd->add_option("--width", s.width, "Fractional band width");
  cmd->add_option("--repeats", s.repeats, "Runs averaged for random scenarios");
}

std::vector<double> grid(double lo, double hi, int points) {
  if (points < 1) throw ValidationError("grid needs at least one point");
  if (points == 1) return {lo};
  std::vector<double> v;
  for (int i = 0; i < points; ++i) v.push_back(lo + (hi - lo) * i / (points - 1));
  return v;
}

ScenarioConfig build_config(ScenarioKind kind, const SharedFlags& f,
                            const SubcommandFlags& s) {
  ScenarioConfig c;
  c.kind = kind;
  c.n = f.n;
  c.model = parse_exchange_model(f.model);
  c.seed = f.seed;
  c.epsilon = f.epsilon;
  if (f.convention) c.convention = parse_epsilon_convention(*f.convention);
  if (f.theta) {
    c.theta = ThetaSpec{parse_theta_mode(s.theta_mode), parse_angle(*f.theta),
                        s.width};
  }
  for (const auto& in : s.inputs) c.inputs.push_back(parse_input_spec(in));
  if (s.repeats) c.repeats = *s.repeats;

  switch (kind) {
    case ScenarioKind::DephasingCurve:
      c.dephasing = DephasingSpec{
          s.profile == "homogeneous" ? ProfileKind::Homogeneous
                                     : ProfileKind::SingleSite,
          s.gamma, s.site};
      c.tau_grid = grid(0.0, s.tau_max, s.tau_points);
      c.storage_sites = s.storage_sites;
      break;
    case ScenarioKind::Distribution:
    case ScenarioKind::Moments:
      c.l_grid = s.levels;
      break;
    case ScenarioKind::ChiSweep:
      c.n_grid = s.n_list;
      c.chi_grid = grid(-s.chi_max, s.chi_max, s.chi_points);
      break;
    default:
      break;
  }
  return c;
}

void report(const ScenarioResult& r) {
  for (const auto& w : r.warnings) std::cerr << "warning: " << w << '\n';
  std::cerr << to_string(r.config.kind) << " seed=" << r.provenance.seed
            << " config_hash=" << r.provenance.config_hash << '\n';
  for (const auto& [k, v] : r.summary) std::cerr << "  " << k << " = " << v << '\n';
}

int run(ScenarioConfig config, const SharedFlags& f) {
  const auto format = parse_output_format(f.format);
  RunOptions opts;
  opts.workers = f.workers;
  const auto result = run_scenario(config, opts);
  if (f.out.empty()) {
    write_result(result, format, std::cout);
  } else {
    emit(result, format, f.out);
  }
  report(result);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Passive spin-chain quantum memory simulator"};
  app.require_subcommand(1);

  SharedFlags shared;
  SubcommandFlags sub;

  auto* encode = app.add_subcommand("encode-decode",
                                    "Store input qubits and read them back");
  add_shared(encode, shared, true);
  encode->add_option("--inputs", sub.inputs,
                     "up, down, plus, bell-phi-minus, bell-psi-minus, random(<n>)");
  add_theta_band(encode, sub);

  auto* dephasing = app.add_subcommand("dephasing",
                                       "Retrieved fidelity against storage time");
  add_shared(dephasing, shared, true);
  dephasing->add_option("--input", sub.inputs, "Stored qubit (default plus)")
      ->expected(1);
  dephasing->add_option("--profile", sub.profile, "homogeneous or single-site")
      ->check(CLI::IsMember({"homogeneous", "single-site"}));
  dephasing->add_option("--gamma", sub.gamma, "Dephasing rate in 1/s");
  dephasing->add_option("--site", sub.site, "Decohering site (single-site)");
  dephasing->add_option("--tau-max", sub.tau_max, "Largest storage time in s");
  dephasing->add_option("--tau-points", sub.tau_points, "Number of storage times");
  dephasing->add_option("--storage-sites", sub.storage_sites,
                        "Pick theta so the qubit spreads over this many sites");

  auto* distribution = app.add_subcommand(
      "distribution", "Simulated vs closed-form down-flip distribution");
  add_shared(distribution, shared, true);
  distribution->add_option("--levels", sub.levels, "Levels l");

  auto* chi = app.add_subcommand("chi-sweep",
                                 "Fidelity under a read/write angle mismatch");
  add_shared(chi, shared, true);
  chi->add_option("--input", sub.inputs, "Stored qubit (default plus)")->expected(1);
  chi->add_option("--n-list", sub.n_list, "Chain lengths");
  chi->add_option("--chi-max", sub.chi_max, "Largest |chi|");
  chi->add_option("--chi-points", sub.chi_points, "Number of chi values");
  chi->add_option("--repeats", sub.repeats, "Runs averaged for random inputs");

  auto* variation = app.add_subcommand(
      "theta-variation", "Per-qubit fidelities under angle variations");
  add_shared(variation, shared, true);
  variation->add_option("--inputs", sub.inputs, "Input qubits (default random(4))");
  add_theta_band(variation, sub);

  auto* moments = app.add_subcommand("moments",
                                     "Mean and spread of the down-flip position");
  add_shared(moments, shared, true);
  moments->add_option("--levels", sub.levels, "Levels l (default 0..10)");

  auto* scenario = app.add_subcommand("scenario", "Run a JSON scenario file");
  add_shared(scenario, shared, false);
  scenario->add_option("--config", sub.config_path, "Scenario JSON file")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (*scenario) return run(load_scenario_config(sub.config_path), shared);
    const std::pair<CLI::App*, ScenarioKind> kinds[] = {
        {encode, ScenarioKind::EncodeDecode},
        {dephasing, ScenarioKind::DephasingCurve},
        {distribution, ScenarioKind::Distribution},
        {chi, ScenarioKind::ChiSweep},
        {variation, ScenarioKind::ThetaVariation},
        {moments, ScenarioKind::Moments},
    };
    for (const auto& [cmd, kind] : kinds) {
      if (*cmd) return run(build_config(kind, shared, sub), shared);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const ToleranceError& e) {
    std::cerr << "tolerance failure: " << e.what() << '\n';
    return kExitTolerance;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << '\n';
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitTolerance;
  }
  return kExitValidation;
}
