#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "spinmem/density_matrix.hpp"
#include "spinmem/linalg.hpp"
#include "spinmem/protocol/chain_sizing.hpp"

namespace spinmem {

enum class ScenarioKind {
  EncodeDecode,
  DephasingCurve,
  Distribution,
  ChiSweep,
  ThetaVariation,
  Moments,
};

/// "encode-decode", "dephasing", "distribution", "chi-sweep",
/// "theta-variation", "moments".
std::string_view to_string(ScenarioKind kind);
ScenarioKind parse_scenario_kind(std::string_view text);

enum class ThetaMode {
  Fixed,
  /// One random angle per chain site, shared by every pass of a run.
  PerSiteBand,
  /// One random angle per flying qubit, used for its write and its read.
  PerRoundBand,
};

std::string_view to_string(ThetaMode mode);
ThetaMode parse_theta_mode(std::string_view text);

/// Angles drawn uniformly from center * (1 - width, 1 + width) in band modes.
struct ThetaSpec {
  ThetaMode mode = ThetaMode::Fixed;
  double center = 1.0;
  double width = 0.0;

  bool operator==(const ThetaSpec&) const = default;
};

/// Parses an angle written as a number, "pi" or "pi/<number>".
double parse_angle(std::string_view text);

/// Named input block: up, down, plus, bell-phi-minus, bell-psi-minus or
/// random(count).
struct InputSpec {
  std::string name = "plus";
  int count = 1;

  int qubits() const;
  bool random() const { return name == "random"; }
  std::string to_string() const;

  bool operator==(const InputSpec&) const = default;
};

InputSpec parse_input_spec(std::string_view text);

enum class ProfileKind { Homogeneous, SingleSite };

struct DephasingSpec {
  ProfileKind profile = ProfileKind::SingleSite;
  /// Rate in s^-1.
  double gamma = 1e6;
  /// Decohering site for SingleSite.
  int site = 1;

  bool operator==(const DephasingSpec&) const = default;
};

/// Declarative description of one experiment. Unset optionals take kind
/// dependent defaults in resolve().
struct ScenarioConfig {
  ScenarioKind kind = ScenarioKind::EncodeDecode;
  std::optional<int> n;
  std::optional<ThetaSpec> theta;
  ExchangeModel model = ExchangeModel::XY;
  std::vector<InputSpec> inputs;
  std::uint64_t seed = 1;
  std::vector<double> tau_grid;
  std::vector<double> chi_grid;
  std::vector<int> l_grid;
  std::vector<int> n_grid;
  int repeats = 10;
  std::optional<double> epsilon;
  std::optional<EpsilonConvention> convention;
  /// Number of sites the stored qubit should spread over; picks theta from
  /// the epsilon condition when theta is unset.
  std::optional<int> storage_sites;
  std::optional<DephasingSpec> dephasing;

  bool operator==(const ScenarioConfig&) const = default;
};

/// Fills in defaults and checks cross-field consistency. Throws
/// ValidationError("field '<name>': ...") naming the offending field.
ScenarioConfig resolve(ScenarioConfig config);

/// Parses a JSON config. Errors carry "<source>:<line>: ..." positions.
ScenarioConfig parse_scenario_config(std::string_view text,
                                     std::string_view source = "<config>");
ScenarioConfig load_scenario_config(const std::filesystem::path& path);

/// 16 hex digits of FNV-1a over the canonical JSON form of the config.
std::string config_hash(const ScenarioConfig& config);

/// Canonical JSON text of the config (sorted keys, unset fields omitted).
std::string config_json(const ScenarioConfig& config);

using CellValue = std::variant<std::int64_t, double, Complex>;

struct DataTable {
  std::vector<std::string> columns;
  std::vector<std::vector<CellValue>> rows;

  std::size_t column(std::string_view name) const;
  /// Real value of a numeric cell (throws for complex cells).
  double real(std::size_t row, std::string_view name) const;
};

struct NamedTomogram {
  std::string name;
  Tomogram tomogram;
};

/// A random input qubit drawn during the run.
struct DrawnInput {
  int run = 0;
  int qubit = 1;
  QubitState state;
};

struct Provenance {
  std::string artifact = "spinmem";
  std::string version;
  std::string timestamp;
  std::uint64_t seed = 0;
  std::string config_hash;
};

struct ScenarioResult {
  ScenarioConfig config;
  DataTable table;
  std::vector<NamedTomogram> tomograms;
  /// Scalar digests (fits, saturation values, chosen N and theta).
  std::vector<std::pair<std::string, double>> summary;
  std::vector<DrawnInput> drawn_inputs;
  std::vector<std::string> warnings;
  Provenance provenance;

  double summary_value(std::string_view key) const;
};

struct RunOptions {
  /// 0 picks the hardware concurrency.
  std::size_t workers = 0;
};

/// Resolves and runs a scenario. Randomized scenarios (random inputs or band
/// angles) average over `repeats` runs seeded derive_seed(seed, run);
/// deterministic ones run once.
ScenarioResult run_scenario(const ScenarioConfig& config,
                            const RunOptions& options = {});

}  // namespace spinmem
