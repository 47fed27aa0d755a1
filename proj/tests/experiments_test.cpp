#include <unistd.h>

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "spinmem/analytic/downflip.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/experiments/emit.hpp"
#include "spinmem/experiments/random_qubit.hpp"
#include "spinmem/experiments/scenario.hpp"
#include "spinmem/experiments/stats.hpp"

namespace spinmem {
namespace {

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() /
         ("spinmem_" + std::to_string(::getpid()) + "_" + name);
}

std::vector<std::string> split(const std::string& line, char sep = ',') {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

std::vector<std::string> csv_lines(const ScenarioResult& r) {
  std::ostringstream os;
  write_csv(r, os);
  std::vector<std::string> lines;
  std::stringstream ss(os.str());
  std::string line;
  while (std::getline(ss, line)) lines.push_back(line);
  return lines;
}

ScenarioConfig bell_config(const std::string& input) {
  ScenarioConfig c;
  c.kind = ScenarioKind::EncodeDecode;
  c.n = 8;
  c.theta = ThetaSpec{ThetaMode::Fixed, 1.1, 0.0};
  c.inputs = {parse_input_spec(input)};
  return c;
}

TEST(RandomQubit, NormalizedAndReproducible) {
  PortableRng a(99), b(99);
  for (int i = 0; i < 100; ++i) {
    const auto qa = random_pure_qubit(a);
    const auto qb = random_pure_qubit(b);
    EXPECT_NEAR(qa.norm_squared(), 1.0, 1e-12);
    EXPECT_EQ(qa.up, qb.up);
    EXPECT_EQ(qa.down, qb.down);
  }
}

TEST(RandomQubit, BlochVectorsAreIsotropic) {
  PortableRng rng(2024);
  double sx = 0, sy = 0, sz = 0, zz = 0;
  constexpr int kSamples = 10000;
  for (int i = 0; i < kSamples; ++i) {
    const auto b = bloch_vector(random_pure_qubit(rng));
    EXPECT_NEAR(b.x * b.x + b.y * b.y + b.z * b.z, 1.0, 1e-12);
    sx += b.x;
    sy += b.y;
    sz += b.z;
    zz += b.z * b.z;
  }
  const double norm = std::sqrt(sx * sx + sy * sy + sz * sz) / kSamples;
  EXPECT_LT(norm, 0.05);
  // Uniform on the sphere: <z^2> = 1/3.
  EXPECT_NEAR(zz / kSamples, 1.0 / 3.0, 0.02);
}

TEST(Stats, LinearFitOfExactLine) {
  const std::vector<double> x{0, 1, 2, 3, 4};
  const std::vector<double> y{1.5, 3.5, 5.5, 7.5, 9.5};
  const auto f = linear_fit(x, y);
  EXPECT_NEAR(f.slope, 2.0, 1e-14);
  EXPECT_NEAR(f.intercept, 1.5, 1e-14);
  EXPECT_NEAR(f.r_squared, 1.0, 1e-14);
  EXPECT_THROW(linear_fit(std::vector<double>{1, 1}, std::vector<double>{0, 1}),
               ValidationError);
}

TEST(ConfigNames, AnglesInputsAndKinds) {
  EXPECT_EQ(parse_angle("pi/2"), std::numbers::pi / 2);
  EXPECT_EQ(parse_angle("pi"), std::numbers::pi);
  EXPECT_EQ(parse_angle("0.3"), 0.3);
  EXPECT_THROW(parse_angle("half"), ValidationError);

  for (const char* name : {"up", "down", "plus", "bell-phi-minus",
                           "bell-psi-minus", "random(4)"}) {
    EXPECT_EQ(parse_input_spec(name).to_string(), name);
  }
  EXPECT_EQ(parse_input_spec("random(4)").qubits(), 4);
  EXPECT_EQ(parse_input_spec("bell-psi-minus").qubits(), 2);
  EXPECT_THROW(parse_input_spec("random(0)"), ValidationError);
  EXPECT_THROW(parse_input_spec("minus"), ValidationError);

  for (auto k : {ScenarioKind::EncodeDecode, ScenarioKind::DephasingCurve,
                 ScenarioKind::Distribution, ScenarioKind::ChiSweep,
                 ScenarioKind::ThetaVariation, ScenarioKind::Moments}) {
    EXPECT_EQ(parse_scenario_kind(to_string(k)), k);
  }
}

TEST(Resolve, KindDefaults) {
  ScenarioConfig chi;
  chi.kind = ScenarioKind::ChiSweep;
  const auto rc = resolve(chi);
  EXPECT_EQ(rc.n_grid, (std::vector<int>{10, 20, 50, 100}));
  EXPECT_EQ(rc.convention, EpsilonConvention::AmplitudeCosN);
  EXPECT_EQ(rc.epsilon, 1e-2);
  EXPECT_EQ(rc.chi_grid.size(), 21u);
  EXPECT_EQ(rc.repeats, 10);

  ScenarioConfig tv;
  tv.kind = ScenarioKind::ThetaVariation;
  tv.theta = ThetaSpec{ThetaMode::Fixed, 1.0, 0.0};
  const auto rt = resolve(tv);
  EXPECT_EQ(rt.n, 8);  // chain sizing at epsilon = 1e-4, probability form
  ASSERT_EQ(rt.inputs.size(), 1u);
  EXPECT_EQ(rt.inputs[0].to_string(), "random(4)");

  ScenarioConfig deph;
  deph.kind = ScenarioKind::DephasingCurve;
  deph.n = 100;
  const auto rd = resolve(deph);
  EXPECT_NEAR(rd.theta->center, std::acos(std::pow(1e-2, 1.0 / 100)), 1e-15);
  EXPECT_NEAR(rd.theta->center, 0.30, 0.005);
  EXPECT_EQ(rd.tau_grid.size(), 51u);
  EXPECT_EQ(rd.dephasing->site, 1);
}

TEST(Resolve, IsIdempotent) {
  std::vector<ScenarioConfig> configs;
  configs.push_back(bell_config("bell-phi-minus"));
  ScenarioConfig c;
  c.kind = ScenarioKind::ChiSweep;
  c.n = 20;
  configs.push_back(c);
  c = {};
  c.kind = ScenarioKind::DephasingCurve;
  c.n = 30;
  c.storage_sites = 10;
  configs.push_back(c);
  c = {};
  c.kind = ScenarioKind::Moments;
  c.theta = ThetaSpec{ThetaMode::Fixed, 0.4, 0.0};
  configs.push_back(c);
  for (const auto& cfg : configs) {
    const auto once = resolve(cfg);
    EXPECT_EQ(resolve(once), once) << to_string(cfg.kind);
    EXPECT_EQ(config_hash(resolve(once)), config_hash(once));
  }
}

TEST(Resolve, RejectsInconsistentConfigs) {
  auto c = bell_config("bell-phi-minus");
  c.theta.reset();
  EXPECT_THROW(resolve(c), ValidationError);

  ScenarioConfig tv;
  tv.kind = ScenarioKind::ThetaVariation;
  tv.theta = ThetaSpec{ThetaMode::Fixed, 1.0, 0.0};
  tv.inputs = {parse_input_spec("bell-phi-minus")};
  EXPECT_THROW(resolve(tv), ValidationError);

  ScenarioConfig d;
  d.kind = ScenarioKind::Distribution;
  d.n = 9;
  d.theta = ThetaSpec{ThetaMode::Fixed, 1.2, 0.0};
  d.model = ExchangeModel::Heisenberg;
  EXPECT_THROW(resolve(d), ValidationError);

  ScenarioConfig m;
  m.kind = ScenarioKind::Moments;
  m.theta = ThetaSpec{ThetaMode::PerSiteBand, 0.4, 0.1};
  EXPECT_THROW(resolve(m), ValidationError);

  ScenarioConfig e = bell_config("plus");
  e.tau_grid = {0.0};
  EXPECT_THROW(resolve(e), ValidationError);
  e = bell_config("plus");
  e.repeats = 0;
  EXPECT_THROW(resolve(e), ValidationError);
}

TEST(ConfigParse, FieldErrorsCarryLineNumbers) {
  const std::string text =
      "{\n"
      "  \"kind\": \"encode-decode\",\n"
      "  \"n\": 8,\n"
      "  \"theta\": {\"mode\": \"fixed\", \"center\": 2.5},\n"
      "  \"inputs\": [\"plus\"]\n"
      "}\n";
  try {
    parse_scenario_config(text, "cfg.json");
    FAIL() << "expected a validation error";
  } catch (const ValidationError& e) {
    EXPECT_TRUE(std::string(e.what()).starts_with("cfg.json:4: field 'theta'"))
        << e.what();
  }

  const std::string unknown = "{\n  \"kind\": \"moments\",\n  \"theta\": 0.4,\n  \"tehta\": 1\n}";
  try {
    parse_scenario_config(unknown, "cfg.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(std::string(e.what()).starts_with("cfg.json:4: field 'tehta'"))
        << e.what();
  }

  const std::string broken = "{\n  \"kind\": \"moments\",\n  \"theta\": ,\n}";
  try {
    parse_scenario_config(broken, "cfg.json");
    FAIL();
  } catch (const ValidationError& e) {
    EXPECT_TRUE(std::string(e.what()).starts_with("cfg.json:3: malformed JSON"))
        << e.what();
  }
}

TEST(ConfigParse, AcceptsEveryFieldAndRoundTrips) {
  const std::string text = R"({
    "kind": "dephasing", "n": 40, "theta": "pi/2", "model": "heisenberg",
    "inputs": "plus", "seed": 18446744073709551615, "tau_grid": [0, 1e-6],
    "repeats": 3, "epsilon": 0.01, "convention": "amp",
    "dephasing": {"profile": "homogeneous", "gamma": 2e6, "site": 1}
  })";
  const auto c = parse_scenario_config(text);
  EXPECT_EQ(c.kind, ScenarioKind::DephasingCurve);
  EXPECT_EQ(c.theta->center, std::numbers::pi / 2);
  EXPECT_EQ(c.seed, 18446744073709551615ULL);
  EXPECT_EQ(c.model, ExchangeModel::Heisenberg);
  EXPECT_EQ(c.dephasing->profile, ProfileKind::Homogeneous);
  EXPECT_EQ(config_from_json(to_json(c)), c);
}

TEST(ConfigHash, StableAndSensitive) {
  const auto a = resolve(bell_config("bell-phi-minus"));
  EXPECT_EQ(config_hash(a), config_hash(a));
  EXPECT_EQ(config_hash(a).size(), 16u);
  auto b = a;
  b.seed = 2;
  EXPECT_NE(config_hash(a), config_hash(b));
}

TEST(EncodeDecodeScenario, BellStatesMatchQuotedInfidelities) {
  const auto phi = run_scenario(bell_config("bell-phi-minus"));
  ASSERT_EQ(phi.table.rows.size(), 1u);
  const double inf_phi = phi.table.real(0, "infidelity_phase_corrected");
  EXPECT_NEAR(inf_phi, 3e-4, 0.5e-4);
  ASSERT_EQ(phi.tomograms.size(), 3u);
  EXPECT_EQ(phi.tomograms[1].name, "retrieved");
  EXPECT_EQ(phi.tomograms[1].tomogram.dim, 4);

  const auto psi = run_scenario(bell_config("bell-psi-minus"));
  EXPECT_NEAR(psi.table.real(0, "infidelity_phase_corrected"), 7e-4, 0.5e-4);
}

TEST(EncodeDecodeScenario, SwapPointRecoversUpToSigmaZ) {
  auto c = bell_config("plus");
  c.theta = ThetaSpec{ThetaMode::Fixed, std::numbers::pi / 2, 0.0};
  c.n = 3;
  const auto r = run_scenario(c);
  EXPECT_NEAR(r.table.real(0, "fidelity_phase_corrected"), 1.0, 1e-14);
  EXPECT_NEAR(r.table.real(0, "fidelity_raw"), 0.0, 1e-14);
}

TEST(EncodeDecodeScenario, RandomInputsAreRecorded) {
  auto c = bell_config("random(2)");
  c.repeats = 3;
  const auto r = run_scenario(c);
  EXPECT_EQ(r.table.rows.size(), 3u);
  EXPECT_EQ(r.drawn_inputs.size(), 6u);
  EXPECT_EQ(r.summary_value("runs"), 3.0);
}

TEST(DistributionScenario, SimulationMatchesClosedForm) {
  ScenarioConfig c;
  c.kind = ScenarioKind::Distribution;
  c.n = 9;
  c.theta = ThetaSpec{ThetaMode::Fixed, 1.2, 0.0};
  c.l_grid = {2};
  const auto r = run_scenario(c);
  ASSERT_EQ(r.table.rows.size(), 9u);
  for (std::size_t i = 0; i < 9; ++i) {
    const int k = static_cast<int>(r.table.real(i, "k"));
    EXPECT_EQ(k, static_cast<int>(i) + 1);
    EXPECT_NEAR(r.table.real(i, "p_simulated"), std::norm(a1(k, 2, 1.2)), 1e-10);
    EXPECT_NEAR(r.table.real(i, "p_analytic"), std::norm(a1(k, 2, 1.2)), 0.0);
  }
  EXPECT_LT(r.summary_value("max_probability_difference"), 1e-10);
}

TEST(ThetaVariationScenario, FirstRetrievedIsBest) {
  ScenarioConfig c;
  c.kind = ScenarioKind::ThetaVariation;
  c.n = 9;
  c.theta = ThetaSpec{ThetaMode::Fixed, 1.0, 0.0};
  c.inputs = {parse_input_spec("random(4)")};
  const auto r = run_scenario(c);
  ASSERT_EQ(r.table.rows.size(), 4u);
  EXPECT_EQ(r.summary_value("runs"), 10.0);
  EXPECT_EQ(r.drawn_inputs.size(), 40u);
  // Qubit 4 is encoded last and retrieved first.
  EXPECT_EQ(r.table.real(3, "retrieval_order"), 1.0);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_LT(r.table.real(3, "infidelity_phase_corrected"),
              r.table.real(i, "infidelity_phase_corrected"));
  }
}

TEST(Determinism, WorkerCountDoesNotChangeRows) {
  ScenarioConfig tv;
  tv.kind = ScenarioKind::ThetaVariation;
  tv.n = 9;
  tv.theta = ThetaSpec{ThetaMode::PerRoundBand, 1.0, 0.1};
  tv.inputs = {parse_input_spec("random(3)")};
  tv.repeats = 6;
  ScenarioConfig chi;
  chi.kind = ScenarioKind::ChiSweep;
  chi.n_grid = {10, 20};
  chi.inputs = {parse_input_spec("random(1)")};
  chi.repeats = 3;
  for (const auto& c : {tv, chi}) {
    const auto a = run_scenario(c, {1});
    const auto b = run_scenario(c, {4});
    EXPECT_EQ(a.table.rows, b.table.rows) << to_string(c.kind);
    EXPECT_EQ(a.provenance.config_hash, b.provenance.config_hash);
  }
}

TEST(ChiSweepScenario, MatchedAnglesAreNearPerfect) {
  ScenarioConfig c;
  c.kind = ScenarioKind::ChiSweep;
  c.n_grid = {10, 50};
  c.chi_grid = {-0.1, 0.0, 0.1};
  const auto r = run_scenario(c);
  ASSERT_EQ(r.table.rows.size(), 6u);
  for (std::size_t i = 0; i < r.table.rows.size(); ++i) {
    const double f = r.table.real(i, "fidelity_phase_corrected");
    if (r.table.real(i, "chi") == 0.0) {
      EXPECT_GT(f, 1.0 - 1e-2);
    }
    EXPECT_GE(f, 0.99);
  }
}

TEST(MomentsScenario, LevelZeroMatchesClosedForm) {
  ScenarioConfig c;
  c.kind = ScenarioKind::Moments;
  c.theta = ThetaSpec{ThetaMode::Fixed, 0.4, 0.0};
  const auto r = run_scenario(c);
  ASSERT_EQ(r.table.rows.size(), 11u);
  const double s2 = std::pow(std::sin(0.4), 2);
  EXPECT_NEAR(r.table.real(0, "mean"), 1.0 / s2, 1e-10);
  EXPECT_NEAR(r.table.real(0, "stddev"), std::cos(0.4) / s2, 1e-10);
  EXPECT_NEAR(r.summary_value("mean_r_squared"), 1.0, 1e-12);
}

TEST(Emit, DephasingCsvColumns) {
  ScenarioConfig c;
  c.kind = ScenarioKind::DephasingCurve;
  c.n = 20;
  c.tau_grid = {0.0, 1e-6, 2e-6};
  c.seed = 77;
  const auto r = run_scenario(c);
  const auto lines = csv_lines(r);
  ASSERT_EQ(lines.size(), 4u);
  EXPECT_EQ(lines[0], "tau_s,fidelity_raw,fidelity_phase_corrected,seed");
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const auto cells = split(lines[i]);
    ASSERT_EQ(cells.size(), 4u);
    EXPECT_EQ(cells[3], "77");
    double v = 0.0;
    std::from_chars(cells[2].data(), cells[2].data() + cells[2].size(), v);
    EXPECT_EQ(v, r.table.real(i - 1, "fidelity_phase_corrected"));
  }
}

TEST(Emit, DistributionCsvSplitsComplexColumns) {
  ScenarioConfig c;
  c.kind = ScenarioKind::Distribution;
  c.n = 5;
  c.theta = ThetaSpec{ThetaMode::Fixed, 1.0, 0.0};
  c.l_grid = {1};
  const auto lines = csv_lines(run_scenario(c));
  EXPECT_EQ(lines[0],
            "l,k,p_analytic,p_simulated,a_analytic_re,a_analytic_im,"
            "a_simulated_re,a_simulated_im,seed");
  EXPECT_EQ(lines.size(), 6u);
}

TEST(Emit, JsonRoundTripKeepsConfigHashAndRows) {
  const auto r = run_scenario(bell_config("bell-phi-minus"));
  const auto path = temp_path("roundtrip.json");
  emit(r, OutputFormat::Json, path);
  const auto back = read_result_json(path);
  std::filesystem::remove(path);
  EXPECT_EQ(config_hash(back.config), r.provenance.config_hash);
  EXPECT_EQ(back.provenance.config_hash, r.provenance.config_hash);
  EXPECT_EQ(back.provenance.seed, r.config.seed);
  EXPECT_EQ(back.table.columns, r.table.columns);
  EXPECT_EQ(back.table.rows, r.table.rows);
  ASSERT_EQ(back.tomograms.size(), r.tomograms.size());
  EXPECT_EQ(back.tomograms[1].tomogram.real_part, r.tomograms[1].tomogram.real_part);
  // JSON objects keep keys sorted, so compare as maps.
  using Summary = std::map<std::string, double>;
  EXPECT_EQ(Summary(back.summary.begin(), back.summary.end()),
            Summary(r.summary.begin(), r.summary.end()));
}

TEST(Emit, UnwritablePathIsAnIoError) {
  const auto r = run_scenario(bell_config("plus"));
  EXPECT_THROW(emit(r, OutputFormat::Csv, "/nonexistent-dir/x.csv"), IoError);
  EXPECT_THROW(read_result_json("/nonexistent-dir/x.json"), IoError);
  EXPECT_THROW(parse_output_format("xml"), ValidationError);
}

}  // namespace
}  // namespace spinmem
