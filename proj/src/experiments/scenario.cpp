#include "spinmem/experiments/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <ctime>
#include <numbers>
#include <set>
#include <string>

#include "spinmem/analytic/downflip.hpp"
#include "spinmem/errors.hpp"
#include "spinmem/experiments/random_qubit.hpp"
#include "spinmem/experiments/stats.hpp"
#include "spinmem/noise/dephasing.hpp"
#include "spinmem/parallel.hpp"
#include "spinmem/protocol/session.hpp"
#include "spinmem/random.hpp"

#ifndef SPINMEM_VERSION
#define SPINMEM_VERSION "unknown"
#endif

namespace spinmem {

std::size_t DataTable::column(std::string_view name) const {
  const auto it = std::find(columns.begin(), columns.end(), name);
  if (it == columns.end()) {
    throw ValidationError("no column '" + std::string(name) + "'");
  }
  return static_cast<std::size_t>(it - columns.begin());
}

double DataTable::real(std::size_t row, std::string_view name) const {
  const auto& cell = rows.at(row).at(column(name));
  if (const auto* i = std::get_if<std::int64_t>(&cell)) return static_cast<double>(*i);
  if (const auto* d = std::get_if<double>(&cell)) return *d;
  throw ValidationError("column '" + std::string(name) + "' is complex");
}

double ScenarioResult::summary_value(std::string_view key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  throw ValidationError("no summary entry '" + std::string(key) + "'");
}

namespace {

const double kInvSqrt2 = 1.0 / std::numbers::sqrt2;

QubitState named_qubit(const std::string& name) {
  if (name == "up") return kSpinUp;
  if (name == "down") return kSpinDown;
  return {{kInvSqrt2, 0.0}, {kInvSqrt2, 0.0}};
}

// Input register state f1..fn plus the single-qubit factors (nullopt inside
// an entangled block).
struct PreparedInputs {
  StateVector state;
  std::vector<std::optional<QubitState>> qubits;
  std::vector<bool> drawn;
};

PreparedInputs prepare_inputs(const std::vector<InputSpec>& specs,
                              PortableRng& rng) {
  std::vector<Complex> amps{Complex{1.0, 0.0}};
  std::vector<std::optional<QubitState>> qubits;
  std::vector<bool> drawn;
  auto kron = [&](const std::vector<Complex>& block) {
    std::vector<Complex> out;
    out.reserve(amps.size() * block.size());
    for (const Complex& a : amps) {
      for (const Complex& b : block) out.push_back(a * b);
    }
    amps = std::move(out);
  };
  for (const auto& spec : specs) {
    if (spec.name == "bell-phi-minus") {
      kron({kInvSqrt2, 0.0, 0.0, -kInvSqrt2});
      qubits.insert(qubits.end(), 2, std::nullopt);
      drawn.insert(drawn.end(), 2, false);
    } else if (spec.name == "bell-psi-minus") {
      kron({0.0, kInvSqrt2, -kInvSqrt2, 0.0});
      qubits.insert(qubits.end(), 2, std::nullopt);
      drawn.insert(drawn.end(), 2, false);
    } else {
      for (int i = 0; i < spec.count; ++i) {
        const QubitState q =
            spec.random() ? random_pure_qubit(rng) : named_qubit(spec.name);
        kron({q.up, q.down});
        qubits.emplace_back(q);
        drawn.push_back(spec.random());
      }
    }
  }
  std::vector<QubitLabel> labels;
  for (std::size_t i = 0; i < qubits.size(); ++i) {
    labels.push_back(flying(static_cast<int>(i + 1)));
  }
  return {StateVector(QubitRegister(labels), std::move(amps)), std::move(qubits),
          std::move(drawn)};
}

bool randomized(const ScenarioConfig& c) {
  const bool random_input = std::any_of(c.inputs.begin(), c.inputs.end(),
                                        [](const InputSpec& s) { return s.random(); });
  return random_input || (c.theta && c.theta->mode != ThetaMode::Fixed);
}

int run_count(const ScenarioConfig& c) { return randomized(c) ? c.repeats : 1; }

// Write schedules, one per input qubit; the read of qubit i reuses its entry.
std::vector<ThetaSchedule> draw_schedules(const ThetaSpec& spec, int chain_length,
                                          int n_inputs, PortableRng& rng) {
  switch (spec.mode) {
    case ThetaMode::Fixed:
      return std::vector<ThetaSchedule>(static_cast<std::size_t>(n_inputs),
                                        ThetaSchedule::uniform(spec.center));
    case ThetaMode::PerSiteBand: {
      const auto s = ThetaSchedule::random_band(spec.center, spec.width,
                                                chain_length, rng.next_u64());
      return std::vector<ThetaSchedule>(static_cast<std::size_t>(n_inputs), s);
    }
    case ThetaMode::PerRoundBand: {
      std::vector<ThetaSchedule> out;
      for (int i = 0; i < n_inputs; ++i) {
        out.push_back(ThetaSchedule::uniform(
            spec.center * rng.uniform(1.0 - spec.width, 1.0 + spec.width)));
      }
      return out;
    }
  }
  return {};
}

struct RoundTrip {
  // Input order, each relabeled f1.
  std::vector<DensityMatrix> retrieved;
  std::vector<DensityMatrix> retrieved_corrected;
  DensityMatrix joint;
  DensityMatrix joint_corrected;
  std::vector<std::string> warnings;
};

template <class State>
RoundTrip finish_round_trip(BasicMemorySession<State>& session, int n_inputs,
                            const std::vector<ThetaSchedule>& reads,
                            ExchangeModel model) {
  std::vector<ThetaSchedule> retrieval(reads.rbegin(), reads.rend());
  auto decoded = decode_sequence(session, n_inputs, retrieval, model, false);
  RoundTrip rt;
  const QubitRegister f1({flying(1)});
  rt.retrieved.resize(static_cast<std::size_t>(n_inputs));
  rt.retrieved_corrected.resize(static_cast<std::size_t>(n_inputs));
  for (int j = 0; j < n_inputs; ++j) {
    const auto i = static_cast<std::size_t>(n_inputs - 1 - j);
    rt.retrieved[i] = relabeled(decoded.retrieved[static_cast<std::size_t>(j)], f1);
    rt.retrieved_corrected[i] =
        relabeled(decoded.retrieved_corrected[static_cast<std::size_t>(j)], f1);
  }
  rt.joint = std::move(decoded.joint);
  rt.joint_corrected = std::move(decoded.joint_corrected);
  rt.warnings = session.warnings();
  return rt;
}

RoundTrip round_trip(const StateVector& inputs, int chain_length,
                     const std::vector<ThetaSchedule>& schedules,
                     ExchangeModel model) {
  const int n_inputs = static_cast<int>(inputs.qubits().size());
  if (n_inputs == 1) {
    auto session = encode_single_restricted(QubitState{inputs[0], inputs[1]},
                                            chain_length, schedules[0], model);
    return finish_round_trip(session, 1, schedules, model);
  }
  auto session = encode_sequence(inputs, chain_length, schedules, model);
  return finish_round_trip(session, n_inputs, schedules, model);
}

StateVector single_target(const QubitState& q) {
  const std::array<QubitState, 1> amps{q};
  return product_state(QubitRegister({flying(1)}), amps);
}

void merge_warnings(std::vector<std::string>& into,
                    const std::vector<std::string>& from) {
  for (const auto& w : from) {
    if (std::find(into.begin(), into.end(), w) == into.end()) into.push_back(w);
  }
}

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

using Row = std::vector<CellValue>;

void run_encode_decode(const ScenarioConfig& c, const RunOptions& opt,
                       ScenarioResult& out) {
  const int runs = run_count(c);
  const int n = *c.n;
  struct RunOutcome {
    double raw = 0.0;
    double corrected = 0.0;
    PreparedInputs inputs;
    RoundTrip rt;
  };
  auto outcomes = parallel_map(
      static_cast<std::size_t>(runs),
      [&](std::size_t r) {
        PortableRng rng(derive_seed(c.seed, r));
        RunOutcome o{0.0, 0.0, prepare_inputs(c.inputs, rng), {}};
        const int n_in = static_cast<int>(o.inputs.qubits.size());
        const auto schedules = draw_schedules(*c.theta, n, n_in, rng);
        o.rt = round_trip(o.inputs.state, n, schedules, c.model);
        o.raw = fidelity_pure(o.rt.joint, o.inputs.state);
        o.corrected = fidelity_pure(o.rt.joint_corrected, o.inputs.state);
        return o;
      },
      opt.workers);

  out.table.columns = {"run", "fidelity_raw", "fidelity_phase_corrected",
                       "infidelity_phase_corrected"};
  std::vector<double> raw, corrected;
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    const auto& o = outcomes[r];
    out.table.rows.push_back(Row{static_cast<std::int64_t>(r), o.raw,
                                 o.corrected, 1.0 - o.corrected});
    raw.push_back(o.raw);
    corrected.push_back(o.corrected);
    merge_warnings(out.warnings, o.rt.warnings);
    for (std::size_t q = 0; q < o.inputs.qubits.size(); ++q) {
      if (o.inputs.drawn[q]) {
        out.drawn_inputs.push_back({static_cast<int>(r), static_cast<int>(q + 1),
                                    *o.inputs.qubits[q]});
      }
    }
  }
  const auto& first = outcomes.front();
  out.tomograms.push_back({"input", tomogram(density_from_state(first.inputs.state))});
  out.tomograms.push_back({"retrieved", tomogram(first.rt.joint)});
  out.tomograms.push_back(
      {"retrieved_phase_corrected", tomogram(first.rt.joint_corrected)});
  out.summary = {{"n", n},
                 {"theta", c.theta->center},
                 {"runs", runs},
                 {"mean_fidelity_raw", mean(raw)},
                 {"mean_fidelity_phase_corrected", mean(corrected)},
                 {"mean_infidelity_phase_corrected", 1.0 - mean(corrected)}};
}

void run_theta_variation(const ScenarioConfig& c, const RunOptions& opt,
                         ScenarioResult& out) {
  const int runs = run_count(c);
  const int n = *c.n;
  struct RunOutcome {
    std::vector<double> raw;
    std::vector<double> corrected;
    std::vector<QubitState> inputs;
    std::vector<bool> drawn;
    std::vector<std::string> warnings;
  };
  auto outcomes = parallel_map(
      static_cast<std::size_t>(runs),
      [&](std::size_t r) {
        PortableRng rng(derive_seed(c.seed, r));
        auto inputs = prepare_inputs(c.inputs, rng);
        const int n_in = static_cast<int>(inputs.qubits.size());
        const auto schedules = draw_schedules(*c.theta, n, n_in, rng);
        auto rt = round_trip(inputs.state, n, schedules, c.model);
        RunOutcome o;
        for (int i = 0; i < n_in; ++i) {
          const auto& q = *inputs.qubits[static_cast<std::size_t>(i)];
          const auto target = single_target(q);
          o.raw.push_back(fidelity_pure(rt.retrieved[static_cast<std::size_t>(i)], target));
          o.corrected.push_back(fidelity_pure(
              rt.retrieved_corrected[static_cast<std::size_t>(i)], target));
          o.inputs.push_back(q);
        }
        o.drawn = inputs.drawn;
        o.warnings = std::move(rt.warnings);
        return o;
      },
      opt.workers);

  const auto n_in = outcomes.front().raw.size();
  out.table.columns = {"qubit", "retrieval_order", "fidelity_raw",
                       "fidelity_phase_corrected", "infidelity_phase_corrected"};
  std::vector<double> all;
  for (std::size_t i = 0; i < n_in; ++i) {
    std::vector<double> raw, corrected;
    for (const auto& o : outcomes) {
      raw.push_back(o.raw[i]);
      corrected.push_back(o.corrected[i]);
      all.push_back(1.0 - o.corrected[i]);
    }
    out.table.rows.push_back(Row{static_cast<std::int64_t>(i + 1),
                                 static_cast<std::int64_t>(n_in - i), mean(raw),
                                 mean(corrected), 1.0 - mean(corrected)});
  }
  for (std::size_t r = 0; r < outcomes.size(); ++r) {
    merge_warnings(out.warnings, outcomes[r].warnings);
    for (std::size_t i = 0; i < n_in; ++i) {
      if (!outcomes[r].drawn[i]) continue;
      out.drawn_inputs.push_back(
          {static_cast<int>(r), static_cast<int>(i + 1), outcomes[r].inputs[i]});
    }
  }
  out.summary = {{"n", n},
                 {"theta", c.theta->center},
                 {"runs", runs},
                 {"mean_infidelity_phase_corrected", mean(all)}};
}

void run_dephasing(const ScenarioConfig& c, const RunOptions& opt,
                   ScenarioResult& out) {
  const int n = *c.n;
  const auto& d = *c.dephasing;
  const auto profile = d.profile == ProfileKind::Homogeneous
                           ? DephasingProfile::homogeneous(n, d.gamma)
                           : DephasingProfile::single_site(n, d.site, d.gamma);
  PortableRng rng(derive_seed(c.seed, 0));
  const auto inputs = prepare_inputs(c.inputs, rng);
  const QubitState input = *inputs.qubits.front();
  if (c.inputs.front().random()) out.drawn_inputs.push_back({0, 1, input});

  std::vector<double> taus = c.tau_grid;
  taus.push_back(std::numeric_limits<double>::infinity());
  FidelityCurveOptions fo;
  fo.model = c.model;
  fo.workers = opt.workers;
  const auto schedule = ThetaSchedule::uniform(c.theta->center);
  const auto curve = fidelity_curve(input, n, schedule, profile, taus, fo);

  out.table.columns = {"tau_s", "fidelity_raw", "fidelity_phase_corrected"};
  for (std::size_t i = 0; i + 1 < curve.size(); ++i) {
    out.table.rows.push_back(
        Row{curve[i].tau, curve[i].fidelity_raw, curve[i].fidelity_corrected});
  }
  if (!schedule.in_checked_range()) {
    out.warnings.push_back("theta outside (0, pi/2]");
  }
  out.summary = {{"n", n},
                 {"theta", c.theta->center},
                 {"gamma", d.gamma},
                 {"saturated_fidelity_raw", curve.back().fidelity_raw},
                 {"saturated_fidelity_phase_corrected",
                  curve.back().fidelity_corrected}};
}

void run_distribution(const ScenarioConfig& c, const RunOptions& opt,
                      ScenarioResult& out) {
  const int n = *c.n;
  const double theta = c.theta->center;
  const auto schedule = ThetaSchedule::uniform(theta);
  struct Level {
    std::vector<Complex> simulated;
    std::vector<std::string> warnings;
  };
  const auto levels = parallel_map(
      c.l_grid.size(),
      [&](std::size_t i) {
        const int l = c.l_grid[i];
        auto session = encode_single_restricted(kSpinDown, n, schedule, c.model);
        for (int f = 2; f <= l + 1; ++f) {
          session.state() = append_qubit_up(session.state(), flying(f));
          write_pass(session, f, schedule, c.model);
        }
        Level lv;
        for (int k = 1; k <= n; ++k) {
          lv.simulated.push_back(session.state().down_amplitude(chain(k)));
        }
        lv.warnings = session.warnings();
        return lv;
      },
      opt.workers);

  out.table.columns = {"l", "k", "p_analytic", "p_simulated", "a_analytic",
                       "a_simulated"};
  double worst = 0.0;
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const int l = c.l_grid[i];
    merge_warnings(out.warnings, levels[i].warnings);
    for (int k = 1; k <= n; ++k) {
      const Complex a = a1(k, l, theta);
      const Complex s = levels[i].simulated[static_cast<std::size_t>(k - 1)];
      worst = std::max(worst, std::abs(std::norm(a) - std::norm(s)));
      out.table.rows.push_back(Row{static_cast<std::int64_t>(l),
                                   static_cast<std::int64_t>(k), std::norm(a),
                                   std::norm(s), a, s});
    }
  }
  out.summary = {{"n", n}, {"theta", theta}, {"max_probability_difference", worst}};
}

void run_chi_sweep(const ScenarioConfig& c, const RunOptions& opt,
                   ScenarioResult& out) {
  const int runs = run_count(c);
  const std::size_t n_chi = c.chi_grid.size();
  const std::size_t per_n = n_chi * static_cast<std::size_t>(runs);
  auto theta_for = [&](int n) {
    return c.theta ? c.theta->center
                   : storage_angle(n, *c.epsilon, *c.convention);
  };
  struct Point {
    double raw = 0.0;
    double corrected = 0.0;
    std::optional<QubitState> drawn;
    std::vector<std::string> warnings;
  };
  const auto points = parallel_map(
      c.n_grid.size() * per_n,
      [&](std::size_t idx) {
        const int n = c.n_grid[idx / per_n];
        const std::size_t chi_i = (idx % per_n) / static_cast<std::size_t>(runs);
        const auto r = idx % static_cast<std::size_t>(runs);
        // The same input for every (N, chi) of one run.
        PortableRng rng(derive_seed(c.seed, r));
        const QubitState q = *prepare_inputs(c.inputs, rng).qubits.front();
        const double theta = theta_for(n);
        auto session = encode_single_restricted(
            q, n, ThetaSchedule::uniform(theta), c.model);
        const std::array<ThetaSchedule, 1> read{
            ThetaSchedule::uniform(theta * (1.0 + c.chi_grid[chi_i]))};
        auto rt = finish_round_trip(session, 1, {read.begin(), read.end()}, c.model);
        const auto target = single_target(q);
        Point p;
        p.raw = fidelity_pure(rt.retrieved[0], target);
        p.corrected = fidelity_pure(rt.retrieved_corrected[0], target);
        if (c.inputs.front().random()) p.drawn = q;
        p.warnings = std::move(rt.warnings);
        return p;
      },
      opt.workers);

  out.table.columns = {"n", "theta_enc", "chi", "fidelity_raw",
                       "fidelity_phase_corrected", "infidelity_phase_corrected"};
  double worst = 1.0;
  for (std::size_t ni = 0; ni < c.n_grid.size(); ++ni) {
    const int n = c.n_grid[ni];
    for (std::size_t ci = 0; ci < n_chi; ++ci) {
      std::vector<double> raw, corrected;
      for (int r = 0; r < runs; ++r) {
        const auto& p = points[ni * per_n + ci * static_cast<std::size_t>(runs) +
                               static_cast<std::size_t>(r)];
        raw.push_back(p.raw);
        corrected.push_back(p.corrected);
        merge_warnings(out.warnings, p.warnings);
      }
      worst = std::min(worst, mean(corrected));
      out.table.rows.push_back(Row{static_cast<std::int64_t>(n), theta_for(n),
                                   c.chi_grid[ci], mean(raw), mean(corrected),
                                   1.0 - mean(corrected)});
    }
  }
  for (int r = 0; r < runs; ++r) {
    const auto& p = points[static_cast<std::size_t>(r)];
    if (p.drawn) out.drawn_inputs.push_back({r, 1, *p.drawn});
  }
  out.summary = {{"runs", runs}, {"min_fidelity_phase_corrected", worst}};
}

void run_moments(const ScenarioConfig& c, const RunOptions& opt,
                 ScenarioResult& out) {
  const double theta = c.theta->center;
  const auto ms = parallel_map(
      c.l_grid.size(), [&](std::size_t i) { return moments(c.l_grid[i], theta); },
      opt.workers);
  out.table.columns = {"l", "mean", "stddev", "truncation", "tail_bound"};
  std::vector<double> ls, mus, sigmas;
  for (std::size_t i = 0; i < ms.size(); ++i) {
    out.table.rows.push_back(Row{static_cast<std::int64_t>(c.l_grid[i]), ms[i].mean,
                                 ms[i].stddev,
                                 static_cast<std::int64_t>(ms[i].truncation),
                                 ms[i].tail_bound});
    ls.push_back(c.l_grid[i]);
    mus.push_back(ms[i].mean);
    sigmas.push_back(ms[i].stddev);
  }
  out.summary = {{"theta", theta}};
  const std::set<int> distinct(c.l_grid.begin(), c.l_grid.end());
  if (distinct.size() >= 2) {
    const auto fm = linear_fit(ls, mus);
    const auto fs = linear_fit(ls, sigmas);
    out.summary.insert(out.summary.end(),
                       {{"mean_slope", fm.slope},
                        {"mean_intercept", fm.intercept},
                        {"mean_r_squared", fm.r_squared},
                        {"stddev_slope", fs.slope},
                        {"stddev_intercept", fs.intercept},
                        {"stddev_r_squared", fs.r_squared}});
  }
  const auto closed = moments_level0_closed_form(theta);
  out.summary.emplace_back("mean_closed_form_l0", closed.mean);
  out.summary.emplace_back("stddev_closed_form_l0", closed.stddev);
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& config,
                            const RunOptions& options) {
  ScenarioResult out;
  out.config = resolve(config);
  const auto& c = out.config;
  switch (c.kind) {
    case ScenarioKind::EncodeDecode:
      run_encode_decode(c, options, out);
      break;
    case ScenarioKind::ThetaVariation:
      run_theta_variation(c, options, out);
      break;
    case ScenarioKind::DephasingCurve:
      run_dephasing(c, options, out);
      break;
    case ScenarioKind::Distribution:
      run_distribution(c, options, out);
      break;
    case ScenarioKind::ChiSweep:
      run_chi_sweep(c, options, out);
      break;
    case ScenarioKind::Moments:
      run_moments(c, options, out);
      break;
  }
  out.provenance.version = SPINMEM_VERSION;
  out.provenance.timestamp = utc_timestamp();
  out.provenance.seed = c.seed;
  out.provenance.config_hash = config_hash(c);
  return out;
}

}  // namespace spinmem
