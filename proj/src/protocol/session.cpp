#include "spinmem/protocol/session.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "spinmem/errors.hpp"
#include "spinmem/protocol/gate.hpp"

namespace spinmem {

namespace {

constexpr double kProbeUpTolerance = 1e-12;

void require_flying(const QubitRegister& reg, int flying_index) {
  if (!reg.contains(flying(flying_index))) {
    throw ValidationError("flying qubit f" + std::to_string(flying_index) +
                          " is not in register [" + describe(reg) + "]");
  }
}

std::string range_warning(int flying_index) {
  std::ostringstream os;
  os << "pass of f" << flying_index
     << " uses angles outside (0, pi/2]; results are outside the checked range";
  return os.str();
}

const ThetaSchedule& schedule_for(std::span<const ThetaSchedule> schedules,
                                  std::size_t pass, std::size_t passes) {
  if (schedules.size() == 1) return schedules.front();
  if (schedules.size() != passes) {
    throw ValidationError("expected 1 or " + std::to_string(passes) +
                          " theta schedules, got " +
                          std::to_string(schedules.size()));
  }
  return schedules[pass];
}

StateVector with_probe(const StateVector& s, QubitLabel label) {
  return append_qubit(s, label, kSpinUp);
}

RestrictedState with_probe(const RestrictedState& s, QubitLabel label) {
  return append_qubit_up(s, label);
}

DensityMatrix reduced(const StateVector& s, std::span<const QubitLabel> keep) {
  return partial_trace(s, keep);
}

DensityMatrix reduced(const RestrictedState& s,
                      std::span<const QubitLabel> keep) {
  return to_full(partial_trace(density_from_state(s), keep));
}

}  // namespace

template <class State>
BasicMemorySession<State>::BasicMemorySession(State state)
    : state_(std::move(state)) {
  if (!state_.qubits().has_full_chain() || chain_length() < 1) {
    throw ValidationError("session register [" + describe(state_.qubits()) +
                          "] does not hold a chain s1..sN");
  }
}

template <class State>
std::vector<int> BasicMemorySession<State>::encoded() const {
  std::vector<int> out;
  for (const PassRecord& p : log_) {
    if (p.direction == PassDirection::Write) out.push_back(p.flying);
  }
  return out;
}

template <class Target>
void apply_pass(Target& target, QubitLabel flying_label, int chain_length,
                const ThetaSchedule& schedule, ExchangeModel model,
                PassDirection direction) {
  if (!schedule.covers(chain_length)) {
    throw ValidationError("theta schedule does not cover a chain of length " +
                          std::to_string(chain_length));
  }
  const bool uniform = schedule.is_uniform();
  const Gate4 shared = interaction_unitary({schedule.angle(1), model});
  for (int step = 0; step < chain_length; ++step) {
    const int k =
        direction == PassDirection::Write ? step + 1 : chain_length - step;
    const Gate4 gate =
        uniform ? shared : interaction_unitary({schedule.angle(k), model});
    apply_two_qubit_gate(target, gate, flying_label, chain(k));
  }
}

template <class State>
void write_pass(BasicMemorySession<State>& session, int flying_index,
                const ThetaSchedule& schedule, ExchangeModel model) {
  require_flying(session.state().qubits(), flying_index);
  if (!schedule.in_checked_range()) {
    session.warn(range_warning(flying_index));
  }
  apply_pass(session.state(), flying(flying_index), session.chain_length(),
             schedule, model, PassDirection::Write);
  session.record({PassDirection::Write, flying_index, schedule, model});
}

template <class State>
void read_pass(BasicMemorySession<State>& session, int flying_index,
               const ThetaSchedule& schedule, ExchangeModel model) {
  require_flying(session.state().qubits(), flying_index);
  const double p_down = session.state().probability_down(flying(flying_index));
  if (p_down > kProbeUpTolerance) {
    std::ostringstream os;
    os << "read probe f" << flying_index
       << " is not spin-up (P(down) = " << p_down << ")";
    session.warn(os.str());
  }
  if (!schedule.in_checked_range()) {
    session.warn(range_warning(flying_index));
  }
  apply_pass(session.state(), flying(flying_index), session.chain_length(),
             schedule, model, PassDirection::Read);
  session.record({PassDirection::Read, flying_index, schedule, model});
}

MemorySession open_session(const StateVector& inputs, int chain_length) {
  const QubitRegister& in = inputs.qubits();
  const int n = static_cast<int>(in.size());
  if (n < 1) throw ValidationError("no flying qubits to store");
  for (int i = 0; i < n; ++i) {
    if (in[static_cast<std::size_t>(i)] != flying(i + 1)) {
      throw ValidationError("inputs must be over f1..f" + std::to_string(n) +
                            ", got [" + describe(in) + "]");
    }
  }
  if (chain_length < 1) throw ValidationError("chain length must be >= 1");
  if (std::abs(inputs.norm() - 1.0) > 1e-12) {
    throw ValidationError("input state is not normalized");
  }
  QubitRegister reg = QubitRegister::memory(n, chain_length);
  std::vector<Complex> amps(std::size_t{1} << reg.size());
  for (std::size_t i = 0; i < inputs.dimension(); ++i) {
    amps[i << chain_length] = inputs[i];
  }
  return MemorySession(StateVector(std::move(reg), std::move(amps)));
}

MemorySession encode_sequence(const StateVector& inputs, int chain_length,
                              std::span<const ThetaSchedule> schedules,
                              ExchangeModel model) {
  MemorySession session = open_session(inputs, chain_length);
  const std::size_t n = inputs.qubits().size();
  for (std::size_t i = 0; i < n; ++i) {
    write_pass(session, static_cast<int>(i + 1), schedule_for(schedules, i, n),
               model);
  }
  return session;
}

RestrictedSession encode_single_restricted(const QubitState& input,
                                           int chain_length,
                                           const ThetaSchedule& schedule,
                                           ExchangeModel model) {
  if (chain_length < 1) throw ValidationError("chain length must be >= 1");
  QubitRegister reg =
      QubitRegister::memory(1, chain_length, QubitRegister::kRestrictedCap);
  RestrictedSession session(
      RestrictedState::single_qubit(std::move(reg), flying(1), input));
  write_pass(session, 1, schedule, model);
  return session;
}

template <class State>
DecodeResult decode_sequence(BasicMemorySession<State>& session, int count,
                             std::span<const ThetaSchedule> schedules,
                             ExchangeModel model, bool phase_correct) {
  if (count < 1) throw ValidationError("decode count must be >= 1");
  const auto stored = session.encoded().size();
  if (static_cast<std::size_t>(count) > stored) {
    session.warn("decoding " + std::to_string(count) + " qubits but only " +
                 std::to_string(stored) +
                 " were encoded; extra probes have no target");
  }
  DecodeResult out;
  const int first = session.state().qubits().max_flying_index() + 1;
  for (int i = 0; i < count; ++i) {
    const QubitLabel probe = flying(first + i);
    session.state() = with_probe(session.state(), probe);
    read_pass(session, probe.index,
              schedule_for(schedules, static_cast<std::size_t>(i),
                           static_cast<std::size_t>(count)),
              model);
    out.probes.push_back(probe);
  }

  for (const QubitLabel& p : out.probes) {
    const QubitLabel keep[] = {p};
    DensityMatrix rho = reduced(session.state(), keep);
    out.retrieved_corrected.push_back(phase_corrected(rho));
    out.retrieved.push_back(std::move(rho));
  }
  std::vector<QubitLabel> joint_keep(out.probes.rbegin(), out.probes.rend());
  std::vector<QubitLabel> joint_labels;
  for (int i = 1; i <= count; ++i) joint_labels.push_back(flying(i));
  out.joint = relabeled(reduced(session.state(), joint_keep),
                        QubitRegister(joint_labels));
  out.joint_corrected = phase_corrected(out.joint);

  if (phase_correct) {
    for (const QubitLabel& p : out.probes) {
      apply_single_qubit_gate(session.state(), pauli_z(), p);
    }
  }
  return out;
}

template class BasicMemorySession<StateVector>;
template class BasicMemorySession<RestrictedState>;

template void apply_pass<StateVector>(StateVector&, QubitLabel, int,
                                      const ThetaSchedule&, ExchangeModel,
                                      PassDirection);
template void apply_pass<RestrictedState>(RestrictedState&, QubitLabel, int,
                                          const ThetaSchedule&, ExchangeModel,
                                          PassDirection);
template void apply_pass<DensityMatrix>(DensityMatrix&, QubitLabel, int,
                                        const ThetaSchedule&, ExchangeModel,
                                        PassDirection);

template void write_pass<StateVector>(MemorySession&, int,
                                      const ThetaSchedule&, ExchangeModel);
template void write_pass<RestrictedState>(RestrictedSession&, int,
                                          const ThetaSchedule&, ExchangeModel);
template void read_pass<StateVector>(MemorySession&, int, const ThetaSchedule&,
                                     ExchangeModel);
template void read_pass<RestrictedState>(RestrictedSession&, int,
                                         const ThetaSchedule&, ExchangeModel);

template DecodeResult decode_sequence<StateVector>(
    MemorySession&, int, std::span<const ThetaSchedule>, ExchangeModel, bool);
template DecodeResult decode_sequence<RestrictedState>(
    RestrictedSession&, int, std::span<const ThetaSchedule>, ExchangeModel,
    bool);

}  // namespace spinmem
