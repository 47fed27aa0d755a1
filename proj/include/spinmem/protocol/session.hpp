#pragma once

#include <span>
#include <string>
#include <vector>

#include "spinmem/density_matrix.hpp"
#include "spinmem/linalg.hpp"
#include "spinmem/protocol/theta_schedule.hpp"
#include "spinmem/restricted_state.hpp"
#include "spinmem/state_vector.hpp"

namespace spinmem {

enum class PassDirection { Write, Read };

struct PassRecord {
  PassDirection direction = PassDirection::Write;
  int flying = 1;
  ThetaSchedule schedule = ThetaSchedule::uniform(1.0);
  ExchangeModel model = ExchangeModel::XY;
};

/// A memory chain s1..sN together with every flying qubit that has visited
/// it. The chain is never reset between passes; each pass is appended to the
/// log. `State` is StateVector (any excitation number) or RestrictedState
/// (at most one down spin overall).
template <class State>
class BasicMemorySession {
 public:
  explicit BasicMemorySession(State state);

  const State& state() const { return state_; }
  State& state() { return state_; }
  int chain_length() const { return state_.qubits().chain_length(); }

  const std::vector<PassRecord>& log() const { return log_; }
  const std::vector<std::string>& warnings() const { return warnings_; }

  /// Flying indices written so far, in write order.
  std::vector<int> encoded() const;

  void record(PassRecord pass) { log_.push_back(std::move(pass)); }
  void warn(std::string message) { warnings_.push_back(std::move(message)); }

 private:
  State state_;
  std::vector<PassRecord> log_;
  std::vector<std::string> warnings_;
};

using MemorySession = BasicMemorySession<StateVector>;
using RestrictedSession = BasicMemorySession<RestrictedState>;

/// Gates between `flying` and the sites of a chain of length N: s1..sN for a
/// write, sN..s1 for a read. `Target` is StateVector, RestrictedState or
/// DensityMatrix (conjugation).
template <class Target>
void apply_pass(Target& target, QubitLabel flying, int chain_length,
                const ThetaSchedule& schedule, ExchangeModel model,
                PassDirection direction);

/// Write pass of flying qubit `flying` through s1..sN.
template <class State>
void write_pass(BasicMemorySession<State>& session, int flying,
                const ThetaSchedule& schedule, ExchangeModel model);

/// Read pass of flying qubit `flying` through sN..s1. The probe is expected
/// to arrive spin-up; a warning is logged otherwise.
template <class State>
void read_pass(BasicMemorySession<State>& session, int flying,
               const ThetaSchedule& schedule, ExchangeModel model);

/// Empty chain |F> of length N next to the flying qubits of `inputs`.
MemorySession open_session(const StateVector& inputs, int chain_length);

/// Writes flying qubits 1..n of `inputs` one after another. `schedules`
/// holds one schedule for every pass or a single shared one.
MemorySession encode_sequence(const StateVector& inputs, int chain_length,
                              std::span<const ThetaSchedule> schedules,
                              ExchangeModel model);

/// Single stored qubit in the one-excitation representation, which scales to
/// long chains.
RestrictedSession encode_single_restricted(const QubitState& input,
                                           int chain_length,
                                           const ThetaSchedule& schedule,
                                           ExchangeModel model);

struct DecodeResult {
  /// Probe labels in retrieval order.
  std::vector<QubitLabel> probes;
  /// Reduced state of each probe, in retrieval order.
  std::vector<DensityMatrix> retrieved;
  std::vector<DensityMatrix> retrieved_corrected;
  /// Joint state of all probes ordered as the inputs they mirror (the last
  /// probe corresponds to flying qubit 1), relabeled f1..fn.
  DensityMatrix joint;
  DensityMatrix joint_corrected;
};

/// Reads `count` qubits back with fresh spin-up probes appended to the
/// register. Retrieval runs in reverse encode order. `schedules` is in
/// retrieval order (one per probe, or one shared). Both raw and
/// sigma_z-corrected states are returned; `phase_correct` additionally
/// applies the correction to the session state.
template <class State>
DecodeResult decode_sequence(BasicMemorySession<State>& session, int count,
                             std::span<const ThetaSchedule> schedules,
                             ExchangeModel model, bool phase_correct);

}  // namespace spinmem
