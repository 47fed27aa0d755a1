#include "spinmem/restricted_state.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "spinmem/errors.hpp"

namespace spinmem {

std::uint64_t SectorBasis::dense_index(std::size_t sector_index) const {
  if (sector_index == 0) return 0;
  const std::size_t pos = sector_index - 1;
  return std::uint64_t{1} << (n_ - 1 - pos);
}

std::optional<std::size_t> SectorBasis::sector_index(
    std::uint64_t dense_index) const {
  if (dense_index == 0) return 0;
  if (std::popcount(dense_index) != 1) return std::nullopt;
  const auto bit = static_cast<std::size_t>(std::countr_zero(dense_index));
  return n_ - 1 - bit + 1;
}

RestrictedState::RestrictedState(QubitRegister reg,
                                 std::vector<Complex> amplitudes)
    : register_(std::move(reg)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != register_.size() + 1) {
    throw ValidationError("restricted state length " +
                          std::to_string(amplitudes_.size()) +
                          " does not match a " +
                          std::to_string(register_.size()) + "-qubit register");
  }
}

RestrictedState RestrictedState::all_up(QubitRegister reg) {
  std::vector<Complex> amps(reg.size() + 1);
  amps[0] = 1.0;
  return RestrictedState(std::move(reg), std::move(amps));
}

RestrictedState RestrictedState::single_qubit(QubitRegister reg,
                                              QubitLabel label,
                                              const QubitState& q) {
  if (std::abs(q.norm_squared() - 1.0) > 1e-12) {
    throw ValidationError("single-qubit state is not normalized");
  }
  const std::size_t pos = reg.position(label);
  std::vector<Complex> amps(reg.size() + 1);
  amps[0] = q.up;
  amps[pos + 1] = q.down;
  return RestrictedState(std::move(reg), std::move(amps));
}

Complex RestrictedState::down_amplitude(QubitLabel label) const {
  return amplitudes_[register_.position(label) + 1];
}

double RestrictedState::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

double RestrictedState::probability_down(QubitLabel label) const {
  return std::norm(down_amplitude(label));
}

RestrictedState project_restricted(const StateVector& state, double threshold) {
  const auto& reg = state.qubits();
  const SectorBasis basis(reg.size());
  std::vector<Complex> amps(basis.dimension());
  double outside = 0.0;
  for (std::uint64_t i = 0; i < state.dimension(); ++i) {
    if (auto s = basis.sector_index(i)) {
      amps[*s] = state[i];
    } else {
      outside += std::norm(state[i]);
    }
  }
  if (outside > threshold) {
    std::ostringstream msg;
    msg << "state has weight " << outside
        << " outside the zero-or-one-excitation sector (threshold "
        << threshold << "); the restricted representation only holds a "
        << "single stored excitation";
    throw ToleranceError(msg.str());
  }
  return RestrictedState(reg.with_cap(QubitRegister::kRestrictedCap),
                         std::move(amps));
}

StateVector expand(const RestrictedState& state) {
  const auto reg = state.qubits().with_cap(QubitRegister::kDenseCap);
  const SectorBasis basis(reg.size());
  std::vector<Complex> amps(std::size_t{1} << reg.size());
  for (std::size_t s = 0; s < basis.dimension(); ++s) {
    amps[basis.dense_index(s)] = state[s];
  }
  return StateVector(reg, std::move(amps));
}

void require_excitation_conserving(const Gate4& gate, double tol) {
  require_unitary(gate, tol);
  double leak = 0.0;
  for (int i = 1; i < 4; ++i) {
    leak = std::max({leak, std::abs(gate(0, i)), std::abs(gate(i, 0))});
  }
  for (int i = 0; i < 3; ++i) {
    leak = std::max({leak, std::abs(gate(3, i)), std::abs(gate(i, 3))});
  }
  if (leak > tol) {
    throw ValidationError(
        "gate does not conserve the excitation number; it cannot act on a "
        "restricted state");
  }
}

void apply_two_qubit_gate(RestrictedState& state, const Gate4& gate,
                          QubitLabel a, QubitLabel b) {
  if (a == b) throw ValidationError("two-qubit gate needs distinct qubits");
  require_excitation_conserving(gate);
  const std::size_t ia = state.qubits().position(a) + 1;
  const std::size_t ib = state.qubits().position(b) + 1;
  auto amps = state.amplitudes();
  // |q_a q_b> = |01> means b is down (sector index ib), |10> means a is down.
  const Complex down_b = amps[ib];
  const Complex down_a = amps[ia];
  amps[ib] = gate(1, 1) * down_b + gate(1, 2) * down_a;
  amps[ia] = gate(2, 1) * down_b + gate(2, 2) * down_a;
  const Complex idle = gate(0, 0);
  if (idle != Complex{1.0, 0.0}) {
    for (std::size_t s = 0; s < amps.size(); ++s) {
      if (s != ia && s != ib) amps[s] *= idle;
    }
  }
}

void apply_single_qubit_gate(RestrictedState& state, const Gate2& gate,
                             QubitLabel q) {
  require_unitary(gate);
  if (std::abs(gate(0, 1)) > 1e-12 || std::abs(gate(1, 0)) > 1e-12) {
    throw ValidationError(
        "only diagonal single-qubit gates keep the restricted sector");
  }
  const std::size_t iq = state.qubits().position(q) + 1;
  auto amps = state.amplitudes();
  for (std::size_t s = 0; s < amps.size(); ++s) {
    amps[s] *= (s == iq) ? gate(1, 1) : gate(0, 0);
  }
}

RestrictedState append_qubit_up(const RestrictedState& state, QubitLabel label) {
  auto reg = state.qubits().with_appended(label);
  std::vector<Complex> amps(state.amplitudes().begin(),
                            state.amplitudes().end());
  amps.push_back(0.0);
  return RestrictedState(std::move(reg), std::move(amps));
}

}  // namespace spinmem
