#include "spinmem/state_vector.hpp"

#include <cmath>
#include <sstream>

#include "spinmem/errors.hpp"

namespace spinmem {

StateVector::StateVector(QubitRegister reg, std::vector<Complex> amplitudes)
    : register_(std::move(reg)), amplitudes_(std::move(amplitudes)) {
  if (amplitudes_.size() != (std::size_t{1} << register_.size())) {
    throw ValidationError("state vector length " +
                          std::to_string(amplitudes_.size()) +
                          " does not match a " +
                          std::to_string(register_.size()) + "-qubit register");
  }
}

double StateVector::norm() const {
  double sum = 0.0;
  for (const auto& a : amplitudes_) sum += std::norm(a);
  return std::sqrt(sum);
}

double StateVector::probability_down(QubitLabel label) const {
  const auto mask = register_.bit_mask(label);
  double p = 0.0;
  for (std::size_t i = 0; i < amplitudes_.size(); ++i) {
    if (i & mask) p += std::norm(amplitudes_[i]);
  }
  return p;
}

StateVector product_state(const QubitRegister& reg,
                          std::span<const QubitState> assignment) {
  if (assignment.size() != reg.size()) {
    throw ValidationError("assignment has " + std::to_string(assignment.size()) +
                          " states for a " + std::to_string(reg.size()) +
                          "-qubit register");
  }
  for (std::size_t i = 0; i < assignment.size(); ++i) {
    if (std::abs(assignment[i].norm_squared() - 1.0) > 1e-12) {
      throw ValidationError("single-qubit state for " + reg[i].to_string() +
                            " is not normalized");
    }
  }
  std::vector<Complex> amps{Complex{1.0, 0.0}};
  for (const auto& q : assignment) {
    std::vector<Complex> next(amps.size() * 2);
    for (std::size_t i = 0; i < amps.size(); ++i) {
      next[2 * i] = amps[i] * q.up;
      next[2 * i + 1] = amps[i] * q.down;
    }
    amps = std::move(next);
  }
  return StateVector(reg, std::move(amps));
}

void require_unitary(const Eigen::MatrixXcd& gate, double tol) {
  const double defect = unitarity_defect(gate);
  if (!(defect <= tol)) {
    std::ostringstream msg;
    msg << "gate is not unitary (max |UU^dagger - 1| = " << defect << ")";
    throw ValidationError(msg.str());
  }
}

void apply_two_qubit_gate(StateVector& state, const Gate4& gate, QubitLabel a,
                          QubitLabel b) {
  if (a == b) throw ValidationError("two-qubit gate needs distinct qubits");
  require_unitary(gate);
  const auto& reg = state.qubits();
  const std::uint64_t ma = reg.bit_mask(a);
  const std::uint64_t mb = reg.bit_mask(b);
  auto amps = state.amplitudes();
  const std::size_t dim = amps.size();
  for (std::size_t i = 0; i < dim; ++i) {
    if (i & (ma | mb)) continue;
    const std::size_t idx[4] = {i, i | mb, i | ma, i | ma | mb};
    const Complex in[4] = {amps[idx[0]], amps[idx[1]], amps[idx[2]],
                           amps[idx[3]]};
    for (int r = 0; r < 4; ++r) {
      amps[idx[r]] = gate(r, 0) * in[0] + gate(r, 1) * in[1] +
                     gate(r, 2) * in[2] + gate(r, 3) * in[3];
    }
  }
}

void apply_single_qubit_gate(StateVector& state, const Gate2& gate,
                             QubitLabel q) {
  require_unitary(gate);
  const std::uint64_t m = state.qubits().bit_mask(q);
  auto amps = state.amplitudes();
  for (std::size_t i = 0; i < amps.size(); ++i) {
    if (i & m) continue;
    const Complex up = amps[i];
    const Complex down = amps[i | m];
    amps[i] = gate(0, 0) * up + gate(0, 1) * down;
    amps[i | m] = gate(1, 0) * up + gate(1, 1) * down;
  }
}

StateVector append_qubit(const StateVector& state, QubitLabel label,
                         const QubitState& q) {
  auto reg = state.qubits().with_appended(label);
  std::vector<Complex> amps(state.dimension() * 2);
  for (std::size_t i = 0; i < state.dimension(); ++i) {
    amps[2 * i] = state[i] * q.up;
    amps[2 * i + 1] = state[i] * q.down;
  }
  return StateVector(std::move(reg), std::move(amps));
}

Complex inner_product(const StateVector& a, const StateVector& b) {
  if (!(a.qubits() == b.qubits())) {
    throw ValidationError("inner product of states on different registers");
  }
  Complex sum{0.0, 0.0};
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    sum += std::conj(a[i]) * b[i];
  }
  return sum;
}

double overlap_fidelity(const StateVector& a, const StateVector& b) {
  return std::norm(inner_product(a, b));
}

}  // namespace spinmem
