#pragma once

#include <span>
#include <vector>

#include "spinmem/linalg.hpp"
#include "spinmem/qubit_register.hpp"

namespace spinmem {

/// Dense amplitude vector over a QubitRegister, length 2^n.
class StateVector {
 public:
  StateVector() = default;
  /// Takes ownership of `amplitudes`; their length must be 2^register.size().
  StateVector(QubitRegister reg, std::vector<Complex> amplitudes);

  const QubitRegister& qubits() const { return register_; }
  std::size_t dimension() const { return amplitudes_.size(); }

  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  Complex operator[](std::size_t index) const { return amplitudes_[index]; }
  Complex& operator[](std::size_t index) { return amplitudes_[index]; }

  double norm() const;
  /// Probability that `label` is found spin-down.
  double probability_down(QubitLabel label) const;

 private:
  QubitRegister register_;
  std::vector<Complex> amplitudes_;
};

/// Tensor product of single-qubit states in register order.
StateVector product_state(const QubitRegister& reg,
                          std::span<const QubitState> assignment);

/// Applies `gate` to qubits (a, b) in place, as gate (x) identity on the rest.
/// The 2^n x 2^n operator is never built.
void apply_two_qubit_gate(StateVector& state, const Gate4& gate, QubitLabel a,
                          QubitLabel b);

void apply_single_qubit_gate(StateVector& state, const Gate2& gate,
                             QubitLabel q);

/// state (x) |q>, with `label` appended as the least significant qubit.
StateVector append_qubit(const StateVector& state, QubitLabel label,
                         const QubitState& q);

/// <a|b>; registers must match.
Complex inner_product(const StateVector& a, const StateVector& b);

/// |<a|b>|^2, insensitive to global phase.
double overlap_fidelity(const StateVector& a, const StateVector& b);

/// Throws ValidationError if `gate` is not unitary within `tol`.
void require_unitary(const Eigen::MatrixXcd& gate, double tol = 1e-12);

}  // namespace spinmem
