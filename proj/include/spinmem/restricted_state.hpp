#pragma once

#include <optional>
#include <span>
#include <vector>

#include "spinmem/linalg.hpp"
#include "spinmem/qubit_register.hpp"
#include "spinmem/state_vector.hpp"

namespace spinmem {

/// Index map between the dense basis of a register and its
/// zero-or-one-excitation sector. Sector index 0 is all-up; sector index
/// 1 + p has a single down spin at register position p. For the register
/// {f, s1..sN} this is the (N+2)-state basis all-up, f-down, s1-down, ...
class SectorBasis {
 public:
  explicit SectorBasis(std::size_t n_qubits) : n_(n_qubits) {}

  std::size_t dimension() const { return n_ + 1; }
  std::size_t sector_index_of_position(std::size_t pos) const { return pos + 1; }
  /// Dense basis index for a sector index (requires n <= 63).
  std::uint64_t dense_index(std::size_t sector_index) const;
  /// Sector index for a dense basis index, or nullopt if it has >1 down spin.
  std::optional<std::size_t> sector_index(std::uint64_t dense_index) const;

 private:
  std::size_t n_;
};

/// Pure state confined to the zero-or-one-excitation sector. Length n + 1.
class RestrictedState {
 public:
  RestrictedState() = default;
  RestrictedState(QubitRegister reg, std::vector<Complex> amplitudes);

  /// All-up state, amplitude 1 at sector index 0.
  static RestrictedState all_up(QubitRegister reg);
  /// alpha|all-up> + beta|label down>.
  static RestrictedState single_qubit(QubitRegister reg, QubitLabel label,
                                      const QubitState& q);

  const QubitRegister& qubits() const { return register_; }
  std::size_t dimension() const { return amplitudes_.size(); }
  std::span<const Complex> amplitudes() const { return amplitudes_; }
  std::span<Complex> amplitudes() { return amplitudes_; }
  Complex operator[](std::size_t i) const { return amplitudes_[i]; }
  Complex& operator[](std::size_t i) { return amplitudes_[i]; }

  /// Amplitude of the configuration with only `label` down.
  Complex down_amplitude(QubitLabel label) const;
  double norm() const;
  double probability_down(QubitLabel label) const;

 private:
  QubitRegister register_;
  std::vector<Complex> amplitudes_;
};

/// Default out-of-sector weight tolerated by the projections.
inline constexpr double kSectorLeakageThreshold = 1e-10;

/// Projects a dense state onto the sector; refuses (ToleranceError) when the
/// weight outside the sector exceeds `threshold`.
RestrictedState project_restricted(const StateVector& state,
                                   double threshold = kSectorLeakageThreshold);

/// Dense embedding of a restricted state (register must fit the dense cap).
StateVector expand(const RestrictedState& state);

/// Applies an excitation-conserving two-qubit gate inside the sector. Gates
/// that couple |00> or |11> to the single-excitation block are rejected.
void apply_two_qubit_gate(RestrictedState& state, const Gate4& gate,
                          QubitLabel a, QubitLabel b);

/// Diagonal single-qubit gates only (they keep the sector invariant).
void apply_single_qubit_gate(RestrictedState& state, const Gate2& gate,
                             QubitLabel q);

/// state (x) |up>_label, label appended at the end of the register.
RestrictedState append_qubit_up(const RestrictedState& state, QubitLabel label);

/// Throws unless `gate` is unitary and maps the single-excitation block
/// {|01>,|10>} to itself and leaves |00> invariant up to a phase.
void require_excitation_conserving(const Gate4& gate, double tol = 1e-12);

}  // namespace spinmem
