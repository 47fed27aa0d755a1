#pragma once

#include <span>
#include <string>
#include <vector>

#include "spinmem/linalg.hpp"
#include "spinmem/qubit_register.hpp"
#include "spinmem/restricted_state.hpp"
#include "spinmem/state_vector.hpp"

namespace spinmem {

enum class Subspace {
  Full,
  /// Zero-or-one-excitation sector, indexed as in SectorBasis.
  RestrictedOneExcitation,
};

/// Largest register for which a full density matrix is materialized.
inline constexpr std::size_t kMaxFullDensityQubits = 12;

class DensityMatrix {
 public:
  DensityMatrix() = default;
  DensityMatrix(QubitRegister reg, Eigen::MatrixXcd matrix,
                Subspace subspace = Subspace::Full);

  const QubitRegister& qubits() const { return register_; }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Eigen::MatrixXcd& matrix() { return matrix_; }
  Subspace subspace() const { return subspace_; }
  bool restricted() const {
    return subspace_ == Subspace::RestrictedOneExcitation;
  }
  Eigen::Index dimension() const { return matrix_.rows(); }

  Complex trace() const { return matrix_.trace(); }
  double hermiticity_defect() const;
  double min_eigenvalue() const;

  /// Hermitian and unit trace within `tol`, smallest eigenvalue >= -psd_tol.
  /// Throws ToleranceError with the failing quantity otherwise.
  void validate_physical(double tol = 1e-12, double psd_tol = 1e-10) const;

 private:
  QubitRegister register_;
  Eigen::MatrixXcd matrix_;
  Subspace subspace_ = Subspace::Full;
};

DensityMatrix density_from_state(const StateVector& state);
DensityMatrix density_from_state(const RestrictedState& state);

/// Reduced state on `keep`, in the order given by `keep`. A restricted input
/// yields a restricted output (tracing never adds excitations).
DensityMatrix partial_trace(const DensityMatrix& rho,
                            std::span<const QubitLabel> keep);

/// Reduced state of a pure dense state without forming |psi><psi|.
DensityMatrix partial_trace(const StateVector& state,
                            std::span<const QubitLabel> keep);

/// Full-basis copy of a restricted density matrix (small registers only).
DensityMatrix to_full(const DensityMatrix& rho);

/// Restricted copy of a full density matrix. Refuses when the weight outside
/// the sector exceeds `threshold`.
DensityMatrix project_restricted(const DensityMatrix& rho,
                                 double threshold = kSectorLeakageThreshold);

/// <psi|rho|psi> for a pure target on the same register.
double fidelity_pure(const DensityMatrix& rho, const StateVector& target);

/// rho -> U rho U^dagger with U acting on (a, b).
void apply_two_qubit_gate(DensityMatrix& rho, const Gate4& gate, QubitLabel a,
                          QubitLabel b);
void apply_single_qubit_gate(DensityMatrix& rho, const Gate2& gate,
                             QubitLabel q);

/// rho (x) |up><up| for a new qubit, placed first or last in the register.
enum class Placement { Front, Back };
DensityMatrix with_polarised_qubit(const DensityMatrix& rho, QubitLabel label,
                                   Placement where);

/// Same matrix over a register of equal size with different labels.
DensityMatrix relabeled(const DensityMatrix& rho, QubitRegister reg);

/// sigma_z on every qubit of `rho`.
DensityMatrix phase_corrected(const DensityMatrix& rho);

struct Tomogram {
  int dim = 0;
  Eigen::MatrixXd real_part;
  Eigen::MatrixXd imag_part;
  /// Bitstrings in register order, '0' = up, '1' = down.
  std::vector<std::string> basis_labels;
};

Tomogram tomogram(const DensityMatrix& rho);

}  // namespace spinmem
