#pragma once

#include <complex>
#include <string_view>

#include <Eigen/Dense>

namespace spinmem {

using Complex = std::complex<double>;

/// Two-qubit gate in the basis |q_a q_b> = |00>,|01>,|10>,|11>, q_a most
/// significant, 0 = spin-up.
using Gate4 = Eigen::Matrix4cd;
using Gate2 = Eigen::Matrix2cd;

/// Exchange coupling between a flying qubit and a static spin.
enum class ExchangeModel { XY, Heisenberg };

std::string_view to_string(ExchangeModel model);
/// Accepts "xy" / "heisenberg" (case-insensitive).
ExchangeModel parse_exchange_model(std::string_view text);

/// Largest |(U U^dagger - 1)_ij|.
double unitarity_defect(const Eigen::MatrixXcd& u);

Gate2 pauli_z();

struct CosSin {
  double cos = 1.0;
  double sin = 0.0;
};

/// cos and sin of theta, with the SWAP angle pi/2 pinned to exactly (0, 1).
CosSin cos_sin(double theta);

/// Single-qubit pure state a|up> + b|down>.
struct QubitState {
  Complex up{1.0, 0.0};
  Complex down{0.0, 0.0};

  double norm_squared() const { return std::norm(up) + std::norm(down); }
};

inline const QubitState kSpinUp{{1.0, 0.0}, {0.0, 0.0}};
inline const QubitState kSpinDown{{0.0, 0.0}, {1.0, 0.0}};

}  // namespace spinmem
