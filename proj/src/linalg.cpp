#include "spinmem/linalg.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "spinmem/errors.hpp"

namespace spinmem {

std::string_view to_string(ExchangeModel model) {
  return model == ExchangeModel::XY ? "xy" : "heisenberg";
}

ExchangeModel parse_exchange_model(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (lower == "xy") return ExchangeModel::XY;
  if (lower == "heisenberg") return ExchangeModel::Heisenberg;
  throw ValidationError("unknown exchange model '" + std::string(text) +
                        "' (expected xy|heisenberg)");
}

double unitarity_defect(const Eigen::MatrixXcd& u) {
  if (u.rows() != u.cols()) return std::numeric_limits<double>::infinity();
  const Eigen::MatrixXcd d =
      u * u.adjoint() - Eigen::MatrixXcd::Identity(u.rows(), u.cols());
  return d.cwiseAbs().maxCoeff();
}

Gate2 pauli_z() {
  Gate2 z = Gate2::Zero();
  z(0, 0) = 1.0;
  z(1, 1) = -1.0;
  return z;
}

CosSin cos_sin(double theta) {
  // cos(pi/2) rounds to 6e-17 in double precision.
  if (theta == std::numbers::pi / 2) return {0.0, 1.0};
  return {std::cos(theta), std::sin(theta)};
}

}  // namespace spinmem
