#include "spinmem/interaction_matrix.hpp"

#include <cmath>
#include <string>

#include "spinmem/errors.hpp"

namespace spinmem {

Eigen::MatrixXcd dense_interaction_matrix(int chain_length, int site,
                                          double theta, ExchangeModel model) {
  if (chain_length < 1 || chain_length > kMaxDenseOracleChain) {
    throw ValidationError("dense interaction matrix supports 1 <= N <= " +
                          std::to_string(kMaxDenseOracleChain) + ", got N = " +
                          std::to_string(chain_length));
  }
  if (site < 1 || site > chain_length) {
    throw ValidationError("site index " + std::to_string(site) +
                          " outside 1.." + std::to_string(chain_length));
  }
  const Complex phase = model == ExchangeModel::Heisenberg
                            ? std::polar(1.0, theta)
                            : Complex{1.0, 0.0};
  const Complex c = std::cos(theta) * phase;
  const Complex s = Complex{0.0, -std::sin(theta)} * phase;

  const Eigen::Index half = Eigen::Index{1} << chain_length;
  const Eigen::Index m = Eigen::Index{1} << (chain_length - site);
  const Eigen::Index blocks = half / m;
  const auto identity_m = Eigen::MatrixXcd::Identity(m, m);

  Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * half, 2 * half);
  for (Eigen::Index j = 0; j < blocks; ++j) {
    const bool site_down = (j & 1) != 0;
    const Eigen::Index up = j * m;          // f up quadrant offset
    const Eigen::Index down = half + j * m; // f down quadrant offset
    if (site_down) {
      u.block(up, up, m, m) = c * identity_m;
      u.block(down, down, m, m) = identity_m;
      // |up_f down_k> <-> |down_f up_k>, the neighbouring block
      u.block(up, half + (j - 1) * m, m, m) = s * identity_m;
    } else {
      u.block(up, up, m, m) = identity_m;
      u.block(down, down, m, m) = c * identity_m;
      u.block(down, (j + 1) * m, m, m) = s * identity_m;
    }
  }
  return u;
}

}  // namespace spinmem
