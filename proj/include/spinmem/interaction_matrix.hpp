#pragma once

#include "spinmem/linalg.hpp"

namespace spinmem {

inline constexpr int kMaxDenseOracleChain = 6;

/// Explicit 2^(N+1) x 2^(N+1) matrix of one flying-static encounter with
/// site k, in the basis {f, s1, ..., sN} (f most significant).
///
/// Built block by block: with m = 2^(N-k), the f-up/f-up quadrant carries
/// diagonal blocks 1_m, C_m, 1_m, C_m, ...; the f-down/f-down quadrant carries
/// C_m, 1_m, ...; the off-diagonal quadrants couple |up_f down_k> with
/// |down_f up_k> through S_m. C_m = cos(theta) 1_m, S_m = -i sin(theta) 1_m,
/// both multiplied by e^{i theta} for the Heisenberg model.
///
/// Test oracle only: N is limited to kMaxDenseOracleChain.
Eigen::MatrixXcd dense_interaction_matrix(int chain_length, int site,
                                          double theta, ExchangeModel model);

}  // namespace spinmem
