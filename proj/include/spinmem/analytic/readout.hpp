#pragma once

#include <vector>

#include "spinmem/linalg.hpp"

namespace spinmem {

/// Residual amplitudes after writing beta |down> into a long chain and
/// reading it back with the Heisenberg gate (phase p = e^{i theta} on every
/// trigonometric term):
///
///   beta'   = -beta p^2 sin^2 / (1 - p^2 cos^2)
///   gamma_k = -i beta sin cos^k p^(k+1) (1 - p^2) / (1 - p^2 cos^2)
///
/// beta' is the probe's down amplitude and gamma_k the amplitude left on
/// chain site k. Setting p = 1 recovers the XY read-out, beta' = -beta and
/// gamma_k = 0.
struct ReadoutResidual {
  Complex beta_prime;
  Complex beta;
  double theta = 0.0;
  Complex phase{1.0, 0.0};

  Complex gamma(int k) const;
  /// gamma_1..gamma_K.
  std::vector<Complex> gammas(int cutoff) const;
};

/// Read-out with an arbitrary unit phase p on the trigonometric terms.
/// Throws ValidationError if |1 - p^2 cos^2| <= 1e-12.
ReadoutResidual readout_residuals(Complex beta, double theta, Complex phase);

ReadoutResidual heisenberg_readout(Complex beta, double theta);

}  // namespace spinmem
