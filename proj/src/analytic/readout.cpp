#include "spinmem/analytic/readout.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinmem/errors.hpp"

namespace spinmem {

ReadoutResidual readout_residuals(Complex beta, double theta, Complex phase) {
  const auto [c, s] = cos_sin(theta);
  const Complex p2 = phase * phase;
  const Complex denom = 1.0 - p2 * c * c;
  if (std::abs(denom) <= 1e-12) {
    throw ValidationError("read-out denominator vanishes at theta = " +
                          std::to_string(theta));
  }
  ReadoutResidual r;
  r.beta = beta;
  r.theta = theta;
  r.phase = phase;
  r.beta_prime = -beta * p2 * s * s / denom;
  return r;
}

ReadoutResidual heisenberg_readout(Complex beta, double theta) {
  return readout_residuals(beta, theta, std::polar(1.0, theta));
}

Complex ReadoutResidual::gamma(int k) const {
  if (k < 1) throw ValidationError("gamma_k needs k >= 1");
  const auto [c, s] = cos_sin(theta);
  const Complex p2 = phase * phase;
  return Complex{0.0, -1.0} * beta * s * std::pow(c, k) *
         std::pow(phase, k + 1) * (1.0 - p2) / (1.0 - p2 * c * c);
}

std::vector<Complex> ReadoutResidual::gammas(int cutoff) const {
  std::vector<Complex> out;
  out.reserve(static_cast<std::size_t>(std::max(cutoff, 0)));
  for (int k = 1; k <= cutoff; ++k) out.push_back(gamma(k));
  return out;
}

}  // namespace spinmem
