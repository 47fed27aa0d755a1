#include "spinmem/experiments/random_qubit.hpp"

#include <cmath>

namespace spinmem {

QubitState random_pure_qubit(PortableRng& rng) {
  const double ur = rng.normal();
  const double ui = rng.normal();
  const double dr = rng.normal();
  const double di = rng.normal();
  const double norm = std::sqrt(ur * ur + ui * ui + dr * dr + di * di);
  return {{ur / norm, ui / norm}, {dr / norm, di / norm}};
}

BlochVector bloch_vector(const QubitState& q) {
  // rho_01 = up * conj(down); <X> = 2 Re rho_01, <Y> = -2 Im rho_01.
  const Complex coh = q.up * std::conj(q.down);
  return {2.0 * coh.real(), -2.0 * coh.imag(),
          std::norm(q.up) - std::norm(q.down)};
}

}  // namespace spinmem
