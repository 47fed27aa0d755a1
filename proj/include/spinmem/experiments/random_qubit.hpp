#pragma once

#include "spinmem/linalg.hpp"
#include "spinmem/random.hpp"

namespace spinmem {

/// Haar-random pure qubit: two standard complex Gaussians, normalized. Draws
/// four normals from `rng` (re/im of the up amplitude, then of the down one).
QubitState random_pure_qubit(PortableRng& rng);

/// Bloch vector (<X>, <Y>, <Z>) of a pure qubit.
struct BlochVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
};
BlochVector bloch_vector(const QubitState& q);

}  // namespace spinmem
