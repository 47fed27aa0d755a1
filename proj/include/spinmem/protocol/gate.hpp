#pragma once

#include "spinmem/linalg.hpp"

namespace spinmem {

/// One flying-static encounter, characterized by the accumulated exchange
/// angle theta (the time integral of the coupling over hbar).
struct TwoSpinGate {
  double theta = 0.0;
  ExchangeModel model = ExchangeModel::XY;

  /// theta in (0, pi/2]. Other finite angles are usable but flagged.
  bool in_checked_range() const;
};

/// 4x4 unitary in the basis |up_f up_s>, |up_f down_s>, |down_f up_s>,
/// |down_f down_s>:
///
///   XY:          corners 1, central block [[cos, -i sin], [-i sin, cos]]
///   Heisenberg:  same, central block multiplied by e^{i theta}
///
/// At theta = pi/2 the XY gate is SWAP up to -i on the swapped block; the
/// Heisenberg gate is an exact SWAP.
Gate4 interaction_unitary(const TwoSpinGate& gate);

}  // namespace spinmem
