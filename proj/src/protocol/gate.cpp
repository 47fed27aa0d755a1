#include "spinmem/protocol/gate.hpp"

#include <cmath>
#include <numbers>

namespace spinmem {

bool TwoSpinGate::in_checked_range() const {
  return theta > 0.0 && theta <= std::numbers::pi / 2 + 1e-15;
}

Gate4 interaction_unitary(const TwoSpinGate& gate) {
  const Complex phase = gate.model == ExchangeModel::Heisenberg
                            ? std::polar(1.0, gate.theta)
                            : Complex{1.0, 0.0};
  const auto [cos_t, sin_t] = cos_sin(gate.theta);
  const Complex c = cos_t * phase;
  const Complex s = Complex{0.0, -sin_t} * phase;
  Gate4 u = Gate4::Zero();
  u(0, 0) = 1.0;
  u(1, 1) = c;
  u(1, 2) = s;
  u(2, 1) = s;
  u(2, 2) = c;
  u(3, 3) = 1.0;
  return u;
}

}  // namespace spinmem
