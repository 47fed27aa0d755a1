#include "spinmem/protocol/chain_sizing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "spinmem/errors.hpp"

namespace spinmem {

namespace {

double exponent_factor(EpsilonConvention c) {
  return c == EpsilonConvention::ProbabilityCos2N ? 2.0 : 1.0;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0 && epsilon < 1.0)) {
    throw ValidationError("epsilon must lie in (0, 1), got " +
                          std::to_string(epsilon));
  }
}

}  // namespace

std::string_view to_string(EpsilonConvention c) {
  return c == EpsilonConvention::ProbabilityCos2N ? "prob" : "amp";
}

EpsilonConvention parse_epsilon_convention(std::string_view text) {
  if (text == "prob") return EpsilonConvention::ProbabilityCos2N;
  if (text == "amp") return EpsilonConvention::AmplitudeCosN;
  throw ValidationError("unknown epsilon convention '" + std::string(text) +
                        "' (expected prob or amp)");
}

int min_chain_length(double theta, double epsilon, EpsilonConvention c) {
  check_epsilon(epsilon);
  if (theta == std::numbers::pi / 2) return 1;
  if (!(theta > 0.0 && theta < std::numbers::pi / 2)) {
    throw ValidationError("chain sizing needs 0 < theta < pi/2, got " +
                          std::to_string(theta));
  }
  const double p = exponent_factor(c);
  const double log_cos = std::log(std::cos(theta));
  const double bound = std::log(epsilon) / (p * log_cos);
  if (bound > 1e9) {
    throw ValidationError("theta too small: required chain exceeds 1e9 sites");
  }
  int n = std::max(1, static_cast<int>(std::floor(bound)) + 1);
  // Settle rounding at the boundary against the defining inequality.
  auto residual = [&](int sites) { return std::exp(p * sites * log_cos); };
  while (residual(n) >= epsilon) ++n;
  while (n > 1 && residual(n - 1) < epsilon) --n;
  return n;
}

double storage_angle(int sites, double epsilon, EpsilonConvention c) {
  check_epsilon(epsilon);
  if (sites < 1) throw ValidationError("storage needs at least one site");
  return std::acos(std::pow(epsilon, 1.0 / (exponent_factor(c) * sites)));
}

}  // namespace spinmem
