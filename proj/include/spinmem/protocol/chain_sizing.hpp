#pragma once

#include <string_view>

namespace spinmem {

/// How the residual tolerance epsilon is compared with the leftover
/// flying-qubit amplitude after a write.
enum class EpsilonConvention {
  /// cos^(2N) theta < epsilon: residual probability.
  ProbabilityCos2N,
  /// cos^N theta < epsilon: residual amplitude.
  AmplitudeCosN,
};

std::string_view to_string(EpsilonConvention c);
/// Accepts "prob" / "amp".
EpsilonConvention parse_epsilon_convention(std::string_view text);

/// Smallest N for which the residual falls below epsilon. theta = pi/2 gives
/// 1; other angles must lie strictly inside (0, pi/2).
int min_chain_length(double theta, double epsilon, EpsilonConvention c);

/// Angle at which exactly `sites` spins bring the residual down to epsilon,
/// i.e. cos^sites theta = epsilon (amplitude) or cos^(2 sites) = epsilon.
double storage_angle(int sites, double epsilon, EpsilonConvention c);

}  // namespace spinmem
