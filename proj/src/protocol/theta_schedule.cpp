#include "spinmem/protocol/theta_schedule.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "spinmem/errors.hpp"
#include "spinmem/random.hpp"

namespace spinmem {

ThetaSchedule::ThetaSchedule(std::vector<double> angles, bool per_site,
                             std::optional<std::uint64_t> seed)
    : angles_(std::move(angles)), per_site_(per_site), seed_(seed) {
  if (angles_.empty()) throw ValidationError("theta schedule is empty");
  for (double a : angles_) {
    if (!std::isfinite(a)) {
      throw ValidationError("theta schedule contains a non-finite angle");
    }
  }
}

ThetaSchedule ThetaSchedule::uniform(double theta) {
  return ThetaSchedule({theta}, false, std::nullopt);
}

ThetaSchedule ThetaSchedule::per_site(std::vector<double> angles) {
  return ThetaSchedule(std::move(angles), true, std::nullopt);
}

ThetaSchedule ThetaSchedule::random_band(double center, double frac_width,
                                         int sites, std::uint64_t seed) {
  if (sites < 1) throw ValidationError("random theta band needs sites >= 1");
  if (!(frac_width >= 0.0)) {
    throw ValidationError("theta band width must be >= 0");
  }
  PortableRng rng(seed);
  std::vector<double> angles(static_cast<std::size_t>(sites));
  for (double& a : angles) {
    a = center * rng.uniform(1.0 - frac_width, 1.0 + frac_width);
  }
  return ThetaSchedule(std::move(angles), true, seed);
}

double ThetaSchedule::angle(int k) const {
  if (!per_site_) return angles_.front();
  if (k < 1 || static_cast<std::size_t>(k) > angles_.size()) {
    throw ValidationError("theta schedule has no angle for site " +
                          std::to_string(k) + " (covers 1.." +
                          std::to_string(angles_.size()) + ")");
  }
  return angles_[static_cast<std::size_t>(k - 1)];
}

bool ThetaSchedule::covers(int chain_length) const {
  return !per_site_ || angles_.size() >= static_cast<std::size_t>(chain_length);
}

ThetaSchedule ThetaSchedule::scaled(double factor) const {
  std::vector<double> out = angles_;
  for (double& a : out) a *= factor;
  return ThetaSchedule(std::move(out), per_site_, seed_);
}

bool ThetaSchedule::in_checked_range() const {
  return std::all_of(angles_.begin(), angles_.end(), [](double a) {
    return a > 0.0 && a <= std::numbers::pi / 2 + 1e-15;
  });
}

}  // namespace spinmem
