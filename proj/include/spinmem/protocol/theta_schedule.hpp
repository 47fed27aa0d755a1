#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace spinmem {

/// Exchange angles theta_k for the sites of one pass.
///
/// A uniform schedule has a single angle for every site. Per-site and random
/// band schedules carry an explicit list and only cover chains up to its
/// length. Random schedules remember the seed that produced them.
class ThetaSchedule {
 public:
  static ThetaSchedule uniform(double theta);
  static ThetaSchedule per_site(std::vector<double> angles);
  /// theta_k drawn uniformly from center * (1 - frac_width, 1 + frac_width).
  static ThetaSchedule random_band(double center, double frac_width, int sites,
                                   std::uint64_t seed);

  /// Angle at 1-based site k.
  double angle(int k) const;
  bool is_uniform() const { return angles_.size() == 1 && !per_site_; }
  std::optional<std::uint64_t> seed() const { return seed_; }
  bool covers(int chain_length) const;
  std::span<const double> angles() const { return angles_; }

  /// Every angle multiplied by `factor` (a fractional mismatch chi gives
  /// factor 1 + chi).
  ThetaSchedule scaled(double factor) const;

  /// All angles in (0, pi/2].
  bool in_checked_range() const;

 private:
  ThetaSchedule(std::vector<double> angles, bool per_site,
                std::optional<std::uint64_t> seed);

  std::vector<double> angles_;
  bool per_site_ = false;
  std::optional<std::uint64_t> seed_;
};

}  // namespace spinmem
