#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "spinmem/linalg.hpp"

namespace spinmem {

/// Amplitude a_l(k) of a single down spin at chain site k (1-based) after a
/// stored |down> has been pushed l levels deeper by l further write passes of
/// spin-up qubits. Evaluated in the combined form
///
///   a_l(k) = -i sum_r (-1)^r C(k-1, r) C(l, r) sin^(2r+1) cos^(k-1+l-2r)
///
/// with r = 0..min(l, k-1), which stays finite at theta = pi/2.
Complex a1(int k, int l, double theta);

/// The same amplitude in factored hypergeometric form,
///   a_0(k) cos^l 2F1(1-k, -l; 1; -tan^2 theta),
/// valid for theta < pi/2 only. Used as an independent cross-check.
Complex a1_hypergeometric(int k, int l, double theta);

/// Amplitude of down spins at sites k1 < k2 after writing |down down>:
///   -sin^2 cos^(k1+k2-1) (2 - (k2-k1-2) tan^2)
/// rearranged so no tangent appears. Throws ValidationError unless
/// 1 <= k1 < k2.
Complex a2_00(int k1, int k2, double theta);

/// Upper bound on sum_{k > cutoff} f(k) for positive terms whose successive
/// ratio f(k+1)/f(k) is non-increasing: terms are summed explicitly until the
/// ratio drops below one, and the rest is bounded by a geometric series.
double ratio_tail_bound(const std::function<double(int)>& f, int cutoff);

/// Truncated one-down-flip distribution a_l(1..K).
struct DownflipDistribution1 {
  double theta = 0.0;
  int level = 0;
  /// amplitudes[k-1] = a_l(k).
  std::vector<Complex> amplitudes;
  /// Bound on the probability sum_{k > K} |a_l(k)|^2 that was cut off.
  double tail_bound = 0.0;

  int truncation_length() const { return static_cast<int>(amplitudes.size()); }
  Complex operator()(int k) const;
  double total_probability() const;
};

/// Bound on sum_{k > cutoff} |a_l(k)|^2 from
/// |a_l(k)| <= sin cos^(k-1-l) (cos^2 + (k-1) sin^2)^l.
double a1_tail_bound(int l, double theta, int cutoff, int moment_power = 0);

/// Smallest cutoff K >= l + 1 whose a1_tail_bound is below `tail_tol`.
int a1_truncation_length(int l, double theta, double tail_tol,
                         int moment_power = 0);

/// Closed-form distribution, truncated where the tail drops below
/// `tail_tol`.
DownflipDistribution1 distribution1(int l, double theta,
                                    double tail_tol = 1e-12);

/// Closed-form distribution over exactly 1..cutoff.
DownflipDistribution1 distribution1_truncated(int l, double theta, int cutoff);

/// One read step applied to a level-l distribution:
///
///   a'(k) = a_l(k) cos - sin^2 sum_{s >= 1} a_l(k+s) cos^(s-1)
///
/// evaluated on the stored truncation. The truncation error of each a'(k) is
/// bounded by sin sqrt(tail_bound); ToleranceError is thrown if that bound or
/// the deviation of any a'(k) from a1(k, l-1) exceeds `tol`.
DownflipDistribution1 decode_step(const DownflipDistribution1& dist,
                                  double tol = 1e-10);

/// Two-down-flip amplitudes a(k1, k2), 1 <= k1 < k2 <= K.
struct DownflipDistribution2 {
  double theta = 0.0;
  int cutoff = 0;
  /// Row-major upper triangle: entry (k1, k2) at index(k1, k2).
  std::vector<Complex> amplitudes;
  /// Bound on the probability in pairs with k2 > cutoff.
  double tail_bound = 0.0;

  static std::size_t index(int k1, int k2, int cutoff);
  Complex operator()(int k1, int k2) const;
  double total_probability() const;
};

DownflipDistribution2 distribution2(double theta, int cutoff);

/// Bound on sum over k1 < k2, k2 > cutoff of |a2_00(k1, k2)|^2.
double a2_tail_bound(double theta, int cutoff);

struct DistributionMoments {
  double mean = 0.0;
  double stddev = 0.0;
  int truncation = 0;
  /// Bound on the omitted part of sum k^2 |a|^2.
  double tail_bound = 0.0;
};

/// Site moments of |a_l(k)|^2 by direct truncated summation. With no
/// `cutoff`, one is chosen so the second-moment tail is below 1e-12; an
/// explicit cutoff that leaves a larger tail raises ToleranceError.
DistributionMoments moments(int l, double theta,
                            std::optional<int> cutoff = std::nullopt);

/// Level-0 closed forms: mean csc^2, standard deviation cos csc^2.
DistributionMoments moments_level0_closed_form(double theta);

}  // namespace spinmem
