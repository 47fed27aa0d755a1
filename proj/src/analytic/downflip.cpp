#include "spinmem/analytic/downflip.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "spinmem/analytic/hypergeometric.hpp"
#include "spinmem/errors.hpp"

namespace spinmem {

namespace {

constexpr Complex kMinusI{0.0, -1.0};
constexpr int kMaxTruncation = 50'000'000;

void check_site(int k) {
  if (k < 1) throw ValidationError("site index must be >= 1, got " +
                                   std::to_string(k));
}

}  // namespace

Complex a1(int k, int l, double theta) {
  check_site(k);
  if (l < 0) throw ValidationError("level l must be >= 0");
  const auto [c, s] = cos_sin(theta);
  double sum = 0.0;
  for (int r = 0; r <= std::min(l, k - 1); ++r) {
    const double term = binomial(k - 1, r) * binomial(l, r) *
                        std::pow(s, 2 * r + 1) * std::pow(c, k - 1 + l - 2 * r);
    sum += (r % 2 == 0) ? term : -term;
  }
  return kMinusI * sum;
}

Complex a1_hypergeometric(int k, int l, double theta) {
  check_site(k);
  if (l < 0) throw ValidationError("level l must be >= 0");
  const double t = std::tan(theta);
  const Complex a0 = kMinusI * std::sin(theta) * std::pow(std::cos(theta), k - 1);
  return a0 * std::pow(std::cos(theta), l) *
         hyp2f1_terminating(1 - k, -l, 1, -t * t);
}

Complex a2_00(int k1, int k2, double theta) {
  if (k1 < 1 || k2 <= k1) {
    throw ValidationError("a2 needs 1 <= k1 < k2, got (" + std::to_string(k1) +
                          ", " + std::to_string(k2) + ")");
  }
  const auto [c, s] = cos_sin(theta);
  const double value =
      -s * s *
      (2.0 * std::pow(c, k1 + k2 - 1) -
       (k2 - k1 - 2) * s * s * std::pow(c, k1 + k2 - 3));
  return {value, 0.0};
}

double ratio_tail_bound(const std::function<double(int)>& f, int cutoff) {
  double acc = 0.0;
  for (int j = cutoff + 1; j < kMaxTruncation; ++j) {
    const double fj = f(j);
    if (fj == 0.0) return acc;
    const double r = f(j + 1) / fj;
    if (r < 1.0) return acc + fj / (1.0 - r);
    acc += fj;
  }
  throw ToleranceError("tail bound did not converge");
}

Complex DownflipDistribution1::operator()(int k) const {
  check_site(k);
  if (k > truncation_length()) return {0.0, 0.0};
  return amplitudes[static_cast<std::size_t>(k - 1)];
}

double DownflipDistribution1::total_probability() const {
  double p = 0.0;
  for (const Complex& a : amplitudes) p += std::norm(a);
  return p;
}

double a1_tail_bound(int l, double theta, int cutoff, int moment_power) {
  if (cutoff < l + 1) {
    throw ValidationError("a1 tail bound needs cutoff >= l + 1");
  }
  const auto [c, s] = cos_sin(theta);
  auto f = [&, c = c, s = s](int k) {
    const double amp = s * std::pow(c, k - 1 - l) *
                       std::pow(c * c + (k - 1) * s * s, l);
    return std::pow(static_cast<double>(k), moment_power) * amp * amp;
  };
  return ratio_tail_bound(f, cutoff);
}

int a1_truncation_length(int l, double theta, double tail_tol,
                         int moment_power) {
  int lo = l + 1;
  if (a1_tail_bound(l, theta, lo, moment_power) < tail_tol) return lo;
  int hi = 2 * lo;
  while (a1_tail_bound(l, theta, hi, moment_power) >= tail_tol) {
    lo = hi;
    hi *= 2;
    if (hi > kMaxTruncation) {
      throw ToleranceError("a1 distribution for theta = " +
                           std::to_string(theta) +
                           " needs more than the maximum truncation length");
    }
  }
  // Invariant: bound(lo) >= tol > bound(hi).
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (a1_tail_bound(l, theta, mid, moment_power) < tail_tol) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

DownflipDistribution1 distribution1_truncated(int l, double theta, int cutoff) {
  if (cutoff < 1) throw ValidationError("truncation length must be >= 1");
  DownflipDistribution1 d;
  d.theta = theta;
  d.level = l;
  d.amplitudes.resize(static_cast<std::size_t>(cutoff));
  for (int k = 1; k <= cutoff; ++k) {
    d.amplitudes[static_cast<std::size_t>(k - 1)] = a1(k, l, theta);
  }
  d.tail_bound = cutoff >= l + 1 ? a1_tail_bound(l, theta, cutoff) : 1.0;
  return d;
}

DownflipDistribution1 distribution1(int l, double theta, double tail_tol) {
  return distribution1_truncated(l, theta,
                                 a1_truncation_length(l, theta, tail_tol));
}

DownflipDistribution1 decode_step(const DownflipDistribution1& dist,
                                  double tol) {
  if (dist.level < 1) {
    throw ValidationError("decode_step needs a distribution at level >= 1");
  }
  const auto [c, s] = cos_sin(dist.theta);
  const double truncation_error = s * std::sqrt(dist.tail_bound);
  if (truncation_error > tol) {
    std::ostringstream os;
    os << "decode_step truncation error bound " << truncation_error
       << " exceeds tolerance " << tol << "; extend the input distribution";
    throw ToleranceError(os.str());
  }
  const int n = dist.truncation_length();
  DownflipDistribution1 out;
  out.theta = dist.theta;
  out.level = dist.level - 1;
  out.amplitudes.resize(static_cast<std::size_t>(n));
  // tail(k) = sum_{s>=1} a(k+s) cos^(s-1), accumulated from the far end.
  Complex tail{0.0, 0.0};
  for (int k = n; k >= 1; --k) {
    const Complex a = dist.amplitudes[static_cast<std::size_t>(k - 1)];
    out.amplitudes[static_cast<std::size_t>(k - 1)] = a * c - s * s * tail;
    tail = a + c * tail;
  }
  double worst = 0.0;
  int worst_k = 0;
  for (int k = 1; k <= n; ++k) {
    const double d =
        std::abs(out.amplitudes[static_cast<std::size_t>(k - 1)] -
                 a1(k, out.level, dist.theta));
    if (d > worst) {
      worst = d;
      worst_k = k;
    }
  }
  if (worst > tol) {
    std::ostringstream os;
    os << "decode_step from level " << dist.level << " deviates from a1(k, "
       << out.level << ") by " << worst << " at k = " << worst_k;
    throw ToleranceError(os.str());
  }
  out.tail_bound = n >= out.level + 1
                       ? a1_tail_bound(out.level, dist.theta, n)
                       : dist.tail_bound;
  return out;
}

std::size_t DownflipDistribution2::index(int k1, int k2, int cutoff) {
  // Rows k1 = 1..cutoff-1, row k1 holding k2 = k1+1..cutoff.
  const auto r = static_cast<std::size_t>(k1 - 1);
  const auto n = static_cast<std::size_t>(cutoff);
  const std::size_t row_start = r * n - r * (r + 1) / 2;
  return row_start + static_cast<std::size_t>(k2 - k1 - 1);
}

Complex DownflipDistribution2::operator()(int k1, int k2) const {
  if (k1 < 1 || k2 <= k1) {
    throw ValidationError("pair needs 1 <= k1 < k2");
  }
  if (k2 > cutoff) return {0.0, 0.0};
  return amplitudes[index(k1, k2, cutoff)];
}

double DownflipDistribution2::total_probability() const {
  double p = 0.0;
  for (const Complex& a : amplitudes) p += std::norm(a);
  return p;
}

double a2_tail_bound(double theta, int cutoff) {
  if (cutoff < 2) throw ValidationError("a2 tail bound needs cutoff >= 2");
  const auto [c, s] = cos_sin(theta);
  // |a(k1,k2)|^2 <= s^4 c^(2(k1+k2-3)) (2c^2 + k2 s^2)^2; summing k1 over
  // 1..k2-1 gives at most s^2 c^(2(k2-2)) (2c^2 + k2 s^2)^2.
  auto f = [c = c, s = s](int k2) {
    const double g = 2.0 * c * c + k2 * s * s;
    return s * s * std::pow(c, 2 * (k2 - 2)) * g * g;
  };
  return ratio_tail_bound(f, cutoff);
}

DownflipDistribution2 distribution2(double theta, int cutoff) {
  if (cutoff < 2) throw ValidationError("two-flip distribution needs K >= 2");
  DownflipDistribution2 d;
  d.theta = theta;
  d.cutoff = cutoff;
  const auto n = static_cast<std::size_t>(cutoff);
  d.amplitudes.resize(n * (n - 1) / 2);
  for (int k1 = 1; k1 < cutoff; ++k1) {
    for (int k2 = k1 + 1; k2 <= cutoff; ++k2) {
      d.amplitudes[DownflipDistribution2::index(k1, k2, cutoff)] =
          a2_00(k1, k2, theta);
    }
  }
  d.tail_bound = a2_tail_bound(theta, cutoff);
  return d;
}

DistributionMoments moments(int l, double theta, std::optional<int> cutoff) {
  constexpr double kTailTol = 1e-12;
  if (l < 0) throw ValidationError("level l must be >= 0");
  const int k_max =
      cutoff ? *cutoff : a1_truncation_length(l, theta, kTailTol, 2);
  if (k_max < l + 1) {
    throw ValidationError("moment truncation must reach past site l + 1");
  }
  DistributionMoments m;
  m.truncation = k_max;
  m.tail_bound = a1_tail_bound(l, theta, k_max, 2);
  if (m.tail_bound > kTailTol) {
    std::ostringstream os;
    os << "moment truncation at K = " << k_max << " leaves a tail of "
       << m.tail_bound << " (> " << kTailTol << ")";
    throw ToleranceError(os.str());
  }
  double first = 0.0;
  double second = 0.0;
  for (int k = 1; k <= k_max; ++k) {
    const double p = std::norm(a1(k, l, theta));
    first += k * p;
    second += static_cast<double>(k) * k * p;
  }
  m.mean = first;
  m.stddev = std::sqrt(std::max(0.0, second - first * first));
  return m;
}

DistributionMoments moments_level0_closed_form(double theta) {
  const auto [c, s] = cos_sin(theta);
  if (s == 0.0) throw ValidationError("moments undefined at theta = 0");
  DistributionMoments m;
  m.mean = 1.0 / (s * s);
  m.stddev = c / (s * s);
  return m;
}

}  // namespace spinmem
