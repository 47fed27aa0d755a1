#include "spinmem/analytic/hypergeometric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "spinmem/errors.hpp"

namespace spinmem {

double hyp2f1_terminating(int a, int b, int c, double z) {
  if (a > 0 && b > 0) {
    throw ValidationError("2F1(" + std::to_string(a) + ", " +
                          std::to_string(b) +
                          "; c; z) does not terminate: one upper parameter "
                          "must be a nonpositive integer");
  }
  if (c <= 0) {
    throw ValidationError("2F1 lower parameter must be a positive integer, got " +
                          std::to_string(c));
  }
  // Terminate at the smaller nonpositive parameter so the sum is symmetric.
  int n = 0;
  if (a <= 0 && b <= 0) {
    n = std::min(-a, -b);
  } else {
    n = a <= 0 ? -a : -b;
  }
  double term = 1.0;
  double sum = 1.0;
  for (int r = 0; r < n; ++r) {
    term *= static_cast<double>(a + r) * static_cast<double>(b + r) /
            (static_cast<double>(c + r) * static_cast<double>(r + 1)) * z;
    sum += term;
  }
  return sum;
}

double pochhammer(double x, int n) {
  if (n < 0) throw ValidationError("pochhammer needs n >= 0");
  double p = 1.0;
  for (int i = 0; i < n; ++i) p *= x + i;
  return p;
}

double binomial(int n, int r) {
  if (r < 0 || r > n) return 0.0;
  r = std::min(r, n - r);
  double out = 1.0;
  for (int i = 1; i <= r; ++i) {
    out = out * static_cast<double>(n - r + i) / static_cast<double>(i);
  }
  return out < 0x1p53 ? std::round(out) : out;
}

namespace {

void check_nu(double nu) {
  if (!(nu > 0.0 && nu < 1.0)) {
    throw ValidationError("Meixner parameter nu must lie in (0, 1), got " +
                          std::to_string(nu));
  }
}

}  // namespace

double meixner_normalized(int j, int x, int mu, double nu) {
  check_nu(nu);
  if (j < 0 || x < 0) throw ValidationError("Meixner j and x must be >= 0");
  if (mu < 1) throw ValidationError("Meixner mu must be a positive integer");
  return std::pow(nu, 0.5 * j) * hyp2f1_terminating(-j, -x, mu, 1.0 - 1.0 / nu);
}

double meixner_weight(int x, int mu, double nu) {
  check_nu(nu);
  if (x < 0) throw ValidationError("Meixner x must be >= 0");
  if (mu < 1) throw ValidationError("Meixner mu must be a positive integer");
  if (mu == 1) return (1.0 - nu) * std::pow(nu, x);
  // (mu)_x / x! = prod_{i<x} (mu + i) / (i + 1), accumulated with nu^x so the
  // factorials never appear on their own.
  double w = std::pow(1.0 - nu, mu);
  for (int i = 0; i < x; ++i) {
    w *= (mu + i) / static_cast<double>(i + 1) * nu;
  }
  return w;
}

}  // namespace spinmem
