#pragma once

namespace spinmem {

/// Gauss hypergeometric 2F1(a, b; c; z) for a terminating series: at least
/// one of a, b is a nonpositive integer, so the sum
///
///   sum_{r=0}^{min(-a,-b)} (a)_r (b)_r / ((c)_r r!) z^r
///
/// is finite. Symmetric in (a, b). Throws ValidationError if neither a nor b
/// is <= 0, or if c <= 0.
double hyp2f1_terminating(int a, int b, int c, double z);

/// Rising factorial (x)_n = x (x+1) ... (x+n-1), evaluated by iteration.
double pochhammer(double x, int n);

/// Binomial coefficient as a double, exact for the magnitudes used here.
double binomial(int n, int r);

/// Normalized Meixner polynomial
///
///   M'_j(x; mu, nu) = nu^(j/2) 2F1(-j, -x; mu; 1 - 1/nu).
///
/// Together with meixner_weight these are orthonormal for mu = 1, which is
/// the case that describes the one-down-flip amplitudes. For other mu the
/// squared norm is j! / (mu)_j.
double meixner_normalized(int j, int x, int mu, double nu);

/// Weight omega(x; mu, nu) = (1 - nu)^mu (mu)_x / x! nu^x. For mu = 1 this
/// reduces to (1 - nu) nu^x, which is evaluated directly.
double meixner_weight(int x, int mu, double nu);

}  // namespace spinmem
