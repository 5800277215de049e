#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace fourier_ns {

/// Pairwise (fixed binary tree) summation; the tree shape depends only on the
/// input length, so results are reproducible bit for bit.
double pairwise_sum(std::span<const double> values);

/// Number of integer points with |q|^2 == n, for n = 0..max_norm2 (entry 0 is
/// the origin). Computed once and cached; larger requests extend the cache.
std::vector<std::int64_t> shell_counts(std::int64_t max_norm2);

/// Number of nonzero lattice points with |q| <= r.
std::int64_t ball_count(double r);

struct ShellSum {
  double enumerated = 0.0;  ///< exact sum over the enumerated range
  double tail_bound = 0.0;  ///< upper bound for the part beyond `cutoff` (0 for finite ranges)
  double cutoff = 0.0;      ///< enumeration stopped at |q| < cutoff
  double upper() const { return enumerated + tail_bound; }
};

/// Sum over lattice q with max(1, r_lo) <= |q| < r_hi of |q|^-p.
///
/// r_hi may be +infinity when p >= 4: the range max(1, r_lo) <= |q| < 4 max(1, r_lo)
/// is enumerated and the rest is bounded by the integral of (|x| - sqrt(3)/2)^-p
/// over |x| >= cutoff - sqrt(3)/2, which dominates every unit cube around a
/// remaining lattice point.
ShellSum shell_sum_inverse_power(double r_lo, double r_hi, int p);

/// Upper bound for the sum over |q| >= cutoff of |q|^-p (p > 3, cutoff > sqrt(3)).
double inverse_power_tail_bound(double cutoff, int p);

/// Lattice constants measured by enumeration, valid for radii r in (0, r_max]:
///   sum_{1<=|q|<=r} |q|^-2 <= ball_inverse_square * r
///   sum_{|q|>=r} |q|^-4    <= tail_inverse_fourth / r
///   #{1<=|q|<=r}           <= ball_count * r^3
struct LatticeConstants {
  double r_max = 0.0;
  double ball_inverse_square = 0.0;
  double tail_inverse_fourth = 0.0;
  double ball_count = 0.0;
};

/// Constants are suprema over the jump points r = sqrt(n), where each ratio
/// attains its supremum over the continuum of radii. Results are cached per r_max.
LatticeConstants measure_lattice_constants(double r_max);

}  // namespace fourier_ns
