#include "fourier_ns/lattice_sums.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace fourier_ns {

namespace {

double pairwise_range(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_range(v, half) + pairwise_range(v + half, n - half);
}

std::vector<std::int64_t> compute_shell_counts(std::int64_t max_norm2) {
  const int extent = int(std::floor(std::sqrt(double(max_norm2)))) + 1;
  std::vector<std::int64_t> r2(std::size_t(max_norm2) + 1, 0);
  for (int x = -extent; x <= extent; ++x)
    for (int y = -extent; y <= extent; ++y) {
      const std::int64_t m = std::int64_t(x) * x + std::int64_t(y) * y;
      if (m <= max_norm2) ++r2[std::size_t(m)];
    }
  std::vector<std::int64_t> r3(std::size_t(max_norm2) + 1, 0);
  for (int z = -extent; z <= extent; ++z) {
    const std::int64_t z2 = std::int64_t(z) * z;
    if (z2 > max_norm2) continue;
    for (std::int64_t m = 0; m + z2 <= max_norm2; ++m) r3[std::size_t(m + z2)] += r2[std::size_t(m)];
  }
  return r3;
}

}  // namespace

double pairwise_sum(std::span<const double> values) {
  return pairwise_range(values.data(), values.size());
}

std::vector<std::int64_t> shell_counts(std::int64_t max_norm2) {
  if (max_norm2 < 0) throw std::invalid_argument("shell_counts: negative bound");
  static std::mutex mutex;
  static std::vector<std::int64_t> cache;
  std::lock_guard lock(mutex);
  if (std::int64_t(cache.size()) <= max_norm2) cache = compute_shell_counts(max_norm2);
  return {cache.begin(), cache.begin() + max_norm2 + 1};
}

std::int64_t ball_count(double r) {
  if (r < 1.0) return 0;
  const auto n_max = std::int64_t(std::floor(r * r * (1.0 + 1e-14)));
  const auto counts = shell_counts(n_max);
  std::int64_t total = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) total += counts[std::size_t(n)];
  return total;
}

double inverse_power_tail_bound(double cutoff, int p) {
  constexpr double h = std::numbers::sqrt3 / 2.0;
  if (p <= 3) throw std::invalid_argument("inverse_power_tail_bound: divergent for p <= 3");
  const double b = cutoff - 2.0 * h;
  if (!(b > 0.0)) throw std::invalid_argument("inverse_power_tail_bound: cutoff must exceed sqrt(3)");
  // 4 pi * integral_b^inf (s + h)^2 s^-p ds
  const double integral = std::pow(b, 3 - p) / (p - 3) + 2.0 * h * std::pow(b, 2 - p) / (p - 2) +
                          h * h * std::pow(b, 1 - p) / (p - 1);
  return 4.0 * std::numbers::pi * integral;
}

ShellSum shell_sum_inverse_power(double r_lo, double r_hi, int p) {
  if (p <= 0) throw std::invalid_argument("shell_sum_inverse_power: p must be positive");
  if (!(r_lo >= 0.0)) throw std::invalid_argument("shell_sum_inverse_power: r_lo must be nonnegative");
  if (!(r_hi >= r_lo)) throw std::invalid_argument("shell_sum_inverse_power: requires r_lo <= r_hi");
  if (r_hi == r_lo) return {};
  const bool infinite = std::isinf(r_hi);
  if (infinite && p <= 3)
    throw std::invalid_argument("shell_sum_inverse_power: sum diverges for p <= 3 with infinite r_hi");

  const double lo = std::max(1.0, r_lo);
  ShellSum out;
  out.cutoff = infinite ? 4.0 * lo : r_hi;
  if (out.cutoff <= lo) return out;

  const double lo2 = lo * lo;
  const double hi2 = out.cutoff * out.cutoff;
  const auto n_max = std::int64_t(std::ceil(hi2));
  const auto counts = shell_counts(n_max);
  std::vector<double> terms;
  for (auto n = std::int64_t(std::ceil(lo2)); n <= n_max; ++n) {
    const double dn = double(n);
    if (dn < lo2 || dn >= hi2 || counts[std::size_t(n)] == 0) continue;
    terms.push_back(double(counts[std::size_t(n)]) * std::pow(dn, -0.5 * p));
  }
  out.enumerated = pairwise_sum(terms);
  if (infinite) out.tail_bound = inverse_power_tail_bound(out.cutoff, p);
  return out;
}

LatticeConstants measure_lattice_constants(double r_max) {
  if (!(r_max >= 1.0)) throw std::invalid_argument("measure_lattice_constants: r_max must be >= 1");
  static std::mutex mutex;
  static std::map<double, LatticeConstants> cache;
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(r_max); it != cache.end()) return it->second;
  }

  const auto n_max = std::int64_t(std::floor(r_max * r_max));
  const double cutoff = 4.0 * std::sqrt(double(n_max)) + 4.0;
  const auto n_cut = std::int64_t(std::ceil(cutoff * cutoff));
  const auto counts = shell_counts(n_cut);

  LatticeConstants c;
  c.r_max = r_max;

  double ball_sum = 0.0;
  std::int64_t ball_points = 0;
  for (std::int64_t n = 1; n <= n_max; ++n) {
    if (counts[std::size_t(n)] == 0) continue;
    ball_sum += double(counts[std::size_t(n)]) / double(n);
    ball_points += counts[std::size_t(n)];
    const double r = std::sqrt(double(n));
    c.ball_inverse_square = std::max(c.ball_inverse_square, ball_sum / r);
    c.ball_count = std::max(c.ball_count, double(ball_points) / (r * r * r));
  }

  // Suffix sums of |q|^-4 from the enumeration cutoff downwards.
  std::vector<double> suffix(std::size_t(n_max) + 2, 0.0);
  double acc = inverse_power_tail_bound(cutoff, 4);
  for (std::int64_t n = n_cut; n > n_max; --n)
    if (double(n) < cutoff * cutoff) acc += double(counts[std::size_t(n)]) / (double(n) * double(n));
  for (std::int64_t n = n_max; n >= 1; --n) {
    acc += double(counts[std::size_t(n)]) / (double(n) * double(n));
    suffix[std::size_t(n)] = acc;
  }
  for (std::int64_t n = 1; n <= n_max; ++n)
    c.tail_inverse_fourth = std::max(c.tail_inverse_fourth, std::sqrt(double(n)) * suffix[std::size_t(n)]);

  std::lock_guard lock(mutex);
  cache.emplace(r_max, c);
  return c;
}

}  // namespace fourier_ns
