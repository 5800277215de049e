#pragma once

#include "fourier_ns/convolution.hpp"
#include "fourier_ns/lattice.hpp"
#include "fourier_ns/lattice_sums.hpp"
#include "fourier_ns/symbol.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fourier_ns {

/// Squared norms of an admissible pair: xi, q and xi - q (all nonzero).
struct PairGeometry {
  std::int64_t xi2;
  std::int64_t q2;
  std::int64_t rest2;  ///< |xi - q|^2
};

PairGeometry pair_geometry(const Eigen::Vector3i& xi, const Eigen::Vector3i& q);

// ---------------------------------------------------------------------------
// Uniform-bound split of the convolution sum.
//   I:   |q| <  2|xi|,  |xi - q| <= |xi|/2
//   II:  |q| <  2|xi|,  |xi - q| >  |xi|/2
//   III: |q| >= 2|xi|

enum class ExistenceRegion { I, II, III };
inline constexpr std::array kExistenceRegions{ExistenceRegion::I, ExistenceRegion::II,
                                              ExistenceRegion::III};
std::string_view to_string(ExistenceRegion r);
bool in_region(ExistenceRegion r, const PairGeometry& g);
/// The unique region containing g; throws std::logic_error otherwise.
ExistenceRegion classify(const PairGeometry& g, std::span<const ExistenceRegion> regions);

// ---------------------------------------------------------------------------
// Bootstrap split around the thresholds k_{-1} <= k_m:
//   below:      |q| < k_{-1}  (and |q| < k_m)
//   between:    k_{-1} <= |q| < k_m
//   inner:      |q| >= k_m, |q| < |xi|/2
//   shell_far:  |q| >= k_m, |xi|/2 <= |q| < 2|xi|, |xi - q| >= k_m
//   shell_near: |q| >= k_m, |xi|/2 <= |q| < 2|xi|, |xi - q| <  k_m
//   outer:      |q| >= k_m, |q| >= 2|xi|

enum class RegularityRegion { below, between, inner, shell_far, shell_near, outer };
inline constexpr std::array kRegularityRegions{RegularityRegion::below,     RegularityRegion::between,
                                               RegularityRegion::inner,     RegularityRegion::shell_far,
                                               RegularityRegion::shell_near, RegularityRegion::outer};
std::string_view to_string(RegularityRegion r);
struct RegularityThresholds {
  double k_minus1;
  double k_m;
};
bool in_region(RegularityRegion r, const PairGeometry& g, const RegularityThresholds& k);

// ---------------------------------------------------------------------------
// Smoothing split. With a = |q|, b = |xi - q|, X = |xi| (a and b cannot both
// be below X/2):
//   I_a:   a < X/2, a <= sqrt(X)          I_b, II_b: same with a and b swapped
//   II_a:  a < X/2, a >  sqrt(X)
//   III_a: a, b >= X/2, a >= b, b <  2X    III_b, IV_b: b > a, tests on a
//   IV_a:  a, b >= X/2, a >= b, b >= 2X

enum class SmoothingRegion { I_a, II_a, III_a, IV_a, I_b, II_b, III_b, IV_b };
inline constexpr std::array kSmoothingRegions{SmoothingRegion::I_a,  SmoothingRegion::II_a,
                                              SmoothingRegion::III_a, SmoothingRegion::IV_a,
                                              SmoothingRegion::I_b,  SmoothingRegion::II_b,
                                              SmoothingRegion::III_b, SmoothingRegion::IV_b};
std::string_view to_string(SmoothingRegion r);
bool in_region(SmoothingRegion r, const PairGeometry& g);

/// Number of regions claiming g (1 for a partition).
template <typename Region, std::size_t N, typename... Extra>
int claim_count(const std::array<Region, N>& regions, const PairGeometry& g, const Extra&... extra) {
  int claims = 0;
  for (Region r : regions) claims += in_region(r, g, extra...) ? 1 : 0;
  return claims;
}

/// Region index of g, requiring exactly one claimant.
template <typename Region, std::size_t N, typename... Extra>
std::size_t region_index(const std::array<Region, N>& regions, const PairGeometry& g,
                         const Extra&... extra) {
  std::size_t found = N;
  for (std::size_t i = 0; i < N; ++i)
    if (in_region(regions[i], g, extra...)) {
      if (found != N) throw std::logic_error("region_index: overlapping regions");
      found = i;
    }
  if (found == N) throw std::logic_error("region_index: uncovered pair");
  return found;
}

/// Per-region bilinear partial sums of B(u, u)(xi). Each part is the largest
/// component modulus of the contracted partial sum; `total` is the same for the
/// full sum and `counts` the number of admissible q per region.
template <std::size_t N>
struct RegionSums {
  std::array<double, N> parts{};
  std::array<std::int64_t, N> counts{};
  double total = 0.0;
  double part_sum() const {
    double s = 0.0;
    for (double p : parts) s += p;
    return s;
  }
};

template <typename Real, std::size_t N, typename Locate>
RegionSums<N> region_sums(const SpectralField<Real>& u, const BilinearSymbol& sym,
                          const Frequency& xi, Locate locate) {
  using C = std::complex<Real>;
  using Mat3 = Eigen::Matrix<C, 3, 3>;
  const auto& lat = u.lattice();
  std::array<Mat3, N> w;
  for (auto& m : w) m.setZero();
  RegionSums<N> out;
  for (Eigen::Index q = 0; q < lat.size(); ++q) {
    const Eigen::Vector3i pq = lat.point(q);
    const Eigen::Index j = lat.find(xi.vec() - pq);
    if (j < 0) continue;
    const std::size_t r = locate(pair_geometry(xi.vec(), pq));
    ++out.counts[r];
    w[r].noalias() += u.values().col(q) * u.values().col(j).transpose();
  }
  Mat3 all = Mat3::Zero();
  for (std::size_t r = 0; r < N; ++r) {
    out.parts[r] = double(contract<Real>(sym, xi.vec(), w[r]).cwiseAbs().maxCoeff());
    all += w[r];
  }
  out.total = double(contract<Real>(sym, xi.vec(), all).cwiseAbs().maxCoeff());
  return out;
}

// ---------------------------------------------------------------------------

struct ShellReportExistence {
  std::array<double, 3> parts{};
  std::array<std::int64_t, 3> counts{};
  /// Per-region bounds 2 c0 S eps^2, 8 c0 S eps^2, 2 c4 S eps^2 with S the
  /// contraction constant and c0, c4 the measured lattice constants.
  std::array<double, 3> claimed_parts{};
  double total = 0.0;
  double claimed_bound = 0.0;  ///< sum of claimed_parts
  double effective_c = 0.0;    ///< (I + II + III) / eps^2
  double eps = 0.0;
  double measured_norm = 0.0;
  bool hypothesis_ok = true;  ///< phi2_norm(u) <= eps up to rounding
  bool within_claim() const {
    for (std::size_t r = 0; r < 3; ++r)
      if (parts[r] > claimed_parts[r]) return false;
    return true;
  }
};

template <typename Real>
ShellReportExistence shell_diagnostics_existence(const SpectralField<Real>& u, const BilinearSymbol& sym,
                                                 const Frequency& xi, double eps) {
  ShellReportExistence rep;
  rep.eps = eps;
  rep.measured_norm = double(phi2_norm(u));
  rep.hypothesis_ok = rep.measured_norm <= eps * (1.0 + 1e-12);
  const auto sums = region_sums<Real, 3>(u, sym, xi, [](const PairGeometry& g) {
    return region_index(kExistenceRegions, g);
  });
  rep.parts = sums.parts;
  rep.counts = sums.counts;
  rep.total = sums.total;
  rep.effective_c = sums.part_sum() / (eps * eps);

  const double radius = std::max(1.0, u.radius());
  const auto lc = measure_lattice_constants(2.0 * radius);
  const double s = contraction_constant(sym, radius) * eps * eps;
  rep.claimed_parts = {2.0 * lc.ball_inverse_square * s, 8.0 * lc.ball_inverse_square * s,
                       2.0 * lc.tail_inverse_fourth * s};
  rep.claimed_bound = rep.claimed_parts[0] + rep.claimed_parts[1] + rep.claimed_parts[2];
  return rep;
}

/// Upper bound on every existence-split aggregate: S (10 c0 + 2 c4).
double existence_constant_bound(const BilinearSymbol& sym, double radius);

// ---------------------------------------------------------------------------

/// Aggregate constant of the one-step bootstrap closure.
inline constexpr double kClosureConstant = 28.0;

struct RegularityShellParams {
  double k_minus1;
  double k_m;
  double eps;
  double mu_m;
};

struct ShellReportRegularity {
  std::array<double, 6> parts{};
  std::array<std::int64_t, 6> counts{};
  double total = 0.0;
  double part_sum = 0.0;
  /// part_sum / (S eps^(2 mu_m)), S the contraction constant of the symbol
  /// (the bound constant c for the worst-case symbol).
  double aggregate_constant = 0.0;
  double bound = 0.0;  ///< eps^(2 mu_m - 1)
  bool geometry_ok = true;  ///< |xi| >= 2 k_m
  bool closes() const { return aggregate_constant <= kClosureConstant; }
  bool pass() const { return total <= bound; }
};

template <typename Real>
ShellReportRegularity shell_diagnostics_regularity(const SpectralField<Real>& u, const BilinearSymbol& sym,
                                                   const Frequency& xi, const RegularityShellParams& p) {
  ShellReportRegularity rep;
  const RegularityThresholds k{p.k_minus1, p.k_m};
  const auto sums = region_sums<Real, 6>(u, sym, xi, [&](const PairGeometry& g) {
    return region_index(kRegularityRegions, g, k);
  });
  rep.parts = sums.parts;
  rep.counts = sums.counts;
  rep.total = sums.total;
  rep.part_sum = sums.part_sum();
  const double scale = std::pow(p.eps, 2.0 * p.mu_m);
  const double c = contraction_constant(sym, std::max(1.0, u.radius()));
  rep.aggregate_constant = c > 0.0 ? rep.part_sum / (c * scale) : 0.0;
  rep.bound = std::pow(p.eps, 2.0 * p.mu_m - 1.0);
  rep.geometry_ok = xi.norm() >= 2.0 * p.k_m;
  return rep;
}

/// Field saturating the bootstrap hypotheses: D/|q|^2 below k_{-1},
/// eps/|q|^2 up to k_m and eps^mu_m/|q|^2 above, equal in every component.
Field saturating_regularity_field(double radius, double D, const RegularityShellParams& p);

// ---------------------------------------------------------------------------

struct ShellReportSmoothing {
  std::array<double, 8> parts{};
  std::array<std::int64_t, 8> counts{};
  /// Explicit bounds from the region estimates with measured lattice constants.
  std::array<double, 8> claimed_parts{};
  double total = 0.0;
  double D = 0.0;
  double eta = 0.0;
  bool hypothesis_ok = true;  ///< |u^k(q)| <= D / |q|^(2 + eta) everywhere
  bool within_claim() const {
    for (std::size_t r = 0; r < 8; ++r)
      if (parts[r] > claimed_parts[r] * (1.0 + 1e-12)) return false;
    return true;
  }
};

/// Decay rate in |xi| that the region estimates predict for each part:
/// 1/2 + eta, 3 eta / 2, 2 eta, 2 eta (a and b alike).
std::array<double, 8> smoothing_claimed_rates(double eta);

/// Largest |u^k(q)| |q|^(2 + eta).
template <typename Real>
double decay_norm(const SpectralField<Real>& u, double eta) {
  double worst = 0.0;
  const auto& lat = u.lattice();
  for (Eigen::Index i = 0; i < u.size(); ++i)
    worst = std::max(worst, double(u.values().col(i).cwiseAbs().maxCoeff()) *
                                std::pow(double(lat.norm2(i)), 1.0 + 0.5 * eta));
  return worst;
}

std::array<double, 8> smoothing_claimed_parts(const BilinearSymbol& sym, double radius, double xi_norm,
                                              double D, double eta);

template <typename Real>
ShellReportSmoothing shell_diagnostics_smoothing(const SpectralField<Real>& u, const BilinearSymbol& sym,
                                                 const Frequency& xi, double D, double eta) {
  ShellReportSmoothing rep;
  rep.D = D;
  rep.eta = eta;
  rep.hypothesis_ok = decay_norm(u, eta) <= D * (1.0 + 1e-12);
  const auto sums = region_sums<Real, 8>(u, sym, xi, [](const PairGeometry& g) {
    return region_index(kSmoothingRegions, g);
  });
  rep.parts = sums.parts;
  rep.counts = sums.counts;
  rep.total = sums.total;
  rep.claimed_parts = smoothing_claimed_parts(sym, u.radius(), xi.norm(), D, eta);
  return rep;
}

/// Least-squares slope of -log(part) against log|xi| for each smoothing
/// region; NaN where a part vanishes at some sample.
template <typename Real>
std::array<double, 8> fit_smoothing_rates(const SpectralField<Real>& u, const BilinearSymbol& sym,
                                          std::span<const Frequency> samples, double D, double eta) {
  std::vector<ShellReportSmoothing> reps;
  for (const auto& xi : samples) reps.push_back(shell_diagnostics_smoothing(u, sym, xi, D, eta));
  std::array<double, 8> rates{};
  for (std::size_t r = 0; r < 8; ++r) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    bool ok = samples.size() >= 2;
    for (std::size_t s = 0; s < samples.size(); ++s) {
      if (!(reps[s].parts[r] > 0.0)) ok = false;
      const double x = std::log(samples[s].norm());
      const double y = ok ? std::log(reps[s].parts[r]) : 0.0;
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double m = double(samples.size());
    rates[r] = ok ? -(m * sxy - sx * sy) / (m * sxx - sx * sx) : std::nan("");
  }
  return rates;
}

/// Field u(q) = D / |q|^(2 + eta) in every component.
Field power_law_field(double radius, double D, double eta);

}  // namespace fourier_ns
