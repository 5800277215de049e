#include "fourier_ns/shell_diagnostics.hpp"

namespace fourier_ns {

PairGeometry pair_geometry(const Eigen::Vector3i& xi, const Eigen::Vector3i& q) {
  const Eigen::Matrix<std::int64_t, 3, 1> x = xi.cast<std::int64_t>();
  const Eigen::Matrix<std::int64_t, 3, 1> a = q.cast<std::int64_t>();
  return {x.squaredNorm(), a.squaredNorm(), (x - a).squaredNorm()};
}

std::string_view to_string(ExistenceRegion r) {
  switch (r) {
    case ExistenceRegion::I: return "I";
    case ExistenceRegion::II: return "II";
    case ExistenceRegion::III: return "III";
  }
  return "?";
}

bool in_region(ExistenceRegion r, const PairGeometry& g) {
  const bool near = g.q2 < 4 * g.xi2;
  switch (r) {
    case ExistenceRegion::I: return near && 4 * g.rest2 <= g.xi2;
    case ExistenceRegion::II: return near && 4 * g.rest2 > g.xi2;
    case ExistenceRegion::III: return g.q2 >= 4 * g.xi2;
  }
  return false;
}

ExistenceRegion classify(const PairGeometry& g, std::span<const ExistenceRegion> regions) {
  std::optional<ExistenceRegion> found;
  for (ExistenceRegion r : regions)
    if (in_region(r, g)) {
      if (found) throw std::logic_error("classify: overlapping regions");
      found = r;
    }
  if (!found) throw std::logic_error("classify: uncovered pair");
  return *found;
}

std::string_view to_string(RegularityRegion r) {
  switch (r) {
    case RegularityRegion::below: return "below";
    case RegularityRegion::between: return "between";
    case RegularityRegion::inner: return "inner";
    case RegularityRegion::shell_far: return "shell_far";
    case RegularityRegion::shell_near: return "shell_near";
    case RegularityRegion::outer: return "outer";
  }
  return "?";
}

bool in_region(RegularityRegion r, const PairGeometry& g, const RegularityThresholds& k) {
  const double a2 = double(g.q2);
  const double km2 = k.k_m * k.k_m;
  const double kl2 = k.k_minus1 * k.k_minus1;
  const bool high = a2 >= km2;
  const bool shell = 4 * g.q2 >= g.xi2 && g.q2 < 4 * g.xi2;
  switch (r) {
    case RegularityRegion::below: return a2 < kl2 && !high;
    case RegularityRegion::between: return a2 >= kl2 && !high;
    case RegularityRegion::inner: return high && 4 * g.q2 < g.xi2;
    case RegularityRegion::shell_far: return high && shell && double(g.rest2) >= km2;
    case RegularityRegion::shell_near: return high && shell && double(g.rest2) < km2;
    case RegularityRegion::outer: return high && g.q2 >= 4 * g.xi2;
  }
  return false;
}

std::string_view to_string(SmoothingRegion r) {
  switch (r) {
    case SmoothingRegion::I_a: return "I_a";
    case SmoothingRegion::II_a: return "II_a";
    case SmoothingRegion::III_a: return "III_a";
    case SmoothingRegion::IV_a: return "IV_a";
    case SmoothingRegion::I_b: return "I_b";
    case SmoothingRegion::II_b: return "II_b";
    case SmoothingRegion::III_b: return "III_b";
    case SmoothingRegion::IV_b: return "IV_b";
  }
  return "?";
}

bool in_region(SmoothingRegion r, const PairGeometry& g) {
  const std::int64_t x2 = g.xi2;
  // small side: 4 s2 < X2; split on s <= sqrt(X), i.e. s2^2 <= X2
  auto small = [&](std::int64_t s2) { return 4 * s2 < x2; };
  auto inner = [&](std::int64_t s2) { return s2 * s2 <= x2; };
  const bool big = !small(g.q2) && !small(g.rest2);
  switch (r) {
    case SmoothingRegion::I_a: return small(g.q2) && inner(g.q2);
    case SmoothingRegion::II_a: return small(g.q2) && !inner(g.q2);
    case SmoothingRegion::I_b: return small(g.rest2) && inner(g.rest2);
    case SmoothingRegion::II_b: return small(g.rest2) && !inner(g.rest2);
    case SmoothingRegion::III_a: return big && g.q2 >= g.rest2 && g.rest2 < 4 * x2;
    case SmoothingRegion::IV_a: return big && g.q2 >= g.rest2 && g.rest2 >= 4 * x2;
    case SmoothingRegion::III_b: return big && g.rest2 > g.q2 && g.q2 < 4 * x2;
    case SmoothingRegion::IV_b: return big && g.rest2 > g.q2 && g.q2 >= 4 * x2;
  }
  return false;
}

double existence_constant_bound(const BilinearSymbol& sym, double radius) {
  const auto lc = measure_lattice_constants(2.0 * std::max(1.0, radius));
  return contraction_constant(sym, std::max(1.0, radius)) *
         (10.0 * lc.ball_inverse_square + 2.0 * lc.tail_inverse_fourth);
}

Field saturating_regularity_field(double radius, double D, const RegularityShellParams& p) {
  Field f(radius, true);
  const auto& lat = f.lattice();
  const double top = std::pow(p.eps, p.mu_m);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double n2 = double(lat.norm2(i));
    const double level = n2 < p.k_minus1 * p.k_minus1 ? D : n2 < p.k_m * p.k_m ? p.eps : top;
    f.values().col(i).setConstant(std::complex<double>(level / n2, 0.0));
  }
  return f;
}

std::array<double, 8> smoothing_claimed_rates(double eta) {
  const double r1 = 0.5 + eta, r2 = 1.5 * eta, r3 = 2.0 * eta;
  return {r1, r2, r3, r3, r1, r2, r3, r3};
}

std::array<double, 8> smoothing_claimed_parts(const BilinearSymbol& sym, double radius, double xi_norm,
                                              double D, double eta) {
  const double r = std::max(1.0, radius);
  const auto lc = measure_lattice_constants(2.0 * r);
  const double s = contraction_constant(sym, r) * D * D;
  const double x = xi_norm;
  const double c0 = lc.ball_inverse_square, c4 = lc.tail_inverse_fourth;
  const double i = s * c0 * std::pow(2.0, 2.0 + eta) * std::pow(x, -0.5 - eta);
  const double ii = s * c0 * std::pow(2.0, 1.0 + eta) * std::pow(x, -1.5 * eta);
  const double iii = s * c4 * std::pow(2.0, 1.0 + 2.0 * eta) * std::pow(x, -2.0 * eta);
  const double iv = s * c4 * std::pow(2.0, -1.0 - 2.0 * eta) * std::pow(x, -2.0 * eta);
  return {i, ii, iii, iv, i, ii, iii, iv};
}

Field power_law_field(double radius, double D, double eta) {
  Field f(radius, true);
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f.values().col(i).setConstant(
        std::complex<double>(D * std::pow(double(lat.norm2(i)), -1.0 - 0.5 * eta), 0.0));
  return f;
}

}  // namespace fourier_ns
