#include "fourier_ns/small_data.hpp"

#include <cmath>
#include <stdexcept>

namespace fourier_ns {

namespace {

using Vector = Field::Vector;

/// Uniform sample from the unit ball of C^3 (as R^6) by rejection.
Vector unit_ball_sample(SeededRng& rng) {
  for (;;) {
    double x[6];
    double n2 = 0.0;
    for (double& v : x) {
      v = rng.uniform(-1.0, 1.0);
      n2 += v * v;
    }
    if (n2 <= 1.0) return Vector({x[0], x[1]}, {x[2], x[3]}, {x[4], x[5]});
  }
}

bool lexicographically_positive(const Eigen::Vector3i& p) {
  if (p.x() != 0) return p.x() > 0;
  if (p.y() != 0) return p.y() > 0;
  return p.z() > 0;
}

Eigen::Vector3d project_off(const Eigen::Vector3d& w, const Eigen::Vector3d& xi) {
  return w - xi * (xi.dot(w) / xi.squaredNorm());
}

}  // namespace

std::string_view to_string(DataKind kind) {
  switch (kind) {
    case DataKind::random_ball: return "random_ball";
    case DataKind::single_mode: return "single_mode";
    case DataKind::deterministic_profile: return "deterministic_profile";
  }
  return "unknown";
}

DataKind parse_data_kind(std::string_view name) {
  if (name == "random_ball") return DataKind::random_ball;
  if (name == "single_mode") return DataKind::single_mode;
  if (name == "deterministic_profile") return DataKind::deterministic_profile;
  throw std::invalid_argument("unknown data kind: " + std::string(name));
}

Field make_small_data(double eps, double radius, std::uint64_t seed, DataKind kind,
                      const SmallDataOptions& options) {
  if (!(eps > 0.0)) throw std::invalid_argument("make_small_data: eps must be positive");
  if (!(radius >= 1.0)) throw std::invalid_argument("make_small_data: radius must be >= 1");

  Field psi(radius, true);
  const auto& lat = psi.lattice();

  switch (kind) {
    case DataKind::random_ball: {
      SeededRng rng(seed);
      for (Eigen::Index i = 0; i < lat.size(); ++i) {
        const Eigen::Vector3i p = lat.point(i);
        if (!lexicographically_positive(p)) continue;
        Vector v = unit_ball_sample(rng) * (eps / (2.0 * double(lat.norm2(i))));
        if (options.solenoidal) {
          const Eigen::Vector3cd xi = p.cast<double>().cast<std::complex<double>>();
          v -= xi * (xi.dot(v) / xi.squaredNorm());
        }
        psi.values().col(i) = v;
        psi.values().col(lat.opposite(i)) = v.conjugate();
      }
      break;
    }
    case DataKind::single_mode: {
      const Eigen::Vector3i& m = options.mode;
      const Eigen::Index i = lat.find(m);
      if (i < 0) throw std::invalid_argument("make_small_data: mode outside truncation ball or zero");
      const Eigen::Vector3d xi = m.cast<double>();
      int axis = 0;
      for (int k = 1; k < 3; ++k)
        if (std::abs(m[k]) < std::abs(m[axis])) axis = k;
      Eigen::Vector3d dir = project_off(Eigen::Vector3d::Unit(axis), xi);
      dir /= dir.cwiseAbs().maxCoeff();
      const Vector v = (dir * (eps / (2.0 * xi.squaredNorm()))).cast<std::complex<double>>();
      psi.values().col(i) = v;
      psi.values().col(lat.opposite(i)) = v.conjugate();
      break;
    }
    case DataKind::deterministic_profile: {
      const Eigen::Vector3d w = Eigen::Vector3d(1.0, -1.0, 0.5) * (2.0 / 3.0);
      for (Eigen::Index i = 0; i < lat.size(); ++i) {
        const Eigen::Vector3d xi = lat.point(i).cast<double>();
        const double n2 = xi.squaredNorm();
        const Eigen::Vector3d d = options.solenoidal ? project_off(w, xi) : w;
        const double amp = eps / (2.0 * n2) * std::exp(-(n2 - 1.0) / (radius * radius));
        psi.values().col(i) = (d * amp).cast<std::complex<double>>();
      }
      break;
    }
  }
  return psi;
}

Field random_field(double radius, std::uint64_t seed, double scale) {
  Field f(radius, false);
  SeededRng rng(seed);
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < lat.size(); ++i)
    f.values().col(i) = unit_ball_sample(rng) * (scale / double(lat.norm2(i)));
  return f;
}

}  // namespace fourier_ns
