#pragma once

// Independent reference implementations for the unit tests: plain triple
// loops over integer cubes and full symbol tensors, no shared fast paths.

#include "fourier_ns/lattice.hpp"
#include "fourier_ns/symbol.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <tuple>
#include <vector>

namespace oracle {

using fourier_ns::Field;
using Key = std::tuple<int, int, int>;
using Vec3 = Eigen::Vector3cd;

inline std::vector<Eigen::Vector3i> ball_points(double r) {
  std::vector<Eigen::Vector3i> pts;
  const int e = int(std::floor(r)) + 1;
  for (int x = -e; x <= e; ++x)
    for (int y = -e; y <= e; ++y)
      for (int z = -e; z <= e; ++z) {
        const long long n2 = 1LL * x * x + 1LL * y * y + 1LL * z * z;
        if (n2 > 0 && double(n2) <= r * r) pts.emplace_back(x, y, z);
      }
  return pts;
}

inline std::map<Key, Vec3> to_map(const Field& f) {
  std::map<Key, Vec3> m;
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const auto p = lat.point(i);
    m[{p.x(), p.y(), p.z()}] = f.values().col(i);
  }
  return m;
}

/// B(u, v)(xi) by enumerating q over the ball and contracting the full tensor.
inline Field bilinear(const Field& u, const Field& v, const fourier_ns::BilinearSymbol& sym) {
  const auto mu = to_map(u), mv = to_map(v);
  Field out(u.radius());
  const auto& lat = out.lattice();
  for (Eigen::Index n = 0; n < out.size(); ++n) {
    const Eigen::Vector3i xi = lat.point(n);
    const auto m = fourier_ns::eval_symbol<double>(sym, fourier_ns::Frequency(xi));
    Vec3 acc = Vec3::Zero();
    for (const auto& [q, uq] : mu) {
      const Key r{xi.x() - std::get<0>(q), xi.y() - std::get<1>(q), xi.z() - std::get<2>(q)};
      const auto it = mv.find(r);
      if (it == mv.end()) continue;
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) acc[k] += m[std::size_t(k)](i, j) * uq[i] * it->second[j];
    }
    out.values().col(n) = acc;
  }
  return out;
}

inline double max_abs(const Field& f) { return f.size() ? f.values().cwiseAbs().maxCoeff() : 0.0; }

/// Unique scratch directory under the system temp path.
inline std::filesystem::path scratch_dir(const std::string& tag) {
  std::random_device rd;
  auto p = std::filesystem::temp_directory_path() / ("fourier_ns_" + tag + "_" + std::to_string(rd()));
  std::filesystem::create_directories(p);
  return p;
}

}  // namespace oracle
