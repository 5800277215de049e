#pragma once

#include "fourier_ns/lattice.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace fourier_ns {

enum class DataKind { random_ball, single_mode, deterministic_profile };

std::string_view to_string(DataKind kind);
DataKind parse_data_kind(std::string_view name);

/// Name recorded in snapshot headers and manifests next to the seed.
inline constexpr std::string_view kGeneratorName = "mt19937_64/v1";

/// Seeded source of uniforms. Only raw engine output is used (no standard
/// distributions), so streams are identical across standard libraries.
class SeededRng {
 public:
  explicit SeededRng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return double(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

 private:
  std::mt19937_64 engine_;
};

struct SmallDataOptions {
  Eigen::Vector3i mode{1, 0, 0};  ///< single_mode only
  bool solenoidal = false;        ///< project onto xi . psi(xi) = 0
};

/// Hermitian initial data with phi2_norm < eps.
///
/// random_ball: psi(xi) = eps c_xi / (2|xi|^2), c_xi uniform in the unit ball of C^3.
/// single_mode: one Hermitian pair at `mode`, phi2_norm exactly eps / 2, pointing
///   along the coordinate axis least aligned with the mode (projected off the mode).
/// deterministic_profile: a fixed real even profile, Gaussian damped in |xi|.
Field make_small_data(double eps, double radius, std::uint64_t seed, DataKind kind,
                      const SmallDataOptions& options = {});

/// Seeded random field with entries of modulus <= scale / |xi|^2 (not Hermitian).
Field random_field(double radius, std::uint64_t seed, double scale = 1.0);

}  // namespace fourier_ns
