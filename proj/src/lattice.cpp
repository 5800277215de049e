#include "fourier_ns/lattice.hpp"

#include <cmath>
#include <map>
#include <mutex>

namespace fourier_ns {

namespace {

std::int64_t max_norm2_for(double radius) {
  if (!(radius >= 0.0) || !std::isfinite(radius))
    throw std::invalid_argument("BallLattice: radius must be finite and nonnegative");
  // Integer radii are the common case; the slack absorbs rounding in R*R.
  return std::int64_t(std::floor(radius * radius * (1.0 + 1e-14)));
}

}  // namespace

BallLattice::BallLattice(double radius)
    : radius_(radius),
      max_norm2_(max_norm2_for(radius)),
      extent_(int(std::floor(std::sqrt(double(max_norm2_)) + 1e-12))) {
  while (std::int64_t(extent_ + 1) * (extent_ + 1) <= max_norm2_) ++extent_;
  while (extent_ > 0 && std::int64_t(extent_) * extent_ > max_norm2_) --extent_;

  const int side = 2 * extent_ + 1;
  cube_.assign(std::size_t(side) * side * side, -1);

  std::vector<Eigen::Vector3i> pts;
  for (int x = -extent_; x <= extent_; ++x)
    for (int y = -extent_; y <= extent_; ++y)
      for (int z = -extent_; z <= extent_; ++z) {
        const std::int64_t n2 = std::int64_t(x) * x + std::int64_t(y) * y + std::int64_t(z) * z;
        if (n2 == 0 || n2 > max_norm2_) continue;
        cube_[cube_offset(x, y, z)] = Index(pts.size());
        pts.emplace_back(x, y, z);
        norm2_.push_back(n2);
      }

  points_.resize(3, Index(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) points_.col(Index(i)) = pts[i];

  opposite_.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) opposite_[i] = find(-pts[i]);
}

std::shared_ptr<const BallLattice> BallLattice::get(double radius) {
  static std::mutex mutex;
  static std::map<double, std::weak_ptr<const BallLattice>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[radius];
  if (auto existing = slot.lock()) return existing;
  auto created = std::make_shared<const BallLattice>(radius);
  slot = created;
  return created;
}

}  // namespace fourier_ns
