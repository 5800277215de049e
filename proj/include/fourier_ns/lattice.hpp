#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

namespace fourier_ns {

/// Nonzero integer frequency in Z^3.
class Frequency {
 public:
  Frequency(int x, int y, int z) : c_(x, y, z) {
    if (x == 0 && y == 0 && z == 0)
      throw std::invalid_argument("Frequency: the zero mode is excluded");
  }
  explicit Frequency(const Eigen::Vector3i& c) : Frequency(c.x(), c.y(), c.z()) {}

  int operator[](int i) const { return c_[i]; }
  const Eigen::Vector3i& vec() const { return c_; }
  std::int64_t norm2() const {
    return std::int64_t(c_.x()) * c_.x() + std::int64_t(c_.y()) * c_.y() +
           std::int64_t(c_.z()) * c_.z();
  }
  double norm() const { return std::sqrt(double(norm2())); }
  Frequency operator-() const { return Frequency(-c_); }

  friend bool operator==(const Frequency& a, const Frequency& b) { return a.c_ == b.c_; }

 private:
  Eigen::Vector3i c_;
};

/// Integer points 0 < |xi| <= R in lexicographic (x, y, z) order, with a
/// dense cube lookup. Instances are shared between fields of equal radius.
class BallLattice {
 public:
  using Index = Eigen::Index;

  static std::shared_ptr<const BallLattice> get(double radius);

  double radius() const { return radius_; }
  std::int64_t max_norm2() const { return max_norm2_; }
  /// Largest |component| of any stored point, floor(R).
  int extent() const { return extent_; }
  Index size() const { return Index(points_.cols()); }

  const Eigen::Matrix<int, 3, Eigen::Dynamic>& points() const { return points_; }
  Eigen::Vector3i point(Index i) const { return points_.col(i); }
  Frequency frequency(Index i) const { return Frequency(points_.col(i)); }
  std::int64_t norm2(Index i) const { return norm2_[std::size_t(i)]; }
  const std::vector<std::int64_t>& norm2s() const { return norm2_; }

  /// Index of (x, y, z), or -1 when outside the ball or at the origin.
  Index find(int x, int y, int z) const {
    if (x < -extent_ || x > extent_ || y < -extent_ || y > extent_ || z < -extent_ ||
        z > extent_)
      return -1;
    return cube_[cube_offset(x, y, z)];
  }
  Index find(const Eigen::Vector3i& p) const { return find(p.x(), p.y(), p.z()); }
  Index find(const Frequency& f) const { return find(f.vec()); }
  /// Index of -xi for the point stored at i.
  Index opposite(Index i) const { return opposite_[std::size_t(i)]; }

  explicit BallLattice(double radius);

 private:
  std::size_t cube_offset(int x, int y, int z) const {
    const std::size_t side = std::size_t(2 * extent_ + 1);
    return (std::size_t(x + extent_) * side + std::size_t(y + extent_)) * side +
           std::size_t(z + extent_);
  }

  double radius_;
  std::int64_t max_norm2_;
  int extent_;
  Eigen::Matrix<int, 3, Eigen::Dynamic> points_;
  std::vector<std::int64_t> norm2_;
  std::vector<Index> cube_;
  std::vector<Index> opposite_;
};

/// Truncated Fourier field: complex 3-vectors on the frequencies 0 < |xi| <= R.
/// Storage is dense over the ball; frequencies without data hold zero.
template <typename Real>
class SpectralField {
 public:
  using Scalar = std::complex<Real>;
  using Vector = Eigen::Matrix<Scalar, 3, 1>;
  using Values = Eigen::Matrix<Scalar, 3, Eigen::Dynamic>;
  using Index = Eigen::Index;

  explicit SpectralField(double radius, bool hermitian = false)
      : SpectralField(BallLattice::get(radius), hermitian) {}

  explicit SpectralField(std::shared_ptr<const BallLattice> lattice, bool hermitian = false)
      : lattice_(std::move(lattice)),
        values_(Values::Zero(3, lattice_->size())),
        hermitian_(hermitian) {}

  SpectralField(std::shared_ptr<const BallLattice> lattice, Values values, bool hermitian)
      : lattice_(std::move(lattice)), values_(std::move(values)), hermitian_(hermitian) {
    if (values_.cols() != lattice_->size())
      throw std::invalid_argument("SpectralField: value count does not match lattice");
  }

  double radius() const { return lattice_->radius(); }
  bool hermitian() const { return hermitian_; }
  void set_hermitian(bool h) { hermitian_ = h; }

  const BallLattice& lattice() const { return *lattice_; }
  const std::shared_ptr<const BallLattice>& lattice_ptr() const { return lattice_; }
  Index size() const { return values_.cols(); }

  Values& values() { return values_; }
  const Values& values() const { return values_; }

  /// Value at xi; zero outside the truncation ball.
  Vector at(const Frequency& xi) const {
    const Index i = lattice_->find(xi);
    return i < 0 ? Vector::Zero() : Vector(values_.col(i));
  }
  void set(const Frequency& xi, const Vector& v) {
    const Index i = lattice_->find(xi);
    if (i < 0) throw std::out_of_range("SpectralField::set: frequency outside truncation ball");
    values_.col(i) = v;
  }

  bool same_radius(const SpectralField& other) const {
    return lattice_ == other.lattice_ || radius() == other.radius();
  }

  SpectralField& operator+=(const SpectralField& o) {
    require_same_radius(o);
    values_ += o.values_;
    hermitian_ = hermitian_ && o.hermitian_;
    return *this;
  }
  SpectralField& operator-=(const SpectralField& o) {
    require_same_radius(o);
    values_ -= o.values_;
    hermitian_ = hermitian_ && o.hermitian_;
    return *this;
  }
  SpectralField& operator*=(Real s) {
    values_ *= s;
    return *this;
  }
  /// Complex scaling keeps the Hermitian flag only for real factors.
  SpectralField& operator*=(const Scalar& s) {
    values_ *= s;
    hermitian_ = hermitian_ && s.imag() == Real(0);
    return *this;
  }

  friend SpectralField operator+(SpectralField a, const SpectralField& b) { return a += b; }
  friend SpectralField operator-(SpectralField a, const SpectralField& b) { return a -= b; }
  friend SpectralField operator*(Real s, SpectralField a) { return a *= s; }
  friend SpectralField operator*(const Scalar& s, SpectralField a) { return a *= s; }

  void require_same_radius(const SpectralField& o) const {
    if (!same_radius(o)) throw std::invalid_argument("SpectralField: truncation radius mismatch");
  }

 private:
  std::shared_ptr<const BallLattice> lattice_;
  Values values_;
  bool hermitian_;
};

using Field = SpectralField<double>;

/// Per-frequency squared norms |xi|^2 as a real row vector.
template <typename Real>
Eigen::Matrix<Real, 1, Eigen::Dynamic> lattice_norm2(const BallLattice& lattice) {
  Eigen::Matrix<Real, 1, Eigen::Dynamic> out(lattice.size());
  for (Eigen::Index i = 0; i < lattice.size(); ++i) out[i] = Real(lattice.norm2(i));
  return out;
}

/// sup over xi and k of |xi|^2 |f^k(xi)|.
template <typename Real>
Real phi2_norm(const SpectralField<Real>& f) {
  if (f.size() == 0) return Real(0);
  const auto& lat = f.lattice();
  Real best(0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Real m = f.values().col(i).cwiseAbs().maxCoeff();
    best = std::max(best, Real(lat.norm2(i)) * m);
  }
  return best;
}

/// (f(xi) + conj(f(-xi))) / 2.
template <typename Real>
SpectralField<Real> hermitian_project(const SpectralField<Real>& f) {
  const auto& lat = f.lattice();
  typename SpectralField<Real>::Values out(3, f.size());
  for (Eigen::Index i = 0; i < f.size(); ++i)
    out.col(i) = (f.values().col(i) + f.values().col(lat.opposite(i)).conjugate()) * Real(0.5);
  return SpectralField<Real>(f.lattice_ptr(), std::move(out), true);
}

/// Largest |f(-xi) - conj(f(xi))| over the lattice.
template <typename Real>
Real hermitian_defect(const SpectralField<Real>& f) {
  const auto& lat = f.lattice();
  Real worst(0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Real d =
        (f.values().col(lat.opposite(i)) - f.values().col(i).conjugate()).cwiseAbs().maxCoeff();
    worst = std::max(worst, d);
  }
  return worst;
}

template <typename Real>
bool is_hermitian(const SpectralField<Real>& f, Real tol = Real(0)) {
  return hermitian_defect(f) <= tol;
}

/// Largest |xi . f(xi)| / |xi| (zero for divergence-free fields).
template <typename Real>
Real divergence_defect(const SpectralField<Real>& f) {
  const auto& lat = f.lattice();
  Real worst(0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Eigen::Matrix<Real, 3, 1> xi = lat.point(i).template cast<Real>();
    const std::complex<Real> d = xi.template cast<std::complex<Real>>().dot(f.values().col(i));
    worst = std::max(worst, std::abs(d) / xi.norm());
  }
  return worst;
}

/// Componentwise Leray projection onto fields with xi . f(xi) = 0.
template <typename Real>
SpectralField<Real> solenoidal_project(const SpectralField<Real>& f) {
  const auto& lat = f.lattice();
  SpectralField<Real> out = f;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Eigen::Matrix<Real, 3, 1> xi = lat.point(i).template cast<Real>();
    const Eigen::Matrix<Real, 3, 3> proj =
        Eigen::Matrix<Real, 3, 3>::Identity() - xi * xi.transpose() / xi.squaredNorm();
    out.values().col(i) = proj.template cast<std::complex<Real>>() * f.values().col(i);
  }
  return out;
}

}  // namespace fourier_ns
