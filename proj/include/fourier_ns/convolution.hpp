#pragma once

#include "fourier_ns/lattice.hpp"
#include "fourier_ns/parallel.hpp"
#include "fourier_ns/symbol.hpp"

#include <unsupported/Eigen/FFT>

#include <array>
#include <vector>

namespace fourier_ns {

/// Plain complex product; skips the inf/nan recovery of operator* (Annex G),
/// which dominates the cost of the inner convolution loops.
template <typename Real>
inline std::complex<Real> mul(const std::complex<Real>& a, const std::complex<Real>& b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Smallest 5-smooth integer >= 4 ceil(R) + 1. Linear convolution of two
/// supports in [-R, R]^3 then fits in the periodic grid without wraparound.
int fft_grid_size(double radius);

/// B(u, v)(xi) = sum_q M_ijk(xi) u^i(q) v^j(xi - q) over q != 0, xi - q != 0 with
/// both inside the truncation ball. Plain lattice enumeration in lexicographic
/// q order, one output frequency at a time.
///
/// The fields are copied to dense (2L+1)^3 cubes (zero at the origin) so each
/// (q_x, q_y) column contributes one contiguous q_z range on which both q and
/// xi - q lie in the ball; no lookups or branches in the inner loop.
template <typename Real>
SpectralField<Real> bilinear_direct(const SpectralField<Real>& u, const SpectralField<Real>& v,
                                    const BilinearSymbol& sym, int threads = 0) {
  using C = std::complex<Real>;
  using Mat3 = Eigen::Matrix<C, 3, 3>;
  u.require_same_radius(v);
  const auto& lat = u.lattice();
  const auto n = lat.size();
  typename SpectralField<Real>::Values out(3, n);
  const Eigen::Matrix<bool, 3, 3> mask = required_products(sym);
  Eigen::Matrix<bool, 3, 3> off = mask;
  off.diagonal().setConstant(false);
  const bool diagonal_only = !off.any();

  const int ext = lat.extent();
  const int side = 2 * ext + 1;
  const std::int64_t r2 = lat.max_norm2();
  auto cell = [&](int x, int y, int z) {
    return (std::size_t(x + ext) * side + std::size_t(y + ext)) * side + std::size_t(z + ext);
  };
  std::vector<std::array<C, 3>> ud(std::size_t(side) * side * side), vd(ud.size());
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Vector3i p = lat.point(i);
    for (int c = 0; c < 3; ++c) {
      ud[cell(p.x(), p.y(), p.z())][std::size_t(c)] = u.values()(c, i);
      vd[cell(p.x(), p.y(), p.z())][std::size_t(c)] = v.values()(c, i);
    }
  }
  // Half-height of the ball column above (x, y), or -1 outside the disc.
  std::vector<int> column(std::size_t(side) * side, -1);
  for (int x = -ext; x <= ext; ++x)
    for (int y = -ext; y <= ext; ++y) {
      const std::int64_t rest = r2 - std::int64_t(x) * x - std::int64_t(y) * y;
      if (rest < 0) continue;
      int h = int(std::sqrt(double(rest)));
      while (std::int64_t(h + 1) * (h + 1) <= rest) ++h;
      while (std::int64_t(h) * h > rest) --h;
      column[std::size_t(x + ext) * side + std::size_t(y + ext)] = h;
    }
  auto height = [&](int x, int y) {
    if (x < -ext || x > ext || y < -ext || y > ext) return -1;
    return column[std::size_t(x + ext) * side + std::size_t(y + ext)];
  };

  parallel_for(n, threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t o = begin; o < end; ++o) {
      const Eigen::Vector3i xi = lat.point(o);
      C w[3][3] = {};
      if (mask.any()) {
        for (int qx = -ext; qx <= ext; ++qx)
          for (int qy = -ext; qy <= ext; ++qy) {
            const int hq = height(qx, qy);
            const int hb = height(xi.x() - qx, xi.y() - qy);
            if (hq < 0 || hb < 0) continue;
            const int z0 = std::max(-hq, xi.z() - hb);
            const int z1 = std::min(hq, xi.z() + hb);
            if (z0 > z1) continue;
            const std::array<C, 3>* a = ud.data() + cell(qx, qy, z0);
            const std::array<C, 3>* b = vd.data() + cell(xi.x() - qx, xi.y() - qy, xi.z() - z0);
            if (diagonal_only) {
              for (int z = z0; z <= z1; ++z, ++a, --b)
                for (std::size_t r = 0; r < 3; ++r) w[r][r] += mul((*a)[r], (*b)[r]);
            } else {
              for (int z = z0; z <= z1; ++z, ++a, --b)
                for (std::size_t r = 0; r < 3; ++r)
                  for (std::size_t c = 0; c < 3; ++c) w[r][c] += mul((*a)[r], (*b)[c]);
            }
          }
      }
      Mat3 wm;
      for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) wm(r, c) = w[r][c];
      out.col(o) = contract<Real>(sym, xi, wm);
    }
  });
  return SpectralField<Real>(u.lattice_ptr(), std::move(out), u.hermitian() && v.hermitian());
}

/// Three-dimensional complex FFT on an N^3 periodic grid (z fastest), built
/// from one-dimensional Eigen FFTs. Passes skip lines that are known to be zero
/// on input (forward) or not needed on output (inverse) for data supported in
/// the ball |p|^2 <= max_norm2.
template <typename Real>
class BallFft3 {
 public:
  using C = std::complex<Real>;

  BallFft3(int n, int extent, std::int64_t max_norm2, int threads)
      : n_(n), extent_(extent), max_norm2_(max_norm2), threads_(threads <= 0 ? default_threads() : threads) {}

  int size() const { return n_; }
  std::size_t volume() const { return std::size_t(n_) * n_ * n_; }
  std::size_t offset(int x, int y, int z) const {
    return (std::size_t(wrap(x)) * n_ + std::size_t(wrap(y))) * n_ + std::size_t(wrap(z));
  }

  void forward(std::vector<C>& a) const {
    pass_z(a, false);
    pass_y(a, false);
    pass_x(a, false);
  }
  /// Scaled inverse; only values at ball points are meaningful afterwards.
  void inverse(std::vector<C>& a) const {
    pass_x(a, true);
    pass_y(a, true);
    pass_z(a, true);
  }

 private:
  int wrap(int c) const { return c < 0 ? c + n_ : c; }

  void transform(Eigen::FFT<Real>& fft, C* dst, const C* src, bool inv) const {
    if (inv)
      fft.inv(dst, src, n_);
    else
      fft.fwd(dst, src, n_);
  }

  // Lines along z: only (x, y) inside the disc x^2 + y^2 <= max_norm2.
  void pass_z(std::vector<C>& a, bool inv) const {
    const int span = 2 * extent_ + 1;
    parallel_for(span, threads_, [&](std::ptrdiff_t b, std::ptrdiff_t e) {
      Eigen::FFT<Real> fft;
      std::vector<C> buf(static_cast<std::size_t>(n_));
      for (std::ptrdiff_t xi = b; xi < e; ++xi) {
        const int x = int(xi) - extent_;
        for (int y = -extent_; y <= extent_; ++y) {
          if (std::int64_t(x) * x + std::int64_t(y) * y > max_norm2_) continue;
          C* line = a.data() + offset(x, y, 0);
          transform(fft, buf.data(), line, inv);
          std::copy(buf.begin(), buf.end(), line);
        }
      }
    });
  }

  // Lines along y: only planes |x| <= extent, every z.
  void pass_y(std::vector<C>& a, bool inv) const {
    const int span = 2 * extent_ + 1;
    parallel_for(span, threads_, [&](std::ptrdiff_t b, std::ptrdiff_t e) {
      Eigen::FFT<Real> fft;
      std::vector<C> in(static_cast<std::size_t>(n_) * n_), out(static_cast<std::size_t>(n_));
      for (std::ptrdiff_t xi = b; xi < e; ++xi) {
        const int x = int(xi) - extent_;
        C* plane = a.data() + offset(x, 0, 0);
        // Transpose the (y, z) plane so each y-line is contiguous.
        for (int y = 0; y < n_; ++y)
          for (int z = 0; z < n_; ++z) in[std::size_t(z) * n_ + y] = plane[std::size_t(y) * n_ + z];
        for (int z = 0; z < n_; ++z) {
          C* line = in.data() + std::size_t(z) * n_;
          transform(fft, out.data(), line, inv);
          std::copy(out.begin(), out.end(), line);
        }
        for (int y = 0; y < n_; ++y)
          for (int z = 0; z < n_; ++z) plane[std::size_t(y) * n_ + z] = in[std::size_t(z) * n_ + y];
      }
    });
  }

  // Lines along x: every (y, z).
  void pass_x(std::vector<C>& a, bool inv) const {
    parallel_for(n_, threads_, [&](std::ptrdiff_t b, std::ptrdiff_t e) {
      Eigen::FFT<Real> fft;
      const std::size_t stride = std::size_t(n_) * n_;
      std::vector<C> in(static_cast<std::size_t>(n_) * n_), out(static_cast<std::size_t>(n_));
      for (std::ptrdiff_t y = b; y < e; ++y) {
        for (int x = 0; x < n_; ++x)
          for (int z = 0; z < n_; ++z)
            in[std::size_t(z) * n_ + x] = a[std::size_t(x) * stride + std::size_t(y) * n_ + z];
        for (int z = 0; z < n_; ++z) {
          C* line = in.data() + std::size_t(z) * n_;
          transform(fft, out.data(), line, inv);
          std::copy(out.begin(), out.end(), line);
        }
        for (int x = 0; x < n_; ++x)
          for (int z = 0; z < n_; ++z)
            a[std::size_t(x) * stride + std::size_t(y) * n_ + z] = in[std::size_t(z) * n_ + x];
      }
    });
  }

  int n_;
  int extent_;
  std::int64_t max_norm2_;
  int threads_;
};

/// Same sum as bilinear_direct, via W_ij = IFFT(FFT(u^i) FFT(v^j)) on a grid
/// large enough that the circular convolution equals the linear one, followed
/// by pointwise contraction with M(xi). Only the products the symbol reads
/// are formed; when u and v are the same object W is symmetric and each
/// unordered pair is transformed once.
template <typename Real>
SpectralField<Real> bilinear_fft(const SpectralField<Real>& u, const SpectralField<Real>& v,
                                 const BilinearSymbol& sym, int threads = 0) {
  using C = std::complex<Real>;
  using Mat3 = Eigen::Matrix<C, 3, 3>;
  u.require_same_radius(v);
  const auto& lat = u.lattice();
  const auto n = lat.size();
  typename SpectralField<Real>::Values out = SpectralField<Real>::Values::Zero(3, n);
  const bool herm = u.hermitian() && v.hermitian();
  const Eigen::Matrix<bool, 3, 3> mask = required_products(sym);
  if (!mask.any() || n == 0) return SpectralField<Real>(u.lattice_ptr(), std::move(out), herm);

  const BallFft3<Real> fft(fft_grid_size(u.radius()), lat.extent(), lat.max_norm2(), threads);
  const bool same = &u == &v;

  auto spectrum = [&](const SpectralField<Real>& f, int comp) {
    std::vector<C> a(fft.volume(), C(0));
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::Vector3i p = lat.point(i);
      a[fft.offset(p.x(), p.y(), p.z())] = f.values()(comp, i);
    }
    fft.forward(a);
    return a;
  };

  std::array<std::vector<C>, 3> uh, vh;
  for (int c = 0; c < 3; ++c) {
    const bool need_u = mask.row(c).any() || (same && mask.col(c).any());
    const bool need_v = !same && mask.col(c).any();
    if (need_u) uh[std::size_t(c)] = spectrum(u, c);
    if (need_v) vh[std::size_t(c)] = spectrum(v, c);
  }
  const auto& vs = same ? uh : vh;

  std::vector<Mat3> w(std::size_t(n), Mat3::Zero());
  std::vector<C> prod(fft.volume());
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      if (!mask(i, j)) continue;
      if (same && j < i && mask(j, i)) continue;  // filled from (j, i)
      const auto& a = uh[std::size_t(i)];
      const auto& b = vs[std::size_t(j)];
      for (std::size_t k = 0; k < prod.size(); ++k) prod[k] = mul(a[k], b[k]);
      fft.inverse(prod);
      for (Eigen::Index o = 0; o < n; ++o) {
        const Eigen::Vector3i p = lat.point(o);
        const C value = prod[fft.offset(p.x(), p.y(), p.z())];
        w[std::size_t(o)](i, j) = value;
        if (same) w[std::size_t(o)](j, i) = value;
      }
    }

  for (Eigen::Index o = 0; o < n; ++o) out.col(o) = contract<Real>(sym, lat.point(o), w[std::size_t(o)]);
  return SpectralField<Real>(u.lattice_ptr(), std::move(out), herm);
}

/// Bilinear evaluation strategy used by the solver and diagnostics.
enum class ConvolutionMethod { direct, fft };

template <typename Real>
SpectralField<Real> bilinear(const SpectralField<Real>& u, const SpectralField<Real>& v,
                             const BilinearSymbol& sym, ConvolutionMethod method, int threads = 0) {
  return method == ConvolutionMethod::direct ? bilinear_direct(u, v, sym, threads)
                                             : bilinear_fft(u, v, sym, threads);
}

}  // namespace fourier_ns
