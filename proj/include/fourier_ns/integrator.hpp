#pragma once

#include "fourier_ns/convolution.hpp"
#include "fourier_ns/lattice.hpp"
#include "fourier_ns/lattice_sums.hpp"
#include "fourier_ns/parallel.hpp"
#include "fourier_ns/symbol.hpp"

#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <mutex>
#include <span>
#include <stdexcept>
#include <type_traits>
#include <vector>

namespace fourier_ns {

/// Uniform grid t_j = j T / M, j = 0..M.
class TimeGrid {
 public:
  TimeGrid(double horizon, int steps) : horizon_(horizon), steps_(steps) {
    if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("TimeGrid: horizon must be > 0");
    if (steps < 1) throw std::invalid_argument("TimeGrid: steps must be >= 1");
  }
  double horizon() const { return horizon_; }
  int steps() const { return steps_; }
  int nodes() const { return steps_ + 1; }
  double step() const { return horizon_ / steps_; }
  double time(int j) const { return j == steps_ ? horizon_ : j * step(); }
  /// Index of the node equal to t; throws if t is not a node.
  int node(double t) const {
    const double x = t / step();
    const double j = std::round(x);
    if (j < 0 || j > steps_ || std::abs(x - j) > 1e-9) throw std::invalid_argument("TimeGrid: time is not a grid node");
    return int(j);
  }
  /// Same grid with twice the steps.
  TimeGrid refined() const { return TimeGrid(horizon_, 2 * steps_); }
  bool operator==(const TimeGrid&) const = default;

 private:
  double horizon_;
  int steps_;
};

/// Field values at every node of a grid.
template <typename Real>
struct Trajectory {
  TimeGrid grid;
  std::vector<SpectralField<Real>> states;

  const SpectralField<Real>& at(int j) const { return states.at(std::size_t(j)); }
  double radius() const { return states.front().radius(); }
};

/// sup over nodes of phi2_norm(a - b).
template <typename Real>
Real trajectory_distance(const Trajectory<Real>& a, const Trajectory<Real>& b) {
  if (a.states.size() != b.states.size()) throw std::invalid_argument("trajectory_distance: grid mismatch");
  Real d = 0;
  for (std::size_t j = 0; j < a.states.size(); ++j) d = std::max(d, phi2_norm(a.states[j] - b.states[j]));
  return d;
}

/// sup over nodes of phi2_norm.
template <typename Real>
Real trajectory_sup_norm(const Trajectory<Real>& a) {
  Real d = 0;
  for (const auto& s : a.states) d = std::max(d, phi2_norm(s));
  return d;
}

template <typename Real>
SpectralField<Real> heat_propagate(const SpectralField<Real>& f, Real dt) {
  if (!(dt >= 0)) throw std::invalid_argument("heat_propagate: negative time step");
  SpectralField<Real> g = f;
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < f.size(); ++i) g.values().col(i) *= std::exp(-Real(lat.norm2(i)) * dt);
  return g;
}

template <typename Real>
Trajectory<Real> heat_trajectory(const SpectralField<Real>& psi, const TimeGrid& grid) {
  Trajectory<Real> out{grid, {}};
  out.states.reserve(std::size_t(grid.nodes()));
  for (int j = 0; j < grid.nodes(); ++j) out.states.push_back(heat_propagate(psi, Real(grid.time(j))));
  return out;
}

/// J_n(x) = int_0^1 exp(-x (1 - s)) s^n ds for n = 0..N-1.
/// Upward recursion from the closed form for x >= 1, power series below.
template <typename Real, std::size_t N>
std::array<Real, N> kernel_moments(Real x) {
  std::array<Real, N> j{};
  if (x >= Real(1)) {
    j[0] = -std::expm1(-x) / x;
    for (std::size_t n = 1; n < N; ++n) j[n] = (Real(1) - Real(n) * j[n - 1]) / x;
    return j;
  }
  // J_n = sum_k (-x)^k n! / (k + n + 1)!
  const Real eps = std::numeric_limits<Real>::epsilon();
  for (std::size_t n = 0; n < N; ++n) {
    Real term = Real(1) / Real(n + 1);
    Real sum = term;
    for (int k = 1; k < 200; ++k) {
      term *= -x / Real(int(n) + k + 1);
      sum += term;
      if (std::abs(term) <= eps * std::abs(sum) * Real(0.25)) break;
    }
    j[n] = sum;
  }
  return j;
}

/// Per-substep weights for a step h and decay rate a = |xi|^2: over
/// [t, t + h] with forcing linear between F_0 and F_1,
///   int exp(-a (t + h - s)) F(s) ds = left F_0 + right F_1.
template <typename Real>
struct LinearWeights {
  Real decay;  ///< exp(-a h)
  Real left;
  Real right;
};

template <typename Real>
LinearWeights<Real> linear_weights(Real a, Real h) {
  const auto j = kernel_moments<Real, 2>(a * h);
  return {std::exp(-a * h), h * (j[0] - j[1]), h * j[1]};
}

/// Same over [t, t + 2h] with quadratic interpolation through three nodes.
template <typename Real>
struct QuadraticWeights {
  Real decay;  ///< exp(-2 a h)
  std::array<Real, 3> w;
};

template <typename Real>
QuadraticWeights<Real> quadratic_weights(Real a, Real h) {
  const Real H = 2 * h;
  const auto j = kernel_moments<Real, 3>(a * H);
  return {std::exp(-a * H),
          {H * (2 * j[2] - 3 * j[1] + j[0]), H * (4 * j[1] - 4 * j[2]), H * (2 * j[2] - j[1])}};
}

template <typename Real>
using Vec3c = Eigen::Matrix<std::complex<Real>, 3, 1>;

/// int_0^t exp(-|xi|^2 (t - s)) F(s) ds with F sampled at grid nodes and
/// interpolated linearly on each substep; exact for linear forcing.
template <typename Real>
Vec3c<Real> duhamel_quadrature(const Frequency& xi, std::span<const Vec3c<Real>> samples, const TimeGrid& grid,
                               double t) {
  const int node = grid.node(t);
  if (samples.size() < std::size_t(node) + 1) throw std::invalid_argument("duhamel_quadrature: sample/grid mismatch");
  const auto w = linear_weights<Real>(Real(xi.norm2()), Real(grid.step()));
  Vec3c<Real> acc = Vec3c<Real>::Zero();
  for (int j = 0; j < node; ++j)
    acc = acc * w.decay + samples[std::size_t(j)] * w.left + samples[std::size_t(j) + 1] * w.right;
  return acc;
}

/// B(v(t_j), v(t_j)) at every node.
template <typename Real>
std::vector<SpectralField<Real>> forcing_samples(const Trajectory<Real>& traj, const BilinearSymbol& sym,
                                                 ConvolutionMethod method = ConvolutionMethod::fft,
                                                 int threads = 0) {
  std::vector<SpectralField<Real>> f;
  f.reserve(traj.states.size());
  for (const auto& s : traj.states) f.push_back(bilinear(s, s, sym, method, threads));
  return f;
}

/// Linear-weight tables indexed by |xi|^2.
template <typename Real>
std::vector<LinearWeights<Real>> weight_table(const BallLattice& lat, Real h) {
  std::vector<LinearWeights<Real>> table(std::size_t(lat.max_norm2()) + 1);
  for (std::size_t n = 1; n < table.size(); ++n) table[n] = linear_weights<Real>(Real(n), h);
  return table;
}

/// Duhamel solution restarted at node k from `start`:
///   out(t_j) = start exp(-|xi|^2 (t_j - t_k)) + int_{t_k}^{t_j} ... ds,  j >= k.
/// Entries of the result before node k are copies of `start`.
template <typename Real>
Trajectory<Real> duhamel_from(const SpectralField<Real>& start, int k, const std::vector<SpectralField<Real>>& forcing,
                              const TimeGrid& grid, int threads = 0) {
  if (int(forcing.size()) != grid.nodes()) throw std::invalid_argument("duhamel_from: sample/grid mismatch");
  if (k < 0 || k >= grid.nodes()) throw std::invalid_argument("duhamel_from: restart node out of range");
  for (const auto& f : forcing) start.require_same_radius(f);
  const auto& lat = start.lattice();
  const Real h = Real(grid.step());
  const auto table = weight_table<Real>(lat, h);
  Trajectory<Real> out{grid, std::vector<SpectralField<Real>>(std::size_t(grid.nodes()), start)};
  parallel_for(lat.size(), threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      const auto& w = table[std::size_t(lat.norm2(i))];
      const Real a = Real(lat.norm2(i));
      Vec3c<Real> acc = Vec3c<Real>::Zero();
      for (int j = k; j + 1 < grid.nodes(); ++j) {
        const Real heat = std::exp(-a * Real(grid.time(j + 1) - grid.time(k)));
        acc = acc * w.decay + forcing[std::size_t(j)].values().col(i) * w.left +
              forcing[std::size_t(j) + 1].values().col(i) * w.right;
        out.states[std::size_t(j) + 1].values().col(i) = start.values().col(i) * heat + acc;
      }
    }
  });
  for (auto& s : out.states) s.set_hermitian(start.hermitian() && forcing.front().hermitian());
  return out;
}

/// One Picard step: psi exp(-|xi|^2 t) + Duhamel integral of B(v, v).
template <typename Real>
Trajectory<Real> picard_iterate(const Trajectory<Real>& current, const SpectralField<Real>& psi,
                                const BilinearSymbol& sym, ConvolutionMethod method = ConvolutionMethod::fft,
                                int threads = 0) {
  for (const auto& s : current.states) psi.require_same_radius(s);
  return duhamel_from(psi, 0, forcing_samples(current, sym, method, threads), current.grid, threads);
}

/// Defect of the restarted Duhamel identity from node k:
/// sup over nodes t_j > t_k of phi2_norm(v(t_j) - restarted(t_j)).
template <typename Real>
Real restart_defect(const Trajectory<Real>& traj, int k, const std::vector<SpectralField<Real>>& forcing,
                    int threads = 0) {
  const auto again = duhamel_from(traj.at(k), k, forcing, traj.grid, threads);
  Real d = 0;
  for (int j = k + 1; j < traj.grid.nodes(); ++j) d = std::max(d, phi2_norm(traj.at(j) - again.at(j)));
  return d;
}

template <typename Real>
Real restart_residual(const Trajectory<Real>& traj, double tau, const BilinearSymbol& sym,
                      ConvolutionMethod method = ConvolutionMethod::fft, int threads = 0) {
  return restart_defect(traj, traj.grid.node(tau), forcing_samples(traj, sym, method, threads), threads);
}

/// Gap between linear and piecewise-quadratic forcing interpolation in the
/// Duhamel integral, sup over even nodes; an estimate of the time
/// discretisation error. NaN for an odd number of steps.
template <typename Real>
Real quadrature_defect(const Trajectory<Real>& traj, const std::vector<SpectralField<Real>>& forcing,
                       int threads = 0) {
  const TimeGrid& grid = traj.grid;
  if (grid.steps() % 2 != 0) return std::numeric_limits<Real>::quiet_NaN();
  const auto& lat = traj.at(0).lattice();
  const Real h = Real(grid.step());
  const auto lin = weight_table<Real>(lat, h);
  std::vector<QuadraticWeights<Real>> quad(lin.size());
  for (std::size_t n = 1; n < quad.size(); ++n) quad[n] = quadratic_weights<Real>(Real(n), h);
  const int pairs = grid.steps() / 2;
  std::vector<Real> worst(std::size_t(pairs) + 1, Real(0));
  std::mutex guard;
  parallel_for(lat.size(), threads, [&](std::ptrdiff_t begin, std::ptrdiff_t end) {
    std::vector<Real> local(worst.size(), Real(0));
    for (std::ptrdiff_t i = begin; i < end; ++i) {
      const std::size_t n2 = std::size_t(lat.norm2(i));
      const auto& wl = lin[n2];
      const auto& wq = quad[n2];
      Vec3c<Real> a = Vec3c<Real>::Zero(), b = Vec3c<Real>::Zero();
      for (int p = 0; p < pairs; ++p) {
        const auto& f0 = forcing[std::size_t(2 * p)].values().col(i);
        const auto& f1 = forcing[std::size_t(2 * p + 1)].values().col(i);
        const auto& f2 = forcing[std::size_t(2 * p + 2)].values().col(i);
        a = a * wl.decay + f0 * wl.left + f1 * wl.right;
        a = a * wl.decay + f1 * wl.left + f2 * wl.right;
        b = b * wq.decay + f0 * wq.w[0] + f1 * wq.w[1] + f2 * wq.w[2];
        local[std::size_t(p) + 1] =
            std::max(local[std::size_t(p) + 1], Real(n2) * (a - b).cwiseAbs().maxCoeff());
      }
    }
    std::lock_guard lock(guard);
    for (std::size_t p = 0; p < worst.size(); ++p) worst[p] = std::max(worst[p], local[p]);
  });
  Real d = 0;
  for (Real w : worst) d = std::max(d, w);
  return d;
}

/// Bound on the contribution of modes beyond the truncation ball to the
/// Duhamel term at output frequencies |xi| <= R/2, in the phi2 norm, for a
/// solution with sup phi2 norm D: 8 S (R/2) D^2 sum_{|q|>=R} |q|^-4.
double truncation_tail_allowance(const BilinearSymbol& sym, double radius, double D);

struct PicardOptions {
  double tolerance = 1e-10;
  int max_iter = 50;
  ConvolutionMethod method = ConvolutionMethod::fft;
  int threads = 0;
};

struct PicardReport {
  int iterations = 0;
  std::vector<double> distances;  ///< d_n = sup_t phi2_norm(v_n - v_{n-1}), n = 1..iterations
  bool converged = false;
  double final_residual = 0.0;  ///< sup_t phi2_norm(v - Phi(v)) of the returned trajectory
  double tail_allowance = 0.0;  ///< truncation allowance for |xi| <= R/2
  double quadrature_defect = 0.0;
  double sup_norm = 0.0;  ///< sup_t phi2_norm(v)
};

/// Called with (n, v_n) for n = 0 (heat trajectory) and every later iterate.
template <typename Real>
using IterateObserver = std::function<void(int, const Trajectory<Real>&)>;

template <typename Real>
std::pair<Trajectory<Real>, PicardReport> picard_solve(const SpectralField<Real>& psi, const BilinearSymbol& sym,
                                                       const TimeGrid& grid, const PicardOptions& opt,
                                                       const std::type_identity_t<IterateObserver<Real>>& observer = {}) {
  if (!(opt.tolerance > 0.0)) throw std::invalid_argument("picard_solve: tolerance must be > 0");
  if (opt.max_iter < 1) throw std::invalid_argument("picard_solve: max_iter must be >= 1");
  PicardReport rep;
  Trajectory<Real> v = heat_trajectory(psi, grid);
  if (observer) observer(0, v);
  auto forcing = forcing_samples(v, sym, opt.method, opt.threads);
  for (int n = 1; n <= opt.max_iter; ++n) {
    Trajectory<Real> next = duhamel_from(psi, 0, forcing, grid, opt.threads);
    const double d = double(trajectory_distance(next, v));
    v = std::move(next);
    rep.iterations = n;
    rep.distances.push_back(d);
    if (observer) observer(n, v);
    forcing = forcing_samples(v, sym, opt.method, opt.threads);
    if (!std::isfinite(d)) break;
    if (d <= opt.tolerance) {
      rep.converged = true;
      break;
    }
  }
  rep.final_residual = double(restart_defect(v, 0, forcing, opt.threads));
  rep.quadrature_defect = double(quadrature_defect(v, forcing, opt.threads));
  rep.sup_norm = double(trajectory_sup_norm(v));
  rep.tail_allowance = std::isfinite(rep.sup_norm) ? truncation_tail_allowance(sym, psi.radius(), rep.sup_norm)
                                                   : std::numeric_limits<double>::infinity();
  return {std::move(v), rep};
}

}  // namespace fourier_ns
