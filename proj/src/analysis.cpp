#include "fourier_ns/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace fourier_ns {

std::string_view to_string(RecurrenceMode mode) {
  return mode == RecurrenceMode::corrected ? "corrected" : "paper_literal";
}

RecurrenceMode parse_recurrence_mode(std::string_view name) {
  if (name == "corrected") return RecurrenceMode::corrected;
  if (name == "paper_literal") return RecurrenceMode::paper_literal;
  throw std::invalid_argument("unknown recurrence mode: " + std::string(name));
}

BootstrapSchedule bootstrap_schedule(double eps, double rho, double D, double k_minus1, int depth,
                                     RecurrenceMode mode) {
  if (!(eps > 0.0) || !(eps < kMaxBootstrapEps))
    throw std::invalid_argument("bootstrap_schedule: eps must lie in (0, 1/28)");
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("bootstrap_schedule: rho must be > 0");
  if (!(D >= 0.0) || !std::isfinite(D)) throw std::invalid_argument("bootstrap_schedule: D must be >= 0");
  if (!(k_minus1 > 0.0) || !std::isfinite(k_minus1))
    throw std::invalid_argument("bootstrap_schedule: k_minus1 must be > 0");
  if (depth < 0) throw std::invalid_argument("bootstrap_schedule: depth must be >= 0");

  BootstrapSchedule s;
  s.eps = eps;
  s.rho = rho;
  s.D = D;
  s.k_minus1 = k_minus1;
  s.depth = depth;
  s.mode = mode;
  const double cap = std::min(eps, 0.5);
  const auto admissible = [&](double k0) { return k_minus1 / k0 * D < cap; };
  constexpr double up = std::numeric_limits<double>::infinity();
  s.k0 = k_minus1 * D / cap;
  while (!admissible(s.k0)) s.k0 = std::nextafter(s.k0, up);
  while (s.k0 > 0.0 && admissible(std::nextafter(s.k0, 0.0))) s.k0 = std::nextafter(s.k0, 0.0);

  const int n = depth + 2;
  s.mu.resize(std::size_t(n));
  s.k.resize(std::size_t(n));
  s.tau.resize(std::size_t(n));
  for (int m = 0; m < n; ++m) {
    if (mode == RecurrenceMode::paper_literal)
      s.mu[std::size_t(m)] = m < 2 ? 1 : 2 * s.mu[std::size_t(m) - 1] - 1;
    else
      s.mu[std::size_t(m)] = m == 0 ? 1 : m == 1 ? 2 : 2 * s.mu[std::size_t(m) - 1] - 1;
    s.k[std::size_t(m)] = s.k0 / std::pow(eps, std::ldexp(1.0, m));
    s.tau[std::size_t(m)] = rho - std::ldexp(rho, -m);
  }
  return s;
}

int max_feasible_depth(double eps, double k0, double radius) {
  int best = -1;
  for (int m = 0; m < 64; ++m) {
    if (k0 / std::pow(eps, std::ldexp(1.0, m)) > radius) break;
    best = m;
  }
  return best;
}

ShellDecay shell_decay_check(const Field& f, double k, double bound) {
  if (k > f.radius()) throw std::invalid_argument("shell_decay_check: threshold beyond truncation radius");
  ShellDecay out;
  out.margin = std::numeric_limits<double>::infinity();
  const auto& lat = f.lattice();
  const double k2 = k * k;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const double n2 = double(lat.norm2(i));
    if (n2 < k2) continue;
    const double m = bound / n2 - f.values().col(i).cwiseAbs().maxCoeff();
    if (m < out.margin) {
      out.margin = m;
      out.worst = lat.point(i);
    }
  }
  out.pass = out.margin >= 0.0;
  return out;
}

void UniformBoundMonitor::observe(int n, const Solution& v) {
  auto& r = report_;
  ++r.iterates;
  for (int j = 0; j < v.grid.nodes(); ++j) {
    const Field& f = v.at(j);
    const auto& lat = f.lattice();
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double n2 = double(lat.norm2(i));
      const double a = f.values().col(i).cwiseAbs().maxCoeff();
      r.worst_ratio = std::max(r.worst_ratio, n2 * a / r.eps);
      const double m = r.eps / n2 - a;
      if (m < r.worst_margin || !(a == a)) {
        r.worst_margin = a == a ? m : -std::numeric_limits<double>::infinity();
        r.worst_iterate = n;
        r.worst_node = j;
        r.worst_frequency = lat.point(i);
      }
    }
  }
  r.pass = r.worst_margin >= 0.0;
}

UniformBoundReport uniform_bound_report(std::span<const Solution> iterates, double eps) {
  UniformBoundMonitor mon(eps);
  for (std::size_t n = 0; n < iterates.size(); ++n) mon.observe(int(n), iterates[n]);
  return mon.report();
}

double lipschitz_modulus(const Solution& v) {
  if (v.grid.nodes() < 2) throw std::invalid_argument("lipschitz_modulus: need at least two nodes");
  double best = 0.0;
  for (int j = 0; j + 1 < v.grid.nodes(); ++j) {
    const double dt = v.grid.time(j + 1) - v.grid.time(j);
    const auto diff = (v.at(j + 1).values() - v.at(j).values()).cwiseAbs();
    best = std::max(best, diff.size() ? diff.maxCoeff() / dt : 0.0);
  }
  return best;
}

void EquicontinuityMonitor::observe(int, const Solution& v) { moduli_.push_back(lipschitz_modulus(v)); }

EquicontinuityReport EquicontinuityMonitor::report() const {
  EquicontinuityReport r;
  r.per_iterate = moduli_;
  if (moduli_.empty()) return r;
  r.modulus = *std::max_element(moduli_.begin(), moduli_.end());
  std::vector<double> s = moduli_;
  std::sort(s.begin(), s.end());
  const std::size_t h = s.size() / 2;
  r.median = s.size() % 2 ? s[h] : 0.5 * (s[h - 1] + s[h]);
  return r;
}

EquicontinuityReport equicontinuity_report(std::span<const Solution> iterates) {
  EquicontinuityMonitor mon;
  for (std::size_t n = 0; n < iterates.size(); ++n) mon.observe(int(n), iterates[n]);
  return mon.report();
}

double equicontinuity_modulus(std::span<const Solution> iterates) { return equicontinuity_report(iterates).modulus; }

DecayFit fit_decay_exponent(const Field& f, double k_min, double noise_floor) {
  const auto& lat = f.lattice();
  std::vector<double> shell(std::size_t(lat.max_norm2()) + 1, -1.0);
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    auto& s = shell[std::size_t(lat.norm2(i))];
    s = std::max(s, double(f.values().col(i).cwiseAbs().maxCoeff()));
  }
  const double top = *std::max_element(shell.begin(), shell.end());
  const double floor = noise_floor * top;
  std::vector<double> xs, ys;
  for (std::size_t n2 = 1; n2 < shell.size(); ++n2) {
    const double r = std::sqrt(double(n2));
    if (r < k_min || !(shell[n2] > 0.0) || shell[n2] < floor) continue;
    xs.push_back(std::log(r));
    ys.push_back(std::log(shell[n2]));
  }
  if (xs.size() < 3) throw std::invalid_argument("fit_decay_exponent: fewer than 3 shells above k_min");
  const double m = double(xs.size());
  double sx = 0, sy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) sx += xs[i], sy += ys[i];
  const double mx = sx / m, my = sy / m;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
  }
  const double slope = sxy / sxx;
  DecayFit fit;
  fit.exponent = -slope;
  fit.prefactor = std::exp(my - slope * mx);
  fit.k_min = std::exp(xs.front());
  fit.k_max = std::exp(xs.back());
  fit.shells = int(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i)
    fit.residual = std::max(fit.residual, std::abs(ys[i] - (my + slope * (xs[i] - mx))));
  return fit;
}

Field smoothing_gain_profile(const Field& u, const BilinearSymbol& sym) {
  Field w = bilinear_fft(u, u, sym);
  const auto& lat = w.lattice();
  for (Eigen::Index i = 0; i < w.size(); ++i) w.values().col(i) /= double(lat.norm2(i));
  return w;
}

namespace {

/// Stage check on nodes t > tau with restarted Duhamel bounds from the first
/// node at or after tau.
StageReport run_stage(const Solution& v, const std::vector<Field>& forcing, int m, double k, double tau,
                      double level) {
  StageReport st;
  st.m = m;
  st.k = k;
  st.tau = tau;
  st.level = level;
  st.margin = std::numeric_limits<double>::infinity();
  st.chain_margin = std::numeric_limits<double>::infinity();
  const auto& grid = v.grid;
  int r = 0;
  while (r < grid.nodes() && grid.time(r) < tau) ++r;
  st.restart_node = r;
  if (r == grid.nodes()) return st;

  const auto& lat = v.at(0).lattice();
  const double k2 = k * k;
  for (Eigen::Index i = 0; i < lat.size(); ++i) {
    const double n2 = double(lat.norm2(i));
    if (n2 < k2) continue;
    const double cap = level / n2;
    const double start = v.at(r).values().col(i).cwiseAbs().maxCoeff();
    double fsup = forcing[std::size_t(r)].values().col(i).cwiseAbs().maxCoeff();
    for (int j = r; j < grid.nodes(); ++j) {
      fsup = std::max(fsup, double(forcing[std::size_t(j)].values().col(i).cwiseAbs().maxCoeff()));
      if (!(grid.time(j) > tau)) continue;
      const double a = v.at(j).values().col(i).cwiseAbs().maxCoeff();
      st.margin = std::min(st.margin, cap - a);
      const double e = std::exp(-n2 * (grid.time(j) - grid.time(r)));
      const double bound = start * e + fsup * (-std::expm1(-n2 * (grid.time(j) - grid.time(r)))) / n2;
      st.chain_margin = std::min(st.chain_margin, cap - bound);
    }
  }
  for (int j = r; j < grid.nodes(); ++j) st.nodes_checked += grid.time(j) > tau ? 1 : 0;
  st.pass = st.margin >= 0.0;
  st.chain_pass = st.chain_margin >= 0.0;
  return st;
}

}  // namespace

BootstrapReport regularity_bootstrap_run(const Solution& traj, const BootstrapSchedule& schedule,
                                         const BilinearSymbol& sym, const BootstrapOptions& opt) {
  const double radius = traj.radius();
  const auto& s = schedule;
  if (s.k.size() < std::size_t(s.depth) + 1 || s.mu.size() < std::size_t(s.depth) + 1)
    throw std::invalid_argument("regularity_bootstrap_run: malformed schedule");
  if (s.k[std::size_t(s.depth)] > radius) {
    const int best = max_feasible_depth(s.eps, s.k0, radius);
    throw InfeasibleSchedule("regularity_bootstrap_run: k_" + std::to_string(s.depth) + " = " +
                                 std::to_string(s.k[std::size_t(s.depth)]) + " exceeds the truncation radius " +
                                 std::to_string(radius) + "; largest feasible depth is " + std::to_string(best),
                             best);
  }
  if (!(s.rho < traj.grid.horizon()))
    throw std::invalid_argument("regularity_bootstrap_run: rho must lie inside the time horizon");

  BootstrapReport rep;
  rep.schedule = s;
  const auto forcing = forcing_samples(traj, sym, opt.method, opt.threads);
  for (int m = 0; m <= s.depth; ++m) {
    const double level = std::pow(s.eps, s.mu[std::size_t(m)]);
    StageReport st = run_stage(traj, forcing, m, s.k[std::size_t(m)], s.tau[std::size_t(m)], level);
    if (st.restart_node < traj.grid.nodes()) {
      const Field& start = traj.at(st.restart_node);
      if (m == 0) {
        // base case: the standing hypothesis above k_{-1}
        st.chained = s.k_minus1 > radius || shell_decay_check(start, s.k_minus1, s.eps).pass;
      } else {
        const double prev = std::pow(s.eps, s.mu[std::size_t(m) - 1]);
        st.chained = shell_decay_check(start, s.k[std::size_t(m) - 1], prev).pass;
      }
    }
    rep.stages.push_back(st);
  }

  rep.terminal_margin = std::numeric_limits<double>::infinity();
  const auto& lat = traj.at(0).lattice();
  const double k02 = s.k0 * s.k0;
  const double power = 1.0 + 0.5 * opt.terminal_gain;
  for (int j = 0; j < traj.grid.nodes(); ++j) {
    if (traj.grid.time(j) < s.rho) continue;
    const Field& f = traj.at(j);
    for (Eigen::Index i = 0; i < f.size(); ++i) {
      const double n2 = double(lat.norm2(i));
      if (n2 < k02) continue;
      rep.terminal_margin =
          std::min(rep.terminal_margin, s.D / std::pow(n2, power) - f.values().col(i).cwiseAbs().maxCoeff());
    }
    rep.fit_times.push_back(traj.grid.time(j));
    try {
      rep.fits.push_back(fit_decay_exponent(f, s.k0, opt.fit_noise_floor));
    } catch (const std::invalid_argument&) {
      DecayFit none;
      none.exponent = std::numeric_limits<double>::quiet_NaN();
      rep.fits.push_back(none);
    }
  }
  rep.terminal_pass = rep.terminal_margin >= 0.0;
  return rep;
}

}  // namespace fourier_ns
