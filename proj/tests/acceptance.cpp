// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on failure.

#include "fourier_ns/analysis.hpp"
#include "fourier_ns/convolution.hpp"
#include "fourier_ns/integrator.hpp"
#include "fourier_ns/lattice_sums.hpp"
#include "fourier_ns/shell_diagnostics.hpp"
#include "fourier_ns/small_data.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

using namespace fourier_ns;

namespace {

const BilinearSymbol kLeray{SymbolKind::navier_stokes_leray, 1.0};
const BilinearSymbol kWorst{SymbolKind::worst_case_scalar, 1.0};
const BilinearSymbol kZero{SymbolKind::zero, 1.0};
constexpr double kMachineEps = std::numeric_limits<double>::epsilon();

struct Outcome {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double relative_gap(const Field& fast, const Field& reference) {
  return phi2_norm(fast - reference) / (1.0 + phi2_norm(reference));
}

// ---------------------------------------------------------------------------

Outcome heat_flow_exactness() {
  const auto t0 = std::chrono::steady_clock::now();
  const Field psi = make_small_data(0.1, 4, 1, DataKind::single_mode);
  const TimeGrid grid(1.0, 32);
  const auto [v, rep] = picard_solve(psi, kZero, grid, PicardOptions{1e-12});
  // oracle: psi(xi) exp(-|xi|^2 t) mode by mode
  const auto& lat = psi.lattice();
  double worst = 0.0;
  for (int j = 0; j < grid.nodes(); ++j) {
    const double t = grid.time(j);
    for (Eigen::Index i = 0; i < psi.size(); ++i) {
      const Eigen::Vector3i p = lat.point(i);
      const Eigen::Vector3cd want = psi.values().col(i) * std::exp(-double(p.squaredNorm()) * t);
      worst = std::max(worst, (v.at(j).values().col(i) - want).cwiseAbs().maxCoeff());
    }
  }
  const double secs = seconds_since(t0);
  return {rep.converged && worst <= 1e-12 && secs < 1.0,
          fmt("max abs error %.3g (<= 1e-12), %d iteration(s), %.2f s (< 1 s)", worst, rep.iterations, secs)};
}

Outcome convolution_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  double worst = 0.0;
  int pairs = 0;
  for (const auto& sym : {kLeray, kWorst, kZero})
    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
      const Field u = random_field(8, 2 * seed), w = random_field(8, 2 * seed + 1);
      worst = std::max(worst, relative_gap(bilinear_fft(u, w, sym), bilinear_direct(u, w, sym)));
      ++pairs;
    }
  const double secs = seconds_since(t0);
  return {worst <= 1e-12 && secs < 30.0,
          fmt("%d pairs at R=8, worst relative gap %.3g (<= 1e-12), %.1f s (< 30 s)", pairs, worst, secs)};
}

// Small-data runs shared by the bound, contraction and equicontinuity criteria.
struct SeedRun {
  std::uint64_t seed;
  UniformBoundReport bound;
  EquicontinuityReport equi;
  PicardReport report;
};

SeedRun small_data_run(double eps, std::uint64_t seed) {
  const Field psi = make_small_data(eps, 8, seed, DataKind::random_ball);
  UniformBoundMonitor bound(eps);
  EquicontinuityMonitor equi;
  auto [v, rep] = picard_solve(psi, kWorst, TimeGrid(1.0, 32), PicardOptions{1e-10},
                               [&](int n, const Solution& s) {
                                 bound.observe(n, s);
                                 equi.observe(n, s);
                               });
  return {seed, bound.report(), equi.report(), rep};
}

struct BoundBreak {};

/// True if every iterate of every seed stays within eps / |xi|^2.
bool propagation_holds(double eps, int seeds) {
  for (std::uint64_t seed = 1; seed <= std::uint64_t(seeds); ++seed) {
    const Field psi = make_small_data(eps, 8, seed, DataKind::random_ball);
    UniformBoundMonitor bound(eps);
    try {
      picard_solve(psi, kWorst, TimeGrid(1.0, 32), PicardOptions{1e-10}, [&](int n, const Solution& s) {
        bound.observe(n, s);
        if (!bound.report().pass) throw BoundBreak{};
      });
    } catch (const BoundBreak&) {
      return false;
    }
  }
  return true;
}

std::vector<SeedRun> g_runs_small, g_runs_double;

Outcome bound_propagation() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 1e-3;
  bool all = true;
  double worst = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    g_runs_small.push_back(small_data_run(eps, seed));
    all = all && g_runs_small.back().bound.pass;
    worst = std::max(worst, g_runs_small.back().bound.worst_ratio);
  }
  // bracket the smallness threshold by doubling eps
  double pass_eps = all ? eps : 0.0, fail_eps = 0.0;
  for (double e = 2 * eps; all && e < 10.0; e *= 2) {
    if (propagation_holds(e, 10)) {
      pass_eps = e;
    } else {
      fail_eps = e;
      break;
    }
  }
  const double secs = seconds_since(t0);
  const bool bracket = fail_eps > 0.0 && fail_eps / pass_eps <= 2.0;
  return {all && bracket && secs < 300.0,
          fmt("10 seeds at eps=1e-3: worst |xi|^2|v|/eps %.4f (<= 1); threshold bracket [%.4g, %.4g], ratio %.2f "
              "(<= 2); %.1f s (< 300 s)",
              worst, pass_eps, fail_eps, fail_eps > 0 ? fail_eps / pass_eps : 0.0, secs)};
}

Outcome contraction() {
  bool all = true;
  double worst_ratio = 0.0, worst_residual = 0.0;
  int most_iterations = 0;
  for (const auto& r : g_runs_small) {
    all = all && r.report.converged;
    most_iterations = std::max(most_iterations, r.report.iterations);
    worst_residual = std::max(worst_residual, r.report.final_residual);
    const auto& d = r.report.distances;
    for (std::size_t n = 1; n < d.size(); ++n) {
      // below the rounding floor a step carries no contraction information
      if (d[n - 1] <= 1e3 * kMachineEps * r.report.sup_norm) continue;
      worst_ratio = std::max(worst_ratio, d[n] / d[n - 1]);
    }
  }
  all = all && !g_runs_small.empty() && worst_ratio <= 0.5 && worst_residual <= 10 * 1e-10;
  return {all, fmt("10 converged runs, at most %d iterations; worst d_n/d_(n-1) %.3g (<= 0.5); worst fixed-point "
                   "residual %.3g (<= 1e-9)",
                   most_iterations, worst_ratio, worst_residual)};
}

Outcome lattice_constants() {
  const auto t0 = std::chrono::steady_clock::now();
  // oracle: r3(n) from r2 convolved with squares, enumerated to 4 * 128
  const int cut = 512;
  const std::int64_t n2max = std::int64_t(cut) * cut;
  std::vector<std::int64_t> r2(std::size_t(n2max) + 1, 0), r3(std::size_t(n2max) + 1, 0);
  for (int x = -cut; x <= cut; ++x)
    for (int y = -cut; y <= cut; ++y) {
      const std::int64_t n = std::int64_t(x) * x + std::int64_t(y) * y;
      if (n <= n2max) ++r2[std::size_t(n)];
    }
  for (std::int64_t n = 0; n <= n2max; ++n)
    for (int z = -cut; z <= cut; ++z) {
      const std::int64_t z2 = std::int64_t(z) * z;
      if (z2 <= n) r3[std::size_t(n)] += r2[std::size_t(n - z2)];
    }

  double c = 0.0, c_tail = 0.0, gap = 0.0;
  bool monotone = true;
  double prev = 0.0;
  for (int r = 2; r <= 128; r += 2) {
    double s = 0.0, t = 0.0;
    for (std::int64_t n = 1; n < std::int64_t(r) * r; ++n) s += double(r3[std::size_t(n)]) / double(n);
    for (std::int64_t n = std::int64_t(r) * r; n < 16 * std::int64_t(r) * r; ++n)
      t += double(r3[std::size_t(n)]) / (double(n) * double(n));
    const ShellSum ls = shell_sum_inverse_power(1, r, 2);
    const ShellSum lt = shell_sum_inverse_power(r, std::numeric_limits<double>::infinity(), 4);
    gap = std::max({gap, std::abs(ls.enumerated - s) / s, std::abs(lt.enumerated - t) / t});
    monotone = monotone && ls.enumerated >= prev;
    prev = ls.enumerated;
    c = std::max(c, ls.enumerated / r);
    c_tail = std::max(c_tail, lt.upper() * r);
  }
  const double secs = seconds_since(t0);
  const double four_pi = 4 * M_PI;
  return {gap <= 1e-12 && monotone && c >= 10.0 && c <= 15.0 && std::isfinite(c_tail) && secs < 60.0,
          fmt("r = 2..128: c = %.4f in [10, 15] (%.3f x 4 pi); c' = %.4f (%.3f x 4 pi); oracle gap %.2g; "
              "%.1f s (< 60 s)",
              c, c / four_pi, c_tail, c_tail / four_pi, gap, secs)};
}

Outcome equicontinuity() {
  bool independent = true;
  double worst_spread = 0.0, worst_scaling = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) g_runs_double.push_back(small_data_run(2e-3, seed));
  for (std::size_t i = 0; i < g_runs_small.size(); ++i) {
    const auto& a = g_runs_small[i].equi;
    const auto& b = g_runs_double[i].equi;
    independent = independent && a.n_independent();
    worst_spread = std::max(worst_spread, a.modulus / a.median);
    worst_scaling = std::max(worst_scaling, b.modulus / a.modulus);
  }
  // linear scaling: C(2 eps) / (2 eps) within 5% of C(eps) / eps
  return {!g_runs_small.empty() && independent && worst_scaling <= 2.1,
          fmt("max/median modulus over n %.5f (<= 1.05); C(2 eps)/C(eps) %.5f (<= 2.1)", worst_spread,
              worst_scaling)};
}

Outcome closure() {
  const auto t0 = std::chrono::steady_clock::now();
  const double radius = 32.0;
  std::vector<Frequency> xis;
  const auto lattice = BallLattice::get(radius);
  const auto& lat = *lattice;
  for (Eigen::Index i = 0; i < lat.size(); ++i)
    if (lat.norm2(i) <= 16) xis.emplace_back(lat.point(i));
  std::mt19937_64 gen(2024);
  std::uniform_int_distribution<Eigen::Index> pick(0, lat.size() - 1);
  for (int s = 0; s < 64; ++s) xis.emplace_back(lat.point(pick(gen)));
  for (int k = 5; k <= 32; ++k) xis.emplace_back(Eigen::Vector3i(k, 0, 0));

  double worst = 0.0;
  bool conclusion = true;
  int checks = 0;
  for (double eps : {0.01, 0.02, 0.03})
    for (double mu : {1.0, 2.0, 3.0}) {
      // k_{m+1} = 1, k_m = eps^mu k_{m+1}, k_{-1} below k_m
      const double k_next = 1.0;
      const RegularityShellParams p{0.5 * std::pow(eps, mu), std::pow(eps, mu) * k_next, eps, mu};
      const Field u = saturating_regularity_field(radius, 1.0, p);
      for (const auto& xi : xis) {
        if (xi.norm() < k_next) continue;
        const auto r = shell_diagnostics_regularity(u, kWorst, xi, p);
        worst = std::max(worst, r.aggregate_constant);
        conclusion = conclusion && r.pass();
        ++checks;
      }
    }
  const double secs = seconds_since(t0);
  return {worst <= kClosureConstant && conclusion && secs < 120.0,
          fmt("%d (eps, mu, xi) checks at R=32: worst aggregate constant %.4f (<= 28), conclusion held: %s; "
              "%.1f s (< 120 s)",
              checks, worst, conclusion ? "yes" : "no", secs)};
}

Outcome bootstrap() {
  const auto t0 = std::chrono::steady_clock::now();
  const double eps = 0.03, radius = 32.0, rho = 8.0;
  const Field psi = make_small_data(eps, radius, 7, DataKind::random_ball);
  const auto [v, rep] = picard_solve(psi, kWorst, TimeGrid(10.0, 20), PicardOptions{1e-10});
  if (!rep.converged) return {false, fmt("solve did not converge in %d iterations", rep.iterations)};
  const auto schedule = bootstrap_schedule(eps, rho, rep.sup_norm, 1e-5, 2);
  const auto b = regularity_bootstrap_run(v, schedule, kWorst);
  bool stages = b.stages.size() == 3;
  double min_margin = std::numeric_limits<double>::infinity();
  for (const auto& s : b.stages) {
    stages = stages && s.pass && s.chain_pass && s.chained;
    min_margin = std::min(min_margin, s.margin);
  }
  double min_exponent = std::numeric_limits<double>::infinity();
  for (const auto& f : b.fits) min_exponent = std::min(min_exponent, f.exponent);
  const double secs = seconds_since(t0);
  return {stages && b.terminal_pass && !b.fits.empty() && min_exponent >= 2.25 - 0.15 && secs < 600.0,
          fmt("eps=0.03 R=32 depth 2: stages pass: %s (min margin %.3g), terminal decay: %s, smallest fitted "
              "exponent over %zu nodes t >= %g: %.3f (>= 2.1); %.1f s (< 600 s)",
              stages ? "yes" : "no", min_margin, b.terminal_pass ? "yes" : "no", b.fits.size(), rho, min_exponent,
              secs)};
}

Outcome region_coverage() {
  const auto lattice = BallLattice::get(64.0);
  const auto& lat = *lattice;
  std::mt19937_64 gen(7);
  std::uniform_int_distribution<Eigen::Index> pick(0, lat.size() - 1);
  int pairs = 0, bad8 = 0, bad3 = 0;
  while (pairs < 1000) {
    const Eigen::Vector3i xi = lat.point(pick(gen)), q = lat.point(pick(gen));
    if (lat.find(Eigen::Vector3i(xi - q)) < 0) continue;  // xi - q must be a stored nonzero mode
    const auto g = pair_geometry(xi, q);
    bad8 += claim_count(kSmoothingRegions, g) == 1 ? 0 : 1;
    bad3 += claim_count(kExistenceRegions, g) == 1 ? 0 : 1;
    ++pairs;
  }
  return {bad8 == 0 && bad3 == 0,
          fmt("%d admissible pairs at R=64: %d misclaimed in the 8-region split, %d in the 3-region split", pairs,
              bad8, bad3)};
}

Outcome performance() {
  double gate = 0.0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Field u = random_field(8, 500 + seed), w = random_field(8, 600 + seed);
    gate = std::max(gate, relative_gap(bilinear_fft(u, w, kLeray), bilinear_direct(u, w, kLeray)));
  }
  double spot = 0.0;
  for (std::uint64_t seed = 1; seed <= 2; ++seed) {
    const Field u = random_field(16, 700 + seed), w = random_field(16, 800 + seed);
    spot = std::max(spot, relative_gap(bilinear_fft(u, w, kLeray), bilinear_direct(u, w, kLeray)));
  }
  const Field u = random_field(32, 901), w = random_field(32, 902);
  auto t0 = std::chrono::steady_clock::now();
  const Field d = bilinear_direct(u, w, kLeray);
  const double t_direct = seconds_since(t0);
  t0 = std::chrono::steady_clock::now();
  const Field f = bilinear_fft(u, w, kLeray);
  const double t_fft = seconds_since(t0);
  const double gap32 = relative_gap(f, d);
  const double speedup = t_direct / t_fft;
  return {speedup >= 10.0 && gate <= 1e-12 && spot <= 1e-12 && gap32 <= 1e-12,
          fmt("R=32 direct %.2f s, fft %.3f s, speedup %.1fx (>= 10x); gaps R=8 %.2g, R=16 %.2g, R=32 %.2g "
              "(<= 1e-12)",
              t_direct, t_fft, speedup, gate, spot, gap32)};
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria{
      {"heat-flow exactness", heat_flow_exactness},
      {"convolution oracle equivalence", convolution_equivalence},
      {"uniform bound propagation", bound_propagation},
      {"contraction and convergence", contraction},
      {"lattice inequality constants", lattice_constants},
      {"equicontinuity", equicontinuity},
      {"one-step closure", closure},
      {"bootstrap induction", bootstrap},
      {"region coverage", region_coverage},
      {"performance gate", performance},
  };
  int failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o{false, ""};
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    failures += o.pass ? 0 : 1;
    std::printf("criterion %zu %s: %s: %s\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first, o.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - std::size_t(failures), criteria.size());
  return failures == 0 ? 0 : 1;
}
