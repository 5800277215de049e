#include "fourier_ns/analysis.hpp"
#include "fourier_ns/shell_diagnostics.hpp"
#include "fourier_ns/small_data.hpp"
#include "support.hpp"

#include <doctest.h>

#include <cmath>

using namespace fourier_ns;

namespace {

const BilinearSymbol kWorst{SymbolKind::worst_case_scalar, 1.0};
const BilinearSymbol kZero{SymbolKind::zero, 1.0};

Field radial(double radius, double (*profile)(double)) {
  Field f(radius, true);
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < f.size(); ++i)
    f.values().col(i).setConstant(profile(std::sqrt(double(lat.norm2(i)))));
  return f;
}

std::vector<Solution> collect(const Field& psi, const BilinearSymbol& sym, const TimeGrid& grid) {
  std::vector<Solution> out;
  picard_solve(psi, sym, grid, PicardOptions{}, [&](int, const Solution& v) { out.push_back(v); });
  return out;
}

}  // namespace

TEST_CASE("schedule examples") {
  const auto s = bootstrap_schedule(0.01, 1.0, 1.0, 1e-5, 3);
  REQUIRE(s.k.size() == 5);
  CHECK(s.k[1] / s.k[0] == doctest::Approx(1e2));
  CHECK(s.k[2] / s.k[0] == doctest::Approx(1e6));
  CHECK(s.tau[0] == 0.0);
  CHECK(s.tau[1] == 0.5);
  CHECK(s.tau[2] == 0.75);
  CHECK(s.mu == std::vector<int>{1, 2, 3, 5, 9});

  // eps = 0.1 exceeds the closure threshold, but the arithmetic is the same:
  // k_{n+1} / k_n = eps^(-2^n) gives k_1 = 100 k_0 and k_2 = 10^4 k_0
  for (int n = 0; n < 4; ++n) CHECK(std::pow(0.1, -std::pow(2.0, n + 1)) / std::pow(0.1, -std::pow(2.0, n)) ==
                                    doctest::Approx(std::pow(0.1, -std::pow(2.0, n))));

  const auto lit = bootstrap_schedule(0.01, 1.0, 1.0, 1e-5, 3, RecurrenceMode::paper_literal);
  CHECK(lit.mu == std::vector<int>{1, 1, 1, 1, 1});
  CHECK(lit.k == s.k);
}

TEST_CASE("schedule invariants") {
  for (double eps : {1e-3, 0.01, 0.03})
    for (double D : {1e-3, 0.5, 4.0})
      for (int depth : {0, 1, 2, 3}) {
        const auto s = bootstrap_schedule(eps, 2.0, D, 1e-4, depth);
        CHECK(s.depth == depth);
        CHECK(s.k_minus1 / s.k0 * D < std::min(eps, 0.5));
        // k0 is the smallest such value
        CHECK_FALSE(s.k_minus1 / std::nextafter(s.k0, 0.0) * D < std::min(eps, 0.5));
        REQUIRE(s.k.size() == std::size_t(depth) + 2);
        for (std::size_t n = 0; n < s.k.size(); ++n)
          CHECK(s.k[n] == doctest::Approx(s.k0 / std::pow(eps, std::pow(2.0, double(n)))).epsilon(1e-13));
        for (std::size_t n = 1; n < s.k.size(); ++n) {
          CHECK(s.k[n] > s.k[n - 1]);
          CHECK(s.tau[n] > s.tau[n - 1]);
          CHECK(s.tau[n] < s.rho);
          CHECK(s.mu[n] >= s.mu[n - 1]);
          CHECK(s.mu[n] >= std::pow(2.0, double(n) - 1));
          CHECK(s.k[n - 1] / s.k[n] <= std::pow(eps, s.mu[n - 1]) * (1 + 1e-12));
        }
      }
  CHECK(parse_recurrence_mode("corrected") == RecurrenceMode::corrected);
  CHECK(to_string(RecurrenceMode::paper_literal) == "paper_literal");
  CHECK_THROWS(parse_recurrence_mode("other"));
}

TEST_CASE("schedule rejects closure-breaking eps and bad inputs") {
  CHECK_THROWS_AS(bootstrap_schedule(kMaxBootstrapEps, 1.0, 1.0, 1e-5, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_schedule(0.1, 1.0, 1.0, 1e-5, 1), std::invalid_argument);
  CHECK_NOTHROW(bootstrap_schedule(0.035, 1.0, 1.0, 1e-5, 1));
  CHECK_THROWS_AS(bootstrap_schedule(0.01, 0.0, 1.0, 1e-5, 1), std::invalid_argument);
  CHECK_THROWS_AS(bootstrap_schedule(0.01, 1.0, 1.0, 1e-5, -1), std::invalid_argument);
}

TEST_CASE("feasible depth") {
  // eps = 0.03, k0 = 1e-6: k = 3.3e-5, 1.1e-3, 1.23, 1.5e6
  CHECK(max_feasible_depth(0.03, 1e-6, 32.0) == 2);
  CHECK(max_feasible_depth(0.03, 0.5, 32.0) == 0);
  CHECK(max_feasible_depth(0.03, 1.0, 32.0) == -1);
}

TEST_CASE("shell decay check") {
  const double bound = 0.5;
  const Field zero(6.0);
  auto z = shell_decay_check(zero, 2.0, bound);
  CHECK(z.pass);
  CHECK(z.margin == doctest::Approx(bound / 36));

  Field sat(6.0);
  const auto& lat = sat.lattice();
  for (Eigen::Index i = 0; i < sat.size(); ++i) sat.values().col(i).setConstant(bound / double(lat.norm2(i)));
  const auto s = shell_decay_check(sat, 2.0, bound);
  CHECK(s.pass);
  CHECK(s.margin == doctest::Approx(0.0).epsilon(1e-15));

  Field bad = sat;
  bad.set(Frequency(Eigen::Vector3i(3, 1, 0)), Eigen::Vector3cd(0, 2 * bound / 10, 0));
  const auto b = shell_decay_check(bad, 2.0, bound);
  CHECK_FALSE(b.pass);
  CHECK(b.margin == doctest::Approx(-bound / 10));
  CHECK(b.worst == Eigen::Vector3i(3, 1, 0));
  // modes below k are not constrained
  CHECK(shell_decay_check(bad, 3.5, bound).pass);
  CHECK_THROWS_AS(shell_decay_check(zero, 7.0, bound), std::invalid_argument);
}

TEST_CASE("uniform bound over iterates") {
  const TimeGrid grid(1.0, 16);
  const Field small = make_small_data(1e-3, 8, 2, DataKind::random_ball);
  const auto heat = collect(small, kZero, grid);
  const auto r0 = uniform_bound_report(heat, 1e-3);
  CHECK(r0.pass);
  CHECK(r0.worst_margin >= 0.0);

  const auto run = collect(small, kWorst, grid);
  CHECK(run.size() >= 3);
  const auto r1 = uniform_bound_report(run, 1e-3);
  CHECK(r1.pass);
  CHECK(r1.iterates == int(run.size()));
  CHECK(r1.worst_ratio <= 1.0);

  // the monitor sees the same numbers
  UniformBoundMonitor mon(1e-3);
  for (std::size_t n = 0; n < run.size(); ++n) mon.observe(int(n), run[n]);
  CHECK(mon.report().worst_ratio == r1.worst_ratio);

  const Field large = make_small_data(1.0, 6, 2, DataKind::random_ball);
  std::vector<Solution> big;
  picard_solve(large, kWorst, grid, PicardOptions{1e-10, 4}, [&](int, const Solution& v) { big.push_back(v); });
  const auto r2 = uniform_bound_report(big, 1.0);
  CHECK_FALSE(r2.pass);
  CHECK(r2.worst_ratio > 1.0);
  CHECK(r2.worst_iterate >= 1);
}

TEST_CASE("equicontinuity") {
  const TimeGrid grid(1.0, 10);
  const Field psi = make_small_data(0.1, 5, 3, DataKind::random_ball);
  Solution still{grid, std::vector<Field>(11, psi)};
  CHECK(lipschitz_modulus(still) == 0.0);

  Field one(4.0);
  one.set(Frequency(Eigen::Vector3i(1, 1, 0)), Eigen::Vector3cd(0.3, 0, 0));
  const double m = lipschitz_modulus(heat_trajectory(one, grid));
  CHECK(m > 0.0);
  CHECK(m <= 2.0 * 0.3);

  const auto run = collect(make_small_data(1e-3, 8, 4, DataKind::random_ball), kWorst, TimeGrid(1.0, 16));
  const auto rep = equicontinuity_report(run);
  CHECK(rep.per_iterate.size() == run.size());
  CHECK(std::isfinite(rep.modulus));
  CHECK(rep.modulus == equicontinuity_modulus(run));
  CHECK(rep.n_independent());

  EquicontinuityMonitor mon;
  for (std::size_t n = 0; n < run.size(); ++n) mon.observe(int(n), run[n]);
  CHECK(mon.report().modulus == rep.modulus);
}

TEST_CASE("decay fit on power laws") {
  for (double p : {2.0, 2.25, 3.0, 4.0})
    for (double D : {1.0, 0.37}) {
      Field f(20.0);
      const auto& lat = f.lattice();
      for (Eigen::Index i = 0; i < f.size(); ++i)
        f.values().col(i).setConstant(D * std::pow(double(lat.norm2(i)), -p / 2));
      const auto fit = fit_decay_exponent(f, 2.0);
      CHECK(fit.exponent == doctest::Approx(p).epsilon(1e-10));
      CHECK(fit.prefactor == doctest::Approx(D).epsilon(1e-10));
      CHECK(fit.residual <= 1e-12);
      CHECK(fit.k_min >= 2.0);
      CHECK(fit.k_max == doctest::Approx(20.0));
    }
}

TEST_CASE("decay fit sees super-polynomial decay") {
  const Field f = radial(24.0, [](double r) { return std::exp(-r) / (r * r); });
  double prev = 0.0;
  for (double k : {2.0, 4.0, 8.0}) {
    const double e = fit_decay_exponent(f, k).exponent;
    CHECK(e > prev);
    prev = e;
  }
  // heat flow at t = 1 from flat data
  double last = 0.0;
  for (double r : {6.0, 10.0, 16.0}) {
    const Field g = heat_propagate(radial(r, [](double) { return 1.0; }), 1.0);
    const double e = fit_decay_exponent(g, 1.0).exponent;
    CHECK(e > last);
    last = e;
  }
  CHECK(last > 20.0);
}

TEST_CASE("decay fit needs three shells") {
  const Field f = radial(4.0, [](double r) { return 1 / (r * r); });
  // shells 14 and 16 lie above 3.7; 13, 14 and 16 above 3.5
  CHECK_THROWS_AS(fit_decay_exponent(f, 3.7), std::invalid_argument);
  CHECK_NOTHROW(fit_decay_exponent(f, 3.5));
}

TEST_CASE("smoothing gain on a power-law profile") {
  const double eta = 0.25;
  const Field u = power_law_field(32.0, 1.0, eta);
  const auto fit = fit_decay_exponent(smoothing_gain_profile(u, kWorst), 4.0);
  MESSAGE("gain exponent " << fit.exponent);
  CHECK(fit.exponent >= 2.0 + std::min(0.5, 1.5 * eta) - 0.15);
}

TEST_CASE("bootstrap on a heat-only solution passes every stage") {
  // every threshold is below 1 here, so the |xi| = 1 shell must cool from
  // eps/2 to eps^2 by tau_1 = rho/2, which takes rho of order 6
  const TimeGrid grid(10.0, 20);
  const Field psi = make_small_data(0.03, 8, 1, DataKind::random_ball);
  const auto [v, rep] = picard_solve(psi, kZero, grid, PicardOptions{});
  const auto s = bootstrap_schedule(0.03, 8.0, rep.sup_norm, 1e-5, 1);
  const auto b = regularity_bootstrap_run(v, s, kZero);
  REQUIRE(b.stages.size() == 2);
  for (const auto& st : b.stages) {
    CHECK(st.pass);
    CHECK(st.chain_pass);
    CHECK(st.chained);
  }
  CHECK(b.terminal_pass);
  CHECK(b.pass());
  CHECK_FALSE(b.fits.empty());
  CHECK(b.fits.size() == b.fit_times.size());
  for (double t : b.fit_times) CHECK(t >= 8.0);
}

TEST_CASE("bootstrap rejects schedules that do not fit") {
  const TimeGrid grid(2.0, 8);
  const Field psi = make_small_data(0.03, 8, 1, DataKind::random_ball);
  const auto [v, rep] = picard_solve(psi, kWorst, grid, PicardOptions{});
  const auto s = bootstrap_schedule(0.03, 1.0, rep.sup_norm, 1e-5, 4);
  try {
    regularity_bootstrap_run(v, s, kWorst);
    FAIL("expected rejection");
  } catch (const InfeasibleSchedule& e) {
    CHECK(e.max_feasible_depth() >= 0);
    CHECK(e.max_feasible_depth() < 4);
    CHECK(s.k[std::size_t(e.max_feasible_depth())] <= 8.0);
  }
  const auto late = bootstrap_schedule(0.03, 3.0, rep.sup_norm, 1e-5, 0);
  CHECK_THROWS_AS(regularity_bootstrap_run(v, late, kWorst), std::invalid_argument);
}
