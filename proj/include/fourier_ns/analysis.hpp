#pragma once

#include "fourier_ns/integrator.hpp"
#include "fourier_ns/lattice.hpp"
#include "fourier_ns/symbol.hpp"

#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

namespace fourier_ns {

using Solution = Trajectory<double>;

// ---------------------------------------------------------------------------
// Bootstrap schedule

/// paper_literal: mu_0 = mu_1 = 1, mu_{n+1} = 2 mu_n - 1 (constant 1).
/// corrected: mu_0 = 1, mu_1 = 2, mu_{n+1} = 2 mu_n - 1, so mu_n = 2^(n-1) + 1.
enum class RecurrenceMode { paper_literal, corrected };
std::string_view to_string(RecurrenceMode mode);
RecurrenceMode parse_recurrence_mode(std::string_view name);

/// Shell thresholds k_n = k_0 / eps^(2^n), times tau_n = rho - rho / 2^n and
/// exponents mu_n for n = 0..depth + 1 (the extra entry is the next level).
struct BootstrapSchedule {
  double eps = 0.0;
  double rho = 0.0;
  double D = 0.0;
  double k_minus1 = 0.0;
  double k0 = 0.0;
  int depth = 0;
  RecurrenceMode mode = RecurrenceMode::corrected;
  std::vector<int> mu;
  std::vector<double> k;
  std::vector<double> tau;
};

/// Smallest eps rejected: above it the one-step closure constant 28 no longer
/// fits under 1/eps.
inline constexpr double kMaxBootstrapEps = 1.0 / 28.0;

/// k_0 is the smallest double with (k_minus1 / k_0) D < min(eps, 1/2).
BootstrapSchedule bootstrap_schedule(double eps, double rho, double D, double k_minus1, int depth,
                                     RecurrenceMode mode = RecurrenceMode::corrected);

/// Largest depth whose threshold k_depth stays within the radius (-1 if none).
int max_feasible_depth(double eps, double k0, double radius);

class InfeasibleSchedule : public std::invalid_argument {
 public:
  InfeasibleSchedule(const std::string& what, int max_depth)
      : std::invalid_argument(what), max_depth_(max_depth) {}
  int max_feasible_depth() const { return max_depth_; }

 private:
  int max_depth_;
};

// ---------------------------------------------------------------------------
// Shell decay

struct ShellDecay {
  bool pass = true;
  double margin = 0.0;  ///< min over |xi| >= k of bound/|xi|^2 - max_k |f^k(xi)|
  Eigen::Vector3i worst = Eigen::Vector3i::Zero();
};

/// Checks |f^k(xi)| <= bound / |xi|^2 for all |xi| >= k; requires k <= R.
ShellDecay shell_decay_check(const Field& f, double k, double bound);

// ---------------------------------------------------------------------------
// Uniform bound and equicontinuity over the iterates of one solve

struct UniformBoundReport {
  double eps = 0.0;
  bool pass = true;
  double worst_margin = std::numeric_limits<double>::infinity();  ///< min eps/|xi|^2 - |v|
  double worst_ratio = 0.0;  ///< max |xi|^2 |v| / eps
  int worst_iterate = -1;
  int worst_node = -1;
  Eigen::Vector3i worst_frequency = Eigen::Vector3i::Zero();
  int iterates = 0;
};

/// Incremental form, usable as a picard_solve observer.
class UniformBoundMonitor {
 public:
  explicit UniformBoundMonitor(double eps) { report_.eps = eps; }
  void observe(int n, const Solution& v);
  const UniformBoundReport& report() const { return report_; }

 private:
  UniformBoundReport report_;
};

UniformBoundReport uniform_bound_report(std::span<const Solution> iterates, double eps);

/// max over xi, adjacent nodes of |v(xi, t2) - v(xi, t1)| / (t2 - t1).
double lipschitz_modulus(const Solution& v);

struct EquicontinuityReport {
  std::vector<double> per_iterate;
  double modulus = 0.0;  ///< max over iterates
  double median = 0.0;
  /// max within 5% of the median over iterates
  bool n_independent() const { return modulus <= 1.05 * median; }
};

class EquicontinuityMonitor {
 public:
  void observe(int n, const Solution& v);
  EquicontinuityReport report() const;

 private:
  std::vector<double> moduli_;
};

double equicontinuity_modulus(std::span<const Solution> iterates);
EquicontinuityReport equicontinuity_report(std::span<const Solution> iterates);

// ---------------------------------------------------------------------------
// Decay fits

struct DecayFit {
  double exponent = 0.0;   ///< |f| ~ D |xi|^-exponent
  double prefactor = 0.0;  ///< D
  double k_min = 0.0;      ///< smallest |xi| used
  double k_max = 0.0;      ///< largest |xi| used
  int shells = 0;
  double residual = 0.0;  ///< max |log deviation| from the fit
};

/// Least squares of log(shell max) against log|xi| over shells |xi| >= k_min.
/// Shells whose maximum is zero or below noise_floor times the largest shell
/// maximum are skipped. Throws std::invalid_argument with fewer than 3 shells.
DecayFit fit_decay_exponent(const Field& f, double k_min, double noise_floor = 0.0);

/// Duhamel-gain profile B(u, u)(xi) / |xi|^2 (bounds the Duhamel term of a
/// solution with data u at every later time).
Field smoothing_gain_profile(const Field& u, const BilinearSymbol& sym);

// ---------------------------------------------------------------------------
// Bootstrap run

struct StageReport {
  int m = 0;
  double k = 0.0;
  double tau = 0.0;
  double level = 0.0;  ///< eps^mu_m
  int restart_node = 0;
  int nodes_checked = 0;
  bool pass = true;   ///< computed solution within level / |xi|^2
  double margin = 0.0;
  bool chain_pass = true;  ///< restarted Duhamel bound within level / |xi|^2
  double chain_margin = 0.0;
  /// Restart data at tau_m satisfies the previous stage's bound.
  bool chained = true;
};

struct BootstrapReport {
  BootstrapSchedule schedule;
  std::vector<StageReport> stages;
  bool terminal_pass = true;  ///< |v| <= D / |xi|^(2 + 1/4) for t >= rho, |xi| >= k_0
  double terminal_margin = 0.0;
  std::vector<double> fit_times;
  std::vector<DecayFit> fits;  ///< per node t >= rho
  bool pass() const {
    for (const auto& s : stages)
      if (!s.pass || !s.chain_pass || !s.chained) return false;
    return terminal_pass;
  }
};

struct BootstrapOptions {
  ConvolutionMethod method = ConvolutionMethod::fft;
  int threads = 0;
  double fit_noise_floor = 1e-13;
  /// Terminal decay exponent 2 + terminal_gain.
  double terminal_gain = 0.25;
};

/// Runs Property (P) for stages 0..depth on a computed solution. Throws
/// InfeasibleSchedule if k_depth > R and std::invalid_argument if rho is not
/// inside the horizon.
BootstrapReport regularity_bootstrap_run(const Solution& traj, const BootstrapSchedule& schedule,
                                         const BilinearSymbol& sym, const BootstrapOptions& opt = {});

}  // namespace fourier_ns
