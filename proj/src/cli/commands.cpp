#include "fourier_ns/commands.hpp"

#include "fourier_ns/analysis.hpp"
#include "fourier_ns/field_io.hpp"
#include "fourier_ns/integrator.hpp"
#include "fourier_ns/parallel.hpp"
#include "fourier_ns/report.hpp"
#include "fourier_ns/shell_diagnostics.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fourier_ns {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kVersion = FOURIER_NS_VERSION;

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string snapshot_name(int node) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "node_%05d.txt", node);
  return buf;
}

Field initial_data(const RunConfig& c) {
  return make_small_data(c.epsilon, c.radius, c.data.seed, c.data.kind,
                         SmallDataOptions{c.data.mode, c.data.solenoidal});
}

PicardOptions picard_options(const RunConfig& c) {
  return PicardOptions{c.tolerance, c.max_iter, c.convolution, 0};
}

std::vector<int> snapshot_nodes(const RunConfig& c) {
  std::vector<int> nodes;
  const int stride = c.snapshot_stride > 0 ? c.snapshot_stride : c.steps;
  for (int j = 0; j <= c.steps; j += stride) nodes.push_back(j);
  if (nodes.back() != c.steps) nodes.push_back(c.steps);
  return nodes;
}

ordered_json report_json(const PicardReport& r) {
  ordered_json j;
  j["iterations"] = r.iterations;
  j["converged"] = r.converged;
  j["distances"] = r.distances;
  j["final_residual"] = r.final_residual;
  j["tail_allowance"] = r.tail_allowance;
  j["quadrature_defect"] = std::isfinite(r.quadrature_defect) ? ordered_json(r.quadrature_defect) : ordered_json();
  j["sup_norm"] = r.sup_norm;
  return j;
}

std::string utc_now() {
  const std::time_t t = std::time(nullptr);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

/// Version and configuration, embedded in every artifact.
ordered_json provenance(const RunConfig& c) { return {{"version", kVersion}, {"config", to_json(c)}}; }

/// Comment lines opening each CSV artifact.
std::string csv_preamble(const RunConfig& c) {
  return std::string("# fourier-ns ") + kVersion + "\n# config " + to_json(c).dump() + "\n";
}

void write_file(const fs::path& p, const std::string& text) {
  std::ofstream out(p);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

/// Per dyadic shell sup of |xi|^2 max_k |v^k(xi)|.
std::vector<double> dyadic_sups(const Field& f, int shells) {
  std::vector<double> s(std::size_t(shells), 0.0);
  const auto& lat = f.lattice();
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const int d = dyadic_shell(lat.norm2(i));
    s[std::size_t(d)] = std::max(s[std::size_t(d)], double(lat.norm2(i)) * f.values().col(i).cwiseAbs().maxCoeff());
  }
  return s;
}

struct Artifacts {
  RunConfig config;
  ordered_json manifest;
  fs::path dir;
};

/// Reads the manifest in the output directory; throws ConfigError if absent.
Artifacts load_artifacts(const CommandOptions& opt) {
  RunConfig base = resolve_config(opt);
  const fs::path dir = base.output_dir;
  const fs::path mpath = dir / kManifest;
  if (!fs::exists(mpath)) throw ConfigError("missing artifacts: " + mpath.string() + " not found (run solve first)");
  std::ifstream in(mpath);
  ordered_json m;
  try {
    m = ordered_json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("unreadable manifest " + mpath.string() + ": " + e.what());
  }
  if (!m.contains("config")) throw ConfigError("manifest without config: " + mpath.string());
  RunConfig c = config_from_json(json::parse(m["config"].dump()));
  c.output_dir = dir.string();
  if (opt.threads) set_default_threads(*opt.threads);
  return {c, m, dir};
}

/// Re-derives the solution from the recorded configuration and checks it
/// against the stored snapshots.
struct Reproduced {
  Solution solution;
  PicardReport report;
  double snapshot_mismatch = 0.0;
};

Reproduced reproduce(const Artifacts& a, const IterateObserver<double>& observer) {
  const RunConfig& c = a.config;
  const Field psi = initial_data(c);
  auto [v, rep] = picard_solve(psi, c.symbol, TimeGrid(c.horizon, c.steps), picard_options(c), observer);
  Reproduced r{std::move(v), rep, 0.0};
  for (const auto& s : a.manifest.value("snapshots", ordered_json::array())) {
    const int node = s.at("node").get<int>();
    const fs::path p = a.dir / s.at("file").get<std::string>();
    if (!fs::exists(p)) throw ConfigError("missing artifacts: snapshot " + p.string());
    const Snapshot snap = read_snapshot(p);
    snap.field.require_same_radius(r.solution.at(node));
    const double d = (snap.field.values() - r.solution.at(node).values()).cwiseAbs().maxCoeff();
    r.snapshot_mismatch = std::max(r.snapshot_mismatch, d);
  }
  return r;
}

std::vector<Frequency> sample_frequencies(double radius) {
  const int h = std::max(1, int(std::floor(radius / 2)));
  const int top = int(std::floor(radius));
  std::vector<Eigen::Vector3i> cand{{1, 0, 0}, {1, 1, 0}, {1, 1, 1}, {2, 1, 0},  {h, 0, 0},
                                    {h, 1, 1}, {top, 0, 0}, {-1, 2, 6}, {3, -2, 1}};
  std::vector<Frequency> out;
  for (const auto& c : cand) {
    if (double(c.cast<double>().norm()) > radius) continue;
    const Frequency f(c);
    if (std::find(out.begin(), out.end(), f) == out.end()) out.push_back(f);
  }
  return out;
}

ordered_json xi_json(const Frequency& xi) { return {xi.vec().x(), xi.vec().y(), xi.vec().z()}; }

}  // namespace

int dyadic_shell(std::int64_t norm2) {
  int s = 0;
  while (std::int64_t(1) << (2 * (s + 1)) <= norm2) ++s;
  return s;
}

RunConfig resolve_config(const CommandOptions& opt) {
  RunConfig c = opt.config ? load_config(*opt.config) : RunConfig{};
  if (opt.seed) {
    c.data.seed = *opt.seed;
    c.bench.seed = *opt.seed;
  }
  if (opt.out) c.output_dir = opt.out->string();
  if (opt.threads) {
    if (*opt.threads < 1) throw ConfigError("--threads must be >= 1");
    set_default_threads(*opt.threads);
  }
  validate(c);
  return c;
}

// ---------------------------------------------------------------------------

int cmd_solve(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  RunConfig c;
  try {
    c = resolve_config(opt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }

  const Field psi = initial_data(c);
  const TimeGrid grid(c.horizon, c.steps);
  log << "solve: eps=" << c.epsilon << " R=" << c.radius << " T=" << c.horizon << " M=" << c.steps
      << " symbol=" << to_string(c.symbol.kind) << " lattice points=" << psi.size() << '\n';
  auto [v, rep] = picard_solve(psi, c.symbol, grid, picard_options(c),
                               [&](int n, const Solution&) { log << "  iterate " << n << " done\n"; });
  for (std::size_t n = 0; n < rep.distances.size(); ++n)
    log << "  d_" << n + 1 << " = " << g17(rep.distances[n]) << '\n';

  const fs::path out = c.output_dir;
  const fs::path stage = out.string() + ".staging";
  fs::remove_all(stage);
  fs::create_directories(stage / "snapshots");

  std::ostringstream conv;
  conv << csv_preamble(c) << "iteration,distance\n";
  for (std::size_t n = 0; n < rep.distances.size(); ++n) conv << n + 1 << ',' << g17(rep.distances[n]) << '\n';
  write_file(stage / "convergence.csv", conv.str());

  const int shells = dyadic_shell(psi.lattice().max_norm2()) + 1;
  std::ostringstream ts;
  ts << csv_preamble(c) << "t,phi2_norm";
  for (int s = 0; s < shells; ++s) ts << ",shell_" << s;
  ts << '\n';
  for (int j = 0; j < grid.nodes(); ++j) {
    ts << g17(grid.time(j)) << ',' << g17(phi2_norm(v.at(j)));
    for (double x : dyadic_sups(v.at(j), shells)) ts << ',' << g17(x);
    ts << '\n';
  }
  write_file(stage / "timeseries.csv", ts.str());

  ordered_json snaps = ordered_json::array();
  for (int j : snapshot_nodes(c)) {
    const std::string name = "snapshots/" + snapshot_name(j);
    SnapshotMeta meta{false, std::string(kGeneratorName), c.data.seed, std::string(to_string(c.data.kind)),
                      grid.time(j), kVersion, to_json(c).dump()};
    write_snapshot(stage / name, v.at(j), meta);
    snaps.push_back({{"node", j}, {"time", grid.time(j)}, {"file", name}});
  }

  ordered_json m;
  m["version"] = kVersion;
  m["created_utc"] = utc_now();
  m["generator"] = kGeneratorName;
  m["config"] = to_json(c);
  m["grid"] = {{"horizon", grid.horizon()}, {"steps", grid.steps()}, {"step", grid.step()}};
  m["lattice_points"] = psi.size();
  m["report"] = report_json(rep);
  m["snapshots"] = snaps;
  write_file(stage / kManifest, m.dump(2) + "\n");

  fs::remove_all(out);
  if (out.has_parent_path()) fs::create_directories(out.parent_path());
  fs::rename(stage, out);

  log << "solve: " << (rep.converged ? "converged" : "did not converge") << " after " << rep.iterations
      << " iterations; residual " << g17(rep.final_residual) << "; artifacts in " << out.string() << '\n';
  return rep.converged ? kExitOk : kExitNonConvergence;
}

// ---------------------------------------------------------------------------

int cmd_verify(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  Artifacts a;
  try {
    a = load_artifacts(opt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const RunConfig& c = a.config;
  UniformBoundMonitor bound(c.epsilon);
  EquicontinuityMonitor equi;
  double herm = 0.0, div = 0.0, scale = 0.0;
  std::optional<Reproduced> rr;
  try {
    rr.emplace(reproduce(a, [&](int n, const Solution& v) {
      bound.observe(n, v);
      equi.observe(n, v);
      for (const auto& s : v.states) {
        herm = std::max(herm, hermitian_defect(s));
        div = std::max(div, divergence_defect(s));
        scale = std::max(scale, s.values().size() ? double(s.values().cwiseAbs().maxCoeff()) : 0.0);
      }
    }));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const Reproduced& r = *rr;
  const Solution& v = r.solution;
  const PicardReport& rep = r.report;
  const ordered_json run = {{"epsilon", c.epsilon}, {"radius", c.radius},  {"horizon", c.horizon},
                            {"steps", c.steps},     {"seed", c.data.seed}, {"symbol", to_string(c.symbol.kind)}};
  DiagnosticsReport report;

  report.add_upper("artifact.reproduced", "stored snapshots match a re-run of the recorded configuration", run,
                   r.snapshot_mismatch, 0.0);
  report.add_upper("solve.converged", "Picard distances fall below the tolerance", run,
                   rep.distances.empty() ? 0.0 : rep.distances.back(), c.tolerance)
      .pass = rep.converged;
  report.add_upper("solve.fixed_point_residual", "discrete fixed-point defect within 10 tol", run,
                   rep.final_residual, 10 * c.tolerance);
  {
    double worst = 0.0;
    const double floor = 1e3 * std::numeric_limits<double>::epsilon() * std::max(rep.sup_norm, 1e-300);
    for (std::size_t n = 1; n < rep.distances.size(); ++n)
      if (rep.distances[n - 1] > floor && rep.distances[n] > floor)
        worst = std::max(worst, rep.distances[n] / rep.distances[n - 1]);
    report.add_upper("solve.contraction_ratio", "distances decrease geometrically with ratio at most 1/2", run,
                     worst, 0.5);
  }
  {
    const auto& b = bound.report();
    ordered_json in = run;
    in["worst_iterate"] = b.worst_iterate;
    in["worst_node"] = b.worst_node;
    in["worst_frequency"] = {b.worst_frequency.x(), b.worst_frequency.y(), b.worst_frequency.z()};
    report.add_upper("uniform_bound", "every iterate satisfies |v_n(xi,t)| <= eps/|xi|^2", in,
                     b.worst_ratio, 1.0);
  }
  {
    const auto e = equi.report();
    ordered_json in = run;
    in["per_iterate"] = e.per_iterate;
    report.add_upper("equicontinuity", "Lipschitz-in-time modulus independent of the iterate", in,
                     e.modulus, 1.05 * e.median);
  }
  {
    const int mid = c.steps / 2;
    const auto forcing = forcing_samples(v, c.symbol, c.convolution);
    ordered_json in = run;
    in["tau"] = v.grid.time(mid);
    report.add_upper("solve.restart_residual", "restarted Duhamel identity holds within 10 tol", in,
                     restart_defect(v, mid, forcing), 10 * c.tolerance);
  }
  report.add_upper("invariant.hermitian", "solution stays Hermitian at every node of every iterate", run, herm,
                   1e-12 * std::max(scale, 1e-300));
  if (c.symbol.kind == SymbolKind::navier_stokes_leray && c.data.solenoidal)
    report.add_upper("invariant.divergence", "solution stays divergence free", run, div,
                     1e-12 * std::max(scale, 1e-300));

  // Region split of the bilinear term at the node of largest norm.
  int peak = 0;
  for (int j = 0; j < v.grid.nodes(); ++j)
    if (phi2_norm(v.at(j)) > phi2_norm(v.at(peak))) peak = j;
  const double eps_run = std::max(c.epsilon, phi2_norm(v.at(peak)));
  for (const auto& xi : sample_frequencies(c.radius)) {
    const auto s = shell_diagnostics_existence(v.at(peak), c.symbol, xi, eps_run);
    for (std::size_t k = 0; k < 3; ++k) {
      ordered_json in = run;
      in["xi"] = xi_json(xi);
      in["t"] = v.grid.time(peak);
      in["region"] = to_string(kExistenceRegions[k]);
      in["count"] = s.counts[k];
      report.add_upper("region_bound", "bilinear partial sum within its region estimate", in, s.parts[k],
                       s.claimed_parts[k]);
    }
  }

  // Closure of one bootstrap step on synthetic fields saturating its hypotheses.
  if (c.epsilon < kMaxBootstrapEps) {
    for (int mu : {1, 2, 3}) {
      const RegularityShellParams p{std::pow(c.epsilon, mu) / 2, std::pow(c.epsilon, mu), c.epsilon, double(mu)};
      const Field sat = saturating_regularity_field(c.radius, c.epsilon, p);
      for (const auto& xi : sample_frequencies(c.radius)) {
        const auto s = shell_diagnostics_regularity(sat, c.symbol, xi, p);
        ordered_json in = run;
        in["xi"] = xi_json(xi);
        in["mu"] = mu;
        report.add_upper("closure.aggregate", "one-step aggregate constant at most 28", in, s.aggregate_constant,
                         kClosureConstant);
        report.add_upper("closure.conclusion", "bilinear sum within eps^(2 mu - 1)", in, s.total, s.bound);
      }
    }
  }

  // Smoothing estimate on a field decaying like |q|^-(2 + 1/4).
  {
    const double eta = 0.25;
    const Field u = power_law_field(c.radius, 1.0, eta);
    for (const auto& xi : sample_frequencies(c.radius)) {
      const auto s = shell_diagnostics_smoothing(u, c.symbol, xi, 1.0, eta);
      for (std::size_t k = 0; k < 8; ++k) {
        ordered_json in = run;
        in["xi"] = xi_json(xi);
        in["region"] = to_string(kSmoothingRegions[k]);
        in["count"] = s.counts[k];
        report.add_upper("smoothing.region_bound", "smoothing partial sum within its region estimate", in,
                         s.parts[k], s.claimed_parts[k] * (1 + 1e-12));
      }
    }
    if (c.symbol.kind != SymbolKind::zero && c.radius >= 4) {
      const auto fit = fit_decay_exponent(smoothing_gain_profile(u, c.symbol), 2.0, 1e-13);
      const double target = 2.0 + std::min(0.5, 1.5 * eta) - 0.15;
      ordered_json in = run;
      in["eta"] = eta;
      in["shells"] = fit.shells;
      report.add_lower("smoothing.gain", "Duhamel term decays with exponent 2 + min(1/2, 3 eta/2)", in, fit.exponent,
                       target);
    }
  }

  const fs::path rpath = a.dir / "verify.jsonl";
  {
    std::ofstream out(rpath);
    report.write_jsonl(out, provenance(c));
  }
  for (const auto& rec : report.records())
    if (!rec.pass) log << "  FAIL " << rec.id << " measured=" << g17(rec.measured) << " bound=" << g17(rec.bound) << '\n';
  log << "verify: " << report.records().size() - std::size_t(report.failures()) << "/" << report.records().size()
      << " checks passed; report in " << rpath.string() << '\n';
  return report.pass() ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int cmd_bootstrap(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  Artifacts a;
  try {
    a = load_artifacts(opt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  // the solve is the recorded one; the schedule may be varied per invocation
  RunConfig c = a.config;
  if (opt.config) c.schedule = resolve_config(opt).schedule;
  const auto& sc = c.schedule;
  if (!(sc.rho < c.horizon)) {
    err << "error: schedule.rho must lie inside the time horizon\n";
    return kExitBadConfig;
  }
  if (!(c.epsilon < kMaxBootstrapEps)) {
    err << "error: bootstrap needs epsilon < 1/28\n";
    return kExitBadConfig;
  }
  const double D = a.manifest.at("report").at("sup_norm").get<double>();
  const BootstrapSchedule s = bootstrap_schedule(c.epsilon, sc.rho, D, sc.k_minus1, sc.depth, sc.recurrence_mode);
  if (s.k[std::size_t(s.depth)] > c.radius) {
    err << "error: depth " << s.depth << " needs k_" << s.depth << " = " << g17(s.k[std::size_t(s.depth)])
        << " > R = " << c.radius << "; largest feasible depth is " << max_feasible_depth(s.eps, s.k0, c.radius)
        << '\n';
    return kExitBadConfig;
  }

  std::optional<Reproduced> rr;
  try {
    rr.emplace(reproduce(a, {}));
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  const Reproduced& r = *rr;
  const BootstrapReport b = regularity_bootstrap_run(r.solution, s, c.symbol, BootstrapOptions{c.convolution});

  DiagnosticsReport report;
  const ordered_json run = {{"epsilon", c.epsilon}, {"radius", c.radius}, {"rho", s.rho},
                            {"D", s.D},             {"k0", s.k0},         {"depth", s.depth},
                            {"recurrence_mode", to_string(s.mode)}};
  report.add_upper("artifact.reproduced", "stored snapshots match a re-run of the recorded configuration", run,
                   r.snapshot_mismatch, 0.0);
  log << "stage  k_m            tau_m   mu_m  margin          chain_margin    pass\n";
  for (const auto& st : b.stages) {
    ordered_json in = run;
    in["m"] = st.m;
    in["k"] = st.k;
    in["tau"] = st.tau;
    in["mu"] = s.mu[std::size_t(st.m)];
    in["nodes"] = st.nodes_checked;
    CheckRecord rec{"bootstrap.stage", "|v(xi,t)| <= eps^mu_m/|xi|^2 for t > tau_m, |xi| >= k_m", in,
                    st.level, st.level, st.margin, st.pass};
    report.add(rec);
    report.add({"bootstrap.chain", "restarted Duhamel bound within the stage level", in, st.level, st.level,
                st.chain_margin, st.chain_pass});
    report.add({"bootstrap.chained", "restart data satisfies the previous stage", in, 0.0, 0.0, 0.0, st.chained});
    char line[160];
    std::snprintf(line, sizeof line, "%-6d %-14.6g %-7.4g %-5d %-15.6e %-15.6e %s\n", st.m, st.k, st.tau,
                  s.mu[std::size_t(st.m)], st.margin, st.chain_margin,
                  st.pass && st.chain_pass && st.chained ? "yes" : "no");
    log << line;
  }
  report.add({"bootstrap.terminal", "|v(xi,t)| <= D/|xi|^(2+1/4) for t >= rho, |xi| >= k_0", run, 0.0, 0.0,
              b.terminal_margin, b.terminal_pass});
  for (std::size_t i = 0; i < b.fits.size(); ++i) {
    ordered_json in = run;
    in["t"] = b.fit_times[i];
    in["shells"] = b.fits[i].shells;
    in["k_max"] = b.fits[i].k_max;
    in["residual"] = b.fits[i].residual;
    report.add_lower("bootstrap.decay_fit", "fitted decay exponent at least 2.25 - 0.15", in, b.fits[i].exponent,
                     2.25 - 0.15);
    log << "  t=" << g17(b.fit_times[i]) << " exponent=" << b.fits[i].exponent << " shells=" << b.fits[i].shells
        << '\n';
  }

  const fs::path rpath = a.dir / "bootstrap.jsonl";
  {
    std::ofstream out(rpath);
    report.write_jsonl(out, provenance(c));
  }
  log << "bootstrap: " << (report.pass() ? "all stages pass" : "check failures") << "; report in "
      << rpath.string() << '\n';
  return report.pass() ? kExitOk : kExitCheckFailure;
}

// ---------------------------------------------------------------------------

int cmd_bench(const CommandOptions& opt, std::ostream& log, std::ostream& err) {
  RunConfig c;
  try {
    c = resolve_config(opt);
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << '\n';
    return kExitBadConfig;
  }
  using clock = std::chrono::steady_clock;
  std::ostringstream csv;
  csv << csv_preamble(c) << "radius,grid,points,direct_seconds,fft_seconds,speedup,relative_difference\n";
  log << "R      N     points    direct[s]     fft[s]        speedup    rel.diff\n";
  for (double R : c.bench.radii) {
    const Field u = make_small_data(1.0, R, c.bench.seed, DataKind::random_ball);
    const Field w = make_small_data(1.0, R, c.bench.seed + 1, DataKind::random_ball);
    auto t0 = clock::now();
    const Field d = bilinear_direct(u, w, c.symbol);
    auto t1 = clock::now();
    const Field f = bilinear_fft(u, w, c.symbol);
    auto t2 = clock::now();
    const double td = std::chrono::duration<double>(t1 - t0).count();
    const double tf = std::chrono::duration<double>(t2 - t1).count();
    const double scale = phi2_norm(d);
    const double diff = phi2_norm(f - d) / (scale > 0 ? scale : 1.0);
    if (!(diff <= c.bench.agreement)) {
      err << "error: fft and direct disagree at R=" << R << " (relative difference " << g17(diff) << ")\n";
      return kExitCheckFailure;
    }
    char line[160];
    std::snprintf(line, sizeof line, "%-6g %-5d %-9lld %-13.6g %-13.6g %-10.4g %.3g\n", R, fft_grid_size(R),
                  (long long)u.size(), td, tf, td / tf, diff);
    log << line;
    csv << g17(R) << ',' << fft_grid_size(R) << ',' << u.size() << ',' << g17(td) << ',' << g17(tf) << ','
        << g17(td / tf) << ',' << g17(diff) << '\n';
  }
  fs::create_directories(c.output_dir);
  write_file(fs::path(c.output_dir) / "bench.csv", csv.str());
  return kExitOk;
}

}  // namespace fourier_ns
