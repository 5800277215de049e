#include "fourier_ns/commands.hpp"
#include "fourier_ns/field_io.hpp"
#include "support.hpp"

#include <doctest.h>

#include <fstream>
#include <sstream>

using namespace fourier_ns;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Workspace {
  fs::path root = oracle::scratch_dir("cli");
  ~Workspace() { fs::remove_all(root); }

  /// Writes a config with the given overrides and returns options pointing at it.
  CommandOptions config(const std::string& name, json overrides) {
    json j = {{"radius", 4}, {"steps", 16}, {"output_dir", (root / name).string()}};
    j.merge_patch(overrides);
    const fs::path p = root / (name + ".json");
    std::ofstream(p) << j.dump(2);
    CommandOptions o;
    o.config = p;
    return o;
  }
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> data_lines(const fs::path& csv) {
  std::istringstream in(slurp(csv));
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);)
    if (!line.empty() && line[0] != '#') out.push_back(line);
  return out;
}

int run(int (*cmd)(const CommandOptions&, std::ostream&, std::ostream&), const CommandOptions& o,
        std::string* err_text = nullptr) {
  std::ostringstream log, err;
  const int code = cmd(o, log, err);
  if (err_text) *err_text = err.str();
  return code;
}

}  // namespace

TEST_CASE("dyadic shells") {
  CHECK(dyadic_shell(1) == 0);
  CHECK(dyadic_shell(3) == 0);
  CHECK(dyadic_shell(4) == 1);
  CHECK(dyadic_shell(15) == 1);
  CHECK(dyadic_shell(16) == 2);
  CHECK(dyadic_shell(1024) == 5);
}

TEST_CASE("command-line overrides") {
  Workspace w;
  CommandOptions o = w.config("a", {{"data", {{"seed", 5}}}});
  CHECK(resolve_config(o).data.seed == 5);
  o.seed = 11;
  o.out = w.root / "elsewhere";
  const RunConfig c = resolve_config(o);
  CHECK(c.data.seed == 11);
  CHECK(c.bench.seed == 11);
  CHECK(c.output_dir == (w.root / "elsewhere").string());
  CHECK(to_json(resolve_config({})) == to_json(RunConfig{}));
}

TEST_CASE("solve with the zero symbol") {
  Workspace w;
  const auto o = w.config("zero", {{"symbol", {{"kind", "zero"}}}, {"epsilon", 0.1}});
  REQUIRE(run(cmd_solve, o) == kExitOk);
  const fs::path dir = w.root / "zero";
  const auto conv = data_lines(dir / "convergence.csv");
  REQUIRE(conv.size() == 2);
  CHECK(conv[0] == "iteration,distance");
  CHECK(conv[1] == "1,0");
  const auto ts = data_lines(dir / "timeseries.csv");
  CHECK(ts.size() == 18);
  CHECK(ts[0].rfind("t,phi2_norm,shell_0,", 0) == 0);

  const json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m.contains("version"));
  CHECK(m["config"]["symbol"]["kind"] == "zero");
  CHECK(m["report"]["converged"] == true);
  CHECK(m["report"]["iterations"] == 1);
  REQUIRE(m["snapshots"].size() == 2);
  const auto snap = read_snapshot(dir / m["snapshots"][1]["file"].get<std::string>());
  CHECK(snap.meta.time.value() == 1.0);
  CHECK(snap.meta.version == m["version"].get<std::string>());
  CHECK(json::parse(snap.meta.config) == m["config"]);
  CHECK(slurp(dir / "convergence.csv").rfind("# fourier-ns ", 0) == 0);
  CHECK_FALSE(fs::exists(w.root / "zero.staging"));

  CHECK(run(cmd_verify, o) == kExitOk);
  const auto report = data_lines(dir / "verify.jsonl");
  CHECK(report.size() > 5);
  CHECK(json::parse(report[0]).contains("config"));
}

TEST_CASE("solve and verify small data") {
  Workspace w;
  const auto o = w.config("small", {{"epsilon", 1e-3}, {"data", {{"seed", 3}}}, {"snapshot_stride", 4}});
  REQUIRE(run(cmd_solve, o) == kExitOk);
  const fs::path dir = w.root / "small";
  const auto conv = data_lines(dir / "convergence.csv");
  REQUIRE(conv.size() >= 3);
  double prev = 1.0;
  for (std::size_t i = 1; i < conv.size(); ++i) {
    const double d = std::stod(conv[i].substr(conv[i].find(',') + 1));
    CHECK(d < prev);
    prev = d;
  }
  CHECK(json::parse(slurp(dir / "manifest.json"))["snapshots"].size() == 5);
  CHECK(run(cmd_verify, o) == kExitOk);

  // a tampered snapshot is caught by the reproduction check
  const fs::path snap = dir / "snapshots" / "node_00016.txt";
  auto text = slurp(snap);
  const auto pos = text.rfind(' ');
  text.insert(pos + 1, "1");
  std::ofstream(snap, std::ios::binary) << text;
  CHECK(run(cmd_verify, o) == kExitCheckFailure);
}

TEST_CASE("large data does not converge and fails verification") {
  Workspace w;
  const auto o = w.config("big", {{"epsilon", 2.0}, {"max_iter", 5}});
  CHECK(run(cmd_solve, o) == kExitNonConvergence);
  CHECK(fs::exists(w.root / "big" / "manifest.json"));
  CHECK(run(cmd_verify, o) == kExitCheckFailure);
}

TEST_CASE("bad configuration leaves no artifacts") {
  Workspace w;
  const auto o = w.config("bad", {{"epsilon", -1.0}});
  std::string err;
  CHECK(run(cmd_solve, o, &err) == kExitBadConfig);
  CHECK(err.find("epsilon") != std::string::npos);
  CHECK_FALSE(fs::exists(w.root / "bad"));
  CHECK_FALSE(fs::exists(w.root / "bad.staging"));

  const auto typo = w.config("typo", {{"epsilom", 0.1}});
  CHECK(run(cmd_solve, typo) == kExitBadConfig);
  CHECK_FALSE(fs::exists(w.root / "typo"));
}

TEST_CASE("verify and bootstrap need artifacts") {
  Workspace w;
  const auto o = w.config("none", json::object());
  std::string err;
  CHECK(run(cmd_verify, o, &err) == kExitBadConfig);
  CHECK(err.find("missing artifacts") != std::string::npos);
  CHECK(run(cmd_bootstrap, o) == kExitBadConfig);
}

TEST_CASE("identical configs give byte-identical artifacts") {
  Workspace w;
  const auto o = w.config("rep", {{"epsilon", 1e-3}, {"snapshot_stride", 8}});
  const fs::path dir = w.root / "rep";
  REQUIRE(run(cmd_solve, o) == kExitOk);
  std::vector<std::pair<fs::path, std::string>> first;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file() && e.path().filename() != "manifest.json") first.emplace_back(e.path(), slurp(e.path()));
  REQUIRE(first.size() >= 5);
  CommandOptions threaded = o;
  threaded.threads = 3;
  REQUIRE(run(cmd_solve, threaded) == kExitOk);
  for (const auto& [p, text] : first) {
    INFO(p.string());
    CHECK(slurp(p) == text);
  }
  json m = json::parse(slurp(dir / "manifest.json"));
  CHECK(m.contains("created_utc"));
}

TEST_CASE("bootstrap on a heat-only run") {
  Workspace w;
  const auto o = w.config("boot", {{"symbol", {{"kind", "zero"}}},
                                   {"epsilon", 0.03},
                                   {"horizon", 10.0},
                                   {"steps", 20},
                                   {"schedule", {{"rho", 8.0}, {"depth", 1}}}});
  REQUIRE(run(cmd_solve, o) == kExitOk);
  CHECK(run(cmd_bootstrap, o) == kExitOk);
  const auto lines = data_lines(w.root / "boot" / "bootstrap.jsonl");
  CHECK(lines.size() > 3);

  const auto deep = w.config("boot", {{"symbol", {{"kind", "zero"}}},
                                      {"epsilon", 0.03},
                                      {"horizon", 10.0},
                                      {"steps", 20},
                                      {"schedule", {{"rho", 8.0}, {"depth", 6}}}});
  std::string err;
  CHECK(run(cmd_bootstrap, deep, &err) == kExitBadConfig);
  CHECK(err.find("largest feasible depth") != std::string::npos);
}

TEST_CASE("bench gates on agreement") {
  Workspace w;
  for (const char* kind : {"worst_case_scalar", "zero", "navier_stokes_leray"}) {
    const auto o = w.config("bench", {{"symbol", {{"kind", kind}}}, {"bench", {{"radii", {3, 4}}}}});
    REQUIRE(run(cmd_bench, o) == kExitOk);
    const auto rows = data_lines(w.root / "bench" / "bench.csv");
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "radius,grid,points,direct_seconds,fft_seconds,speedup,relative_difference");
  }
}
