#include "fourier_ns/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace fourier_ns {

using nlohmann::json;
using nlohmann::ordered_json;

std::string_view to_string(ConvolutionMethod m) { return m == ConvolutionMethod::fft ? "fft" : "direct"; }

ConvolutionMethod parse_convolution_method(std::string_view name) {
  if (name == "fft") return ConvolutionMethod::fft;
  if (name == "direct") return ConvolutionMethod::direct;
  throw std::invalid_argument("unknown convolution method: " + std::string(name));
}

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["epsilon"] = c.epsilon;
  j["radius"] = c.radius;
  j["horizon"] = c.horizon;
  j["steps"] = c.steps;
  j["tolerance"] = c.tolerance;
  j["max_iter"] = c.max_iter;
  j["symbol"] = {{"kind", to_string(c.symbol.kind)}, {"bound_constant", c.symbol.bound_constant}};
  j["data"] = {{"kind", to_string(c.data.kind)},
               {"seed", c.data.seed},
               {"mode", {c.data.mode.x(), c.data.mode.y(), c.data.mode.z()}},
               {"solenoidal", c.data.solenoidal}};
  j["schedule"] = {{"rho", c.schedule.rho},
                   {"k_minus1", c.schedule.k_minus1},
                   {"depth", c.schedule.depth},
                   {"recurrence_mode", to_string(c.schedule.recurrence_mode)}};
  j["convolution"] = to_string(c.convolution);
  j["snapshot_stride"] = c.snapshot_stride;
  j["output_dir"] = c.output_dir;
  j["bench"] = {{"radii", c.bench.radii}, {"seed", c.bench.seed}, {"agreement", c.bench.agreement}};
  return j;
}

namespace {

void only_keys(const json& j, const std::string& where, std::set<std::string> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [k, v] : j.items())
    if (!allowed.count(k)) throw ConfigError(where + ": unknown key '" + k + "'");
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& where) {
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + key + ": wrong type");
  }
}

template <typename Parse, typename T>
void read_enum(const json& j, const char* key, T& out, const std::string& where, Parse parse) {
  if (!j.contains(key)) return;
  if (!j.at(key).is_string()) throw ConfigError(where + key + ": expected a string");
  try {
    out = parse(j.at(key).get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + key + ": " + e.what());
  }
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  only_keys(j, "config", {"epsilon", "radius", "horizon", "steps", "tolerance", "max_iter", "symbol", "data",
                          "schedule", "convolution", "snapshot_stride", "output_dir", "bench"});
  read(j, "epsilon", c.epsilon, "");
  read(j, "radius", c.radius, "");
  read(j, "horizon", c.horizon, "");
  read(j, "steps", c.steps, "");
  read(j, "tolerance", c.tolerance, "");
  read(j, "max_iter", c.max_iter, "");
  read_enum(j, "convolution", c.convolution, "", parse_convolution_method);
  read(j, "snapshot_stride", c.snapshot_stride, "");
  read(j, "output_dir", c.output_dir, "");
  if (j.contains("symbol")) {
    const auto& s = j["symbol"];
    only_keys(s, "symbol", {"kind", "bound_constant"});
    read_enum(s, "kind", c.symbol.kind, "symbol.", parse_symbol_kind);
    read(s, "bound_constant", c.symbol.bound_constant, "symbol.");
  }
  if (j.contains("data")) {
    const auto& d = j["data"];
    only_keys(d, "data", {"kind", "seed", "mode", "solenoidal"});
    read_enum(d, "kind", c.data.kind, "data.", parse_data_kind);
    read(d, "seed", c.data.seed, "data.");
    read(d, "solenoidal", c.data.solenoidal, "data.");
    if (d.contains("mode")) {
      std::vector<int> m;
      read(d, "mode", m, "data.");
      if (m.size() != 3) throw ConfigError("data.mode: expected three integers");
      c.data.mode = {m[0], m[1], m[2]};
    }
  }
  if (j.contains("schedule")) {
    const auto& s = j["schedule"];
    only_keys(s, "schedule", {"rho", "k_minus1", "depth", "recurrence_mode"});
    read(s, "rho", c.schedule.rho, "schedule.");
    read(s, "k_minus1", c.schedule.k_minus1, "schedule.");
    read(s, "depth", c.schedule.depth, "schedule.");
    read_enum(s, "recurrence_mode", c.schedule.recurrence_mode, "schedule.", parse_recurrence_mode);
  }
  if (j.contains("bench")) {
    const auto& b = j["bench"];
    only_keys(b, "bench", {"radii", "seed", "agreement"});
    read(b, "radii", c.bench.radii, "bench.");
    read(b, "seed", c.bench.seed, "bench.");
    read(b, "agreement", c.bench.agreement, "bench.");
  }
  validate(c);
  return c;
}

void validate(const RunConfig& c) {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(what);
  };
  auto finite_pos = [](double x) { return x > 0.0 && std::isfinite(x); };
  require(finite_pos(c.epsilon), "epsilon: must be > 0");
  require(c.radius >= 1.0 && std::isfinite(c.radius), "radius: must be >= 1");
  require(finite_pos(c.horizon), "horizon: must be > 0");
  require(c.steps >= 1, "steps: must be >= 1");
  require(finite_pos(c.tolerance), "tolerance: must be > 0");
  require(c.max_iter >= 1, "max_iter: must be >= 1");
  require(c.symbol.bound_constant >= 0.0 && std::isfinite(c.symbol.bound_constant),
          "symbol.bound_constant: must be >= 0");
  require(c.data.mode != Eigen::Vector3i::Zero(), "data.mode: must be nonzero");
  require(double(c.data.mode.cast<double>().norm()) <= c.radius, "data.mode: outside the truncation ball");
  require(finite_pos(c.schedule.rho), "schedule.rho: must be > 0");
  require(finite_pos(c.schedule.k_minus1), "schedule.k_minus1: must be > 0");
  require(c.schedule.depth >= 0, "schedule.depth: must be >= 0");
  require(c.snapshot_stride >= 0, "snapshot_stride: must be >= 0");
  require(!c.output_dir.empty(), "output_dir: must be nonempty");
  require(!c.bench.radii.empty(), "bench.radii: must not be empty");
  for (double r : c.bench.radii) require(r >= 1.0 && std::isfinite(r), "bench.radii: entries must be >= 1");
  require(finite_pos(c.bench.agreement), "bench.agreement: must be > 0");
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  return config_from_json(j);
}

}  // namespace fourier_ns
