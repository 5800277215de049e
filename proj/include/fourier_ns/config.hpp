#pragma once

#include "fourier_ns/analysis.hpp"
#include "fourier_ns/convolution.hpp"
#include "fourier_ns/small_data.hpp"
#include "fourier_ns/symbol.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace fourier_ns {

struct DataConfig {
  DataKind kind = DataKind::random_ball;
  std::uint64_t seed = 1;
  Eigen::Vector3i mode{1, 0, 0};
  bool solenoidal = false;
};

struct ScheduleConfig {
  double rho = 0.5;
  double k_minus1 = 1e-5;
  int depth = 1;
  RecurrenceMode recurrence_mode = RecurrenceMode::corrected;
};

struct BenchConfig {
  std::vector<double> radii{4, 8, 16, 32};
  std::uint64_t seed = 1;
  double agreement = 1e-12;
};

struct RunConfig {
  double epsilon = 1e-3;
  double radius = 8;
  double horizon = 1;
  int steps = 32;
  double tolerance = 1e-10;
  int max_iter = 50;
  BilinearSymbol symbol{};
  DataConfig data{};
  ScheduleConfig schedule{};
  ConvolutionMethod convolution = ConvolutionMethod::fft;
  /// Snapshot every this many nodes (plus the last); 0 writes the two endpoints.
  int snapshot_stride = 0;
  std::string output_dir = "run";
  BenchConfig bench{};
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

std::string_view to_string(ConvolutionMethod m);
ConvolutionMethod parse_convolution_method(std::string_view name);

nlohmann::ordered_json to_json(const RunConfig& c);
/// Missing keys keep their defaults; unknown keys and invalid values throw ConfigError.
RunConfig config_from_json(const nlohmann::json& j);
RunConfig load_config(const std::filesystem::path& path);
/// Throws ConfigError naming the first offending field.
void validate(const RunConfig& c);

}  // namespace fourier_ns
