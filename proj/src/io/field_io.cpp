#include "fourier_ns/field_io.hpp"

#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fourier_ns {

namespace {

constexpr const char* kMagic = "# fourier-ns field snapshot v1";

std::string g17(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

[[noreturn]] void malformed(const std::string& why) { throw std::runtime_error("snapshot: " + why); }

}  // namespace

void write_snapshot(std::ostream& out, const Field& f, const SnapshotMeta& meta) {
  const auto& lat = f.lattice();
  out << kMagic << '\n';
  out << "truncation_radius " << g17(f.radius()) << '\n';
  out << "hermitian " << (f.hermitian() ? 1 : 0) << '\n';
  out << "generator " << (meta.generator.empty() ? "-" : meta.generator) << '\n';
  out << "seed " << meta.seed << '\n';
  out << "kind " << (meta.kind.empty() ? "-" : meta.kind) << '\n';
  if (meta.time) out << "time " << g17(*meta.time) << '\n';
  if (!meta.version.empty()) out << "version " << meta.version << '\n';
  if (!meta.config.empty()) {
    if (meta.config.find('\n') != std::string::npos) throw std::invalid_argument("snapshot: config must be one line");
    out << "config " << meta.config << '\n';
  }
  out << "records " << f.size() << '\n';
  std::string line;
  for (Eigen::Index i = 0; i < f.size(); ++i) {
    const Eigen::Vector3i p = lat.point(i);
    line = std::to_string(p.x()) + ' ' + std::to_string(p.y()) + ' ' + std::to_string(p.z());
    for (int c = 0; c < 3; ++c) {
      line += ' ' + g17(f.values()(c, i).real());
      line += ' ' + g17(f.values()(c, i).imag());
    }
    out << line << '\n';
  }
}

void write_snapshot(const std::filesystem::path& path, const Field& f, const SnapshotMeta& meta) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("snapshot: cannot open " + path.string());
  write_snapshot(out, f, meta);
  if (!out) throw std::runtime_error("snapshot: write failed for " + path.string());
}

Snapshot read_snapshot(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kMagic) malformed("missing header line");
  std::optional<double> radius;
  SnapshotMeta meta;
  long long records = -1;
  while (records < 0 && std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key;
    ls >> key;
    if (key == "truncation_radius") {
      double r;
      if (!(ls >> r)) malformed("bad truncation_radius");
      radius = r;
    } else if (key == "hermitian") {
      int h;
      if (!(ls >> h) || (h != 0 && h != 1)) malformed("bad hermitian flag");
      meta.hermitian = h == 1;
    } else if (key == "generator") {
      ls >> meta.generator;
    } else if (key == "seed") {
      if (!(ls >> meta.seed)) malformed("bad seed");
    } else if (key == "kind") {
      ls >> meta.kind;
    } else if (key == "time") {
      double t;
      if (!(ls >> t)) malformed("bad time");
      meta.time = t;
    } else if (key == "version") {
      ls >> meta.version;
    } else if (key == "config") {
      std::getline(ls >> std::ws, meta.config);
    } else if (key == "records") {
      if (!(ls >> records) || records < 0) malformed("bad record count");
    } else {
      malformed("unknown header key '" + key + "'");
    }
  }
  if (!radius) malformed("missing truncation_radius");
  if (records < 0) malformed("missing records line");
  if (meta.generator == "-") meta.generator.clear();
  if (meta.kind == "-") meta.kind.clear();

  Field f(*radius, meta.hermitian);
  const auto& lat = f.lattice();
  std::vector<bool> seen(std::size_t(f.size()), false);
  for (long long r = 0; r < records; ++r) {
    if (!std::getline(in, line)) malformed("truncated record list");
    std::istringstream ls(line);
    int x, y, z;
    double v[6];
    if (!(ls >> x >> y >> z)) malformed("bad frequency in record " + std::to_string(r));
    for (double& c : v)
      if (!(ls >> c)) malformed("bad value in record " + std::to_string(r));
    const Eigen::Index i = lat.find(Eigen::Vector3i(x, y, z));
    if (i < 0) malformed("frequency outside the truncation ball in record " + std::to_string(r));
    if (seen[std::size_t(i)]) malformed("duplicate frequency in record " + std::to_string(r));
    seen[std::size_t(i)] = true;
    for (int c = 0; c < 3; ++c) f.values()(c, i) = {v[2 * c], v[2 * c + 1]};
  }
  return {std::move(f), meta};
}

Snapshot read_snapshot(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("snapshot: cannot open " + path.string());
  return read_snapshot(in);
}

}  // namespace fourier_ns
