#pragma once

#include "fourier_ns/lattice.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

namespace fourier_ns {

/// Header of a field snapshot file; the hermitian flag is taken from the field.
struct SnapshotMeta {
  bool hermitian = false;  ///< filled in by read_snapshot
  std::string generator;
  std::uint64_t seed = 0;
  std::string kind;
  std::optional<double> time;
  std::string version;  ///< code version of the writer, optional
  std::string config;   ///< single-line run configuration, optional
};

/// Text snapshot: a header of `key value` lines ending in `records N`, then
/// one line per stored frequency: x y z and re/im of the three components,
/// printed with 17 significant digits so values round-trip exactly.
void write_snapshot(std::ostream& out, const Field& f, const SnapshotMeta& meta);
void write_snapshot(const std::filesystem::path& path, const Field& f, const SnapshotMeta& meta);

struct Snapshot {
  Field field;
  SnapshotMeta meta;
};

/// Throws std::runtime_error on malformed input.
Snapshot read_snapshot(std::istream& in);
Snapshot read_snapshot(const std::filesystem::path& path);

}  // namespace fourier_ns
