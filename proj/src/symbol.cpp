#include "fourier_ns/symbol.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <tuple>

namespace fourier_ns {

std::string_view to_string(SymbolKind kind) {
  switch (kind) {
    case SymbolKind::navier_stokes_leray: return "navier_stokes_leray";
    case SymbolKind::worst_case_scalar: return "worst_case_scalar";
    case SymbolKind::zero: return "zero";
  }
  return "unknown";
}

SymbolKind parse_symbol_kind(std::string_view name) {
  if (name == "navier_stokes_leray") return SymbolKind::navier_stokes_leray;
  if (name == "worst_case_scalar") return SymbolKind::worst_case_scalar;
  if (name == "zero") return SymbolKind::zero;
  throw std::invalid_argument("unknown symbol kind: " + std::string(name));
}

namespace {

template <typename Reduce>
double sweep(const BilinearSymbol& sym, double radius, Reduce reduce) {
  if (!(radius >= 1.0)) throw std::invalid_argument("symbol sweep: radius must be >= 1");
  const auto lattice = BallLattice::get(radius);
  double best = 0.0;
  for (Eigen::Index i = 0; i < lattice->size(); ++i) {
    const Frequency xi = lattice->frequency(i);
    const auto m = eval_symbol<double>(sym, xi);
    best = std::max(best, reduce(m) / xi.norm());
  }
  return best;
}

}  // namespace

double symbol_bound_margin(const BilinearSymbol& sym, double radius) {
  return sweep(sym, radius, [](const SymbolTensor<double>& m) {
    double b = 0.0;
    for (const auto& slice : m) b = std::max(b, slice.cwiseAbs().maxCoeff());
    return b;
  });
}

double contraction_constant(const BilinearSymbol& sym, double radius) {
  if (!(radius >= 1.0)) throw std::invalid_argument("symbol sweep: radius must be >= 1");
  static std::mutex guard;
  static std::map<std::tuple<int, double, std::int64_t>, double> cache;
  const auto key = std::make_tuple(int(sym.kind), sym.bound_constant,
                                   BallLattice::get(radius)->max_norm2());
  {
    std::lock_guard lock(guard);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  const double value = sweep(sym, radius, [](const SymbolTensor<double>& m) {
    double b = 0.0;
    for (const auto& slice : m) b = std::max(b, slice.cwiseAbs().sum());
    return b;
  });
  std::lock_guard lock(guard);
  cache.emplace(key, value);
  return value;
}

}  // namespace fourier_ns
