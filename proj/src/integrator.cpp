#include "fourier_ns/integrator.hpp"

namespace fourier_ns {

double truncation_tail_allowance(const BilinearSymbol& sym, double radius, double D) {
  if (sym.kind == SymbolKind::zero || D == 0.0) return 0.0;
  const double r = std::max(1.0, radius);
  const double tail = shell_sum_inverse_power(r, std::numeric_limits<double>::infinity(), 4).upper();
  return 8.0 * contraction_constant(sym, r) * (0.5 * r) * D * D * tail;
}

}  // namespace fourier_ns
