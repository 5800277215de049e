#pragma once

#include "fourier_ns/lattice.hpp"

#include <array>
#include <string>
#include <string_view>

namespace fourier_ns {

enum class SymbolKind { navier_stokes_leray, worst_case_scalar, zero };

std::string_view to_string(SymbolKind kind);
SymbolKind parse_symbol_kind(std::string_view name);

/// Bilinear symbol M_ijk(xi) with |M_ijk(xi)| <= bound_constant * |xi|.
///
/// Index convention: i contracts with u(q), j with v(xi - q), k is the output
/// component. Both nonzero kinds are scaled by bound_constant:
///   navier_stokes_leray: M_ijk = -i c xi_i (delta_jk - xi_j xi_k / |xi|^2)
///   worst_case_scalar:   M_kkk = c |xi|, zero off the diagonal slice
struct BilinearSymbol {
  SymbolKind kind = SymbolKind::worst_case_scalar;
  double bound_constant = 1.0;
};

/// tensor[k](i, j) = M_ijk(xi).
template <typename Real>
using SymbolTensor = std::array<Eigen::Matrix<std::complex<Real>, 3, 3>, 3>;

template <typename Real>
SymbolTensor<Real> eval_symbol(const BilinearSymbol& sym, const Frequency& xi) {
  using C = std::complex<Real>;
  SymbolTensor<Real> m;
  for (auto& slice : m) slice.setZero();
  const Real c = Real(sym.bound_constant);
  const Eigen::Matrix<Real, 3, 1> x = xi.vec().template cast<Real>();
  switch (sym.kind) {
    case SymbolKind::zero:
      break;
    case SymbolKind::worst_case_scalar:
      for (int k = 0; k < 3; ++k) m[k](k, k) = C(c * x.norm());
      break;
    case SymbolKind::navier_stokes_leray: {
      const Real n2 = x.squaredNorm();
      for (int k = 0; k < 3; ++k)
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) {
            const Real proj = (j == k ? Real(1) : Real(0)) - x[j] * x[k] / n2;
            m[k](i, j) = C(0, -c * x[i] * proj);
          }
      break;
    }
  }
  return m;
}

/// out_k = sum_ij M_ijk(xi) W_ij, evaluated without forming the tensor.
template <typename Real>
Eigen::Matrix<std::complex<Real>, 3, 1> contract(const BilinearSymbol& sym,
                                                 const Eigen::Vector3i& xi,
                                                 const Eigen::Matrix<std::complex<Real>, 3, 3>& w) {
  using C = std::complex<Real>;
  using Vec = Eigen::Matrix<C, 3, 1>;
  const Real c = Real(sym.bound_constant);
  switch (sym.kind) {
    case SymbolKind::zero:
      return Vec::Zero();
    case SymbolKind::worst_case_scalar: {
      const Real n = std::sqrt(Real(xi.squaredNorm()));
      return Vec(w(0, 0), w(1, 1), w(2, 2)) * (c * n);
    }
    case SymbolKind::navier_stokes_leray: {
      const Eigen::Matrix<Real, 3, 1> x = xi.template cast<Real>();
      // s_j = sum_i xi_i W_ij, then out = -i c P(xi) s.
      const Vec s = w.transpose() * x.template cast<C>();
      const Vec proj = s - x.template cast<C>() * (x.template cast<C>().dot(s) / x.squaredNorm());
      return proj * C(0, -c);
    }
  }
  return Vec::Zero();
}

/// Which products u^i v^j the contraction reads, as mask(i, j).
inline Eigen::Matrix<bool, 3, 3> required_products(const BilinearSymbol& sym) {
  Eigen::Matrix<bool, 3, 3> mask;
  switch (sym.kind) {
    case SymbolKind::zero: mask.setConstant(false); break;
    case SymbolKind::worst_case_scalar:
      mask.setConstant(false);
      mask.diagonal().setConstant(true);
      break;
    case SymbolKind::navier_stokes_leray: mask.setConstant(true); break;
  }
  return mask;
}

/// max over 1 <= |xi| <= R and all i, j, k of |M_ijk(xi)| / |xi|.
double symbol_bound_margin(const BilinearSymbol& sym, double radius);

/// max over 1 <= |xi| <= R and k of sum_ij |M_ijk(xi)| / |xi|; bounds
/// |sum_ij M_ijk a_i b_j| by this constant times |xi| max|a| max|b|.
double contraction_constant(const BilinearSymbol& sym, double radius);

}  // namespace fourier_ns
