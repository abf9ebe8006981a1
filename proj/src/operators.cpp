#include "fluxlab/operators.h"

#include <cmath>

namespace fluxlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

arma::cx_mat magnetic_translation(const LatticeSpace& space,
                                  const MagneticPotential& A, int direction) {
  if (direction != 1 && direction != 2) {
    throw std::invalid_argument("magnetic_translation: direction must be 1 or 2");
  }
  const int L = space.orbitals;
  arma::cx_mat S(space.dim(), space.dim(), arma::fill::zeros);
  const bool wrap_x = space.boundary != Boundary::open;
  const bool wrap_y = space.boundary == Boundary::periodic_xy;
  for (int x = space.x_min; x <= space.x_max; ++x) {
    for (int y = space.y_min; y <= space.y_max; ++y) {
      // target site n - e_j; the phase is evaluated at the unwrapped edge.
      int tx = (direction == 1) ? x - 1 : x;
      int ty = (direction == 2) ? y - 1 : y;
      if (direction == 1 && tx < space.x_min) {
        if (!wrap_x) continue;
        tx = space.x_max;
      }
      if (direction == 2 && ty < space.y_min) {
        if (!wrap_y) continue;
        ty = space.y_max;
      }
      const std::complex<double> phase =
          std::exp(std::complex<double>(0.0, -A(tx, ty, direction)));
      for (int l = 0; l < L; ++l) {
        S(space.flatten(tx, ty, l), space.flatten(x, y, l)) = phase;
      }
    }
  }
  return S;
}

FluxTranslations flux_translations(const LatticeSpace& space, double B, double alpha,
                                   Cell m, FluxGauge flux_gauge,
                                   FieldGauge field_gauge) {
  return flux_translations_multi(space, B, alpha, {m}, flux_gauge, field_gauge);
}

FluxTranslations flux_translations_multi(const LatticeSpace& space, double B,
                                         double alpha, const std::vector<Cell>& cells,
                                         FluxGauge flux_gauge,
                                         FieldGauge field_gauge) {
  MagneticPotential A = uniform_field_gauge(B, field_gauge);
  for (const Cell& m : cells) {
    A = A + (flux_gauge == FluxGauge::ab ? ab_gauge(alpha, m)
                                         : half_line_gauge(alpha, m));
  }
  return {magnetic_translation(space, A, 1), magnetic_translation(space, A, 2)};
}

arma::cx_mat conjugate(const arma::cx_mat& Op, const arma::cx_mat& U) {
  if (Op.n_rows != U.n_rows) {
    throw std::invalid_argument("conjugate: dimension mismatch");
  }
  return U.t() * Op * U;
}

arma::cx_mat conjugate_diag(const arma::cx_mat& Op, const arma::cx_vec& u_diag) {
  arma::cx_mat out = Op;
  out.each_col() %= arma::conj(u_diag);
  out.each_row() %= arma::strans(u_diag);
  return out;
}

arma::cx_mat commutation_defect(const arma::cx_mat& S1, const arma::cx_mat& S2) {
  if (S1.n_rows != S2.n_rows) {
    throw std::invalid_argument("commutation_defect: dimension mismatch");
  }
  return S2 * S1 * S2.t() * S1.t();
}

arma::cx_mat halfline_defect(const LatticeSpace& space, double B, double alpha,
                             Cell m) {
  const auto with_flux = flux_translations(space, B, alpha, m,
                                           FluxGauge::half_line, FieldGauge::landau);
  const auto no_flux = flux_translations(space, B, 0.0, m, FluxGauge::half_line,
                                         FieldGauge::landau);
  return with_flux.S1 - no_flux.S1;
}

std::vector<DecayPoint> decay_profile(const arma::cx_mat& Op,
                                      const LatticeSpace& space, double cx,
                                      double cy, const std::vector<double>& radii) {
  const PositionOperators X = position_operators(space);
  arma::vec dist(space.dim());
  for (arma::uword i = 0; i < space.dim(); ++i) {
    dist(i) = std::max(std::abs(X.x1(i) - cx), std::abs(X.x2(i) - cy));
  }
  std::vector<DecayPoint> out;
  out.reserve(radii.size());
  for (double r : radii) {
    double mx = 0.0;
    for (arma::uword col = 0; col < Op.n_cols; ++col) {
      for (arma::uword row = 0; row < Op.n_rows; ++row) {
        if (std::min(dist(row), dist(col)) < r) continue;
        mx = std::max(mx, std::abs(Op(row, col)));
      }
    }
    out.push_back({r, mx});
  }
  return out;
}

arma::cx_mat operator_power(const arma::cx_mat& S, int n) {
  const arma::uword d = S.n_rows;
  arma::cx_mat acc(d, d, arma::fill::eye);
  const arma::cx_mat base = (n >= 0) ? S : arma::cx_mat(S.t());
  for (int k = 0; k < std::abs(n); ++k) acc = acc * base;
  return acc;
}

}  // namespace fluxlab
