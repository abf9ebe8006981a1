#include "fluxlab/bulkedge.h"

#include <cmath>
#include <stdexcept>

namespace fluxlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

arma::cx_mat velocity_x(const arma::cx_mat& H, const LatticeSpace& space) {
  const arma::uword n = H.n_rows;
  if (n != static_cast<arma::uword>(space.dim())) {
    throw std::invalid_argument("velocity_x: dimension mismatch");
  }
  const PositionOperators pos = position_operators(space);
  const int nx = space.nx();
  arma::cx_mat V(n, n);
  const arma::cx_double iunit(0.0, 1.0);
  for (arma::uword j = 0; j < n; ++j) {
    for (arma::uword i = 0; i < n; ++i) {
      double dx = pos.x1(i) - pos.x1(j);
      if (space.boundary != Boundary::open) {
        // minimal image on the periodic ring
        dx = dx - nx * std::round(dx / nx);
      }
      V(i, j) = iunit * dx * H(i, j);
    }
  }
  return V;
}

arma::vec edge_current_summand(const arma::cx_mat& H, const LatticeSpace& space,
                               const SwitchFunction& sw) {
  const SpectrumResult spec = diagonalize(H);
  const arma::cx_mat V = velocity_x(H, space);
  // summand(i) = Re (g'(H) V)(i,i); with H = Q E Q* this is
  // Re sum_k Q(i,k) g'(E_k) (Q* V)(k,i), needing one large product only
  const arma::cx_mat A = spec.eigenvectors.t() * V;
  arma::cx_mat B = spec.eigenvectors;
  for (arma::uword k = 0; k < B.n_cols; ++k) {
    B.col(k) *= sw.gp(spec.eigenvalues(k));
  }
  return arma::real(arma::sum(B % A.st(), 1));
}

double edge_current(const arma::cx_mat& H, const LatticeSpace& space,
                    const SwitchFunction& sw, int column, bool bottom) {
  if (column < space.x_min || column > space.x_max) {
    throw std::invalid_argument("edge_current: column outside the lattice");
  }
  const arma::vec summand = edge_current_summand(H, space, sw);
  const int y_mid = space.y_min + space.ny() / 2;
  double acc = 0.0;
  for (int y = space.y_min; y <= space.y_max; ++y) {
    const bool lower = y < y_mid;
    if (lower != bottom) continue;
    for (int l = 0; l < space.orbitals; ++l) {
      acc += summand(space.flatten(column, y, l));
    }
  }
  return acc;
}

AveragedCurrent averaged_edge_current(
    const std::function<arma::cx_mat(std::uint64_t)>& make_disordered,
    const LatticeSpace& space, const SwitchFunction& sw,
    const std::vector<std::uint64_t>& seeds, bool bottom) {
  if (seeds.empty()) {
    throw std::invalid_argument("averaged_edge_current: no seeds");
  }
  AveragedCurrent out;
  const int y_mid = space.y_min + space.ny() / 2;
  for (std::uint64_t seed : seeds) {
    const arma::cx_mat H = make_disordered(seed);
    const arma::vec summand = edge_current_summand(H, space, sw);
    // average over all columns of the half-strip sum
    double acc = 0.0;
    for (int x = space.x_min; x <= space.x_max; ++x) {
      for (int y = space.y_min; y <= space.y_max; ++y) {
        const bool lower = y < y_mid;
        if (lower != bottom) continue;
        for (int l = 0; l < space.orbitals; ++l) {
          acc += summand(space.flatten(x, y, l));
        }
      }
    }
    out.per_seed.push_back(acc / space.nx());
  }
  const arma::vec vals(out.per_seed);
  out.mean = arma::mean(vals);
  out.stderr_mean = (vals.n_elem > 1)
                        ? arma::stddev(vals) / std::sqrt(double(vals.n_elem))
                        : 0.0;
  return out;
}

SwitchFunction gap_switch(double gap_half_width, double fraction, int order) {
  if (gap_half_width <= 0 || fraction <= 0 || fraction > 1) {
    throw std::invalid_argument("gap_switch: bad gap or fraction");
  }
  const double half = fraction * gap_half_width;
  return make_switch(-half, half, order);
}

double flux_derivative_identity_residual(const FluxFamily& family, double alpha,
                                         double fd_step) {
  const arma::cx_mat dH =
      (family.build(alpha + fd_step) - family.build(alpha - fd_step)) /
      (2 * fd_step);
  const arma::cx_mat H = family.build(alpha);
  const Cell m = family.cells.front();
  // indicator of the left half {n1 <= m1}; with the cut entering from below
  // the quarter plane reduces to this on the lattice
  arma::vec chi(H.n_rows, arma::fill::zeros);
  for (int x = family.space.x_min; x <= family.space.x_max; ++x) {
    if (x > m.first) continue;
    for (int y = family.space.y_min; y <= family.space.y_max; ++y) {
      for (int l = 0; l < family.space.orbitals; ++l) {
        chi(family.space.flatten(x, y, l)) = 1.0;
      }
    }
  }
  // 2 pi i [Pi_<, H] entrywise: 2 pi i (chi_i - chi_j) H_ij
  arma::cx_mat C = H;
  const arma::cx_double two_pi_i(0.0, 2.0 * kPi);
  for (arma::uword j = 0; j < H.n_cols; ++j) {
    for (arma::uword i = 0; i < H.n_rows; ++i) {
      C(i, j) *= two_pi_i * (chi(i) - chi(j));
    }
  }
  return arma::abs(dH - C).max();
}

}  // namespace fluxlab
