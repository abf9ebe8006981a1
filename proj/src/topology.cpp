#include "fluxlab/topology.h"

#include <cmath>
#include <stdexcept>

#include "fluxlab/gauge.h"

namespace fluxlab {

namespace {
constexpr double kPi = 3.14159265358979323846;

double mass_within(const arma::cx_vec& v, const arma::vec& xs,
                   const arma::vec& ys, Cell m, double rho) {
  const double cx = m.first + 0.5, cy = m.second + 0.5;
  const arma::vec w = arma::square(arma::abs(v));
  const arma::uvec in =
      arma::find(arma::square(xs - cx) + arma::square(ys - cy) <= rho * rho);
  return arma::accu(w(in)) / arma::accu(w);
}

// Shared tiny-singular-value analysis of T = V* F V.
struct TinyGroup {
  arma::vec sigma_asc;
  int count = 0;       // tiny values split off by the jump
  int kernel = 0;      // localized right singular vectors
  int cokernel = 0;    // localized left singular vectors
  int excluded = 0;
  std::vector<double> tiny_sigmas, kernel_masses, cokernel_masses;
  double sigma_floor = 1.0;
};

TinyGroup analyze_compression(const arma::cx_mat& occupied,
                              const arma::cx_vec& F_diag, const arma::vec& xs,
                              const arma::vec& ys, Cell m, double rho,
                              const IndexPolicy& policy) {
  arma::cx_mat FV = occupied;
  FV.each_col() %= F_diag;
  const arma::cx_mat T = occupied.t() * FV;
  arma::cx_mat U, W;
  arma::vec s;
  if (!arma::svd(U, s, W, T)) {
    throw std::runtime_error("index compression: SVD failed");
  }
  TinyGroup out;
  out.sigma_asc = arma::reverse(s);  // ascending
  const int k = static_cast<int>(s.n_elem);
  int ncand = 0;
  while (ncand < k && out.sigma_asc(ncand) < policy.sigma_max) ++ncand;
  if (ncand == 0) {
    out.sigma_floor = k ? out.sigma_asc(0) : 1.0;
    return out;
  }
  // sentinel just past the candidates, capped at sigma_max, keeps a jump
  // landing exactly on the candidate boundary visible
  arma::vec seq(ncand + 1);
  seq.head(ncand) = out.sigma_asc.head(ncand);
  seq(ncand) =
      (ncand < k) ? std::min(policy.sigma_max, out.sigma_asc(ncand))
                  : policy.sigma_max;
  const arma::vec ratios =
      seq.tail(ncand) / arma::clamp(seq.head(ncand), 1e-300, arma::datum::inf);
  const arma::uword isplit = ratios.index_max();
  if (ratios(isplit) < policy.jump_min) {
    out.sigma_floor = out.sigma_asc(0);
    return out;
  }
  out.count = static_cast<int>(isplit) + 1;
  out.sigma_floor = (out.count < k) ? out.sigma_asc(out.count) : 1.0;
  // Classify the tiny group jointly: degenerate singular values (Kramers
  // pairs in time-reversal invariant systems) reach us in an arbitrary
  // rotation of the tiny subspace, so per-vector masses can all sit near 1/2.
  // The eigenvalues of the Gram matrix of the ball-restricted vectors are
  // rotation invariant and recover the localized dimensions.
  const double cx = m.first + 0.5, cy = m.second + 0.5;
  const arma::uvec ball =
      arma::find(arma::square(xs - cx) + arma::square(ys - cy) <= rho * rho);
  arma::cx_mat R(ball.n_elem, out.count), L(ball.n_elem, out.count);
  for (int i = 0; i < out.count; ++i) {
    const int j = k - 1 - i;  // descending position of the i-th smallest
    const arma::cx_vec kv = occupied * W.col(j);
    const arma::cx_vec cv = occupied * U.col(j);
    out.tiny_sigmas.push_back(out.sigma_asc(i));
    out.kernel_masses.push_back(mass_within(kv, xs, ys, m, rho));
    out.cokernel_masses.push_back(mass_within(cv, xs, ys, m, rho));
    R.col(i) = kv(ball);
    L.col(i) = cv(ball);
  }
  const arma::vec er = arma::eig_sym(arma::cx_mat(R.t() * R));
  const arma::vec el = arma::eig_sym(arma::cx_mat(L.t() * L));
  out.kernel = static_cast<int>(arma::accu(er >= policy.mass_threshold));
  out.cokernel = static_cast<int>(arma::accu(el >= policy.mass_threshold));
  out.excluded = std::max(0, out.count - out.kernel - out.cokernel);
  return out;
}

}  // namespace

ChernReport chern_realspace(const arma::cx_mat& P, const LatticeSpace& space,
                            double window_margin) {
  if (window_margin < 4.0) {
    throw std::invalid_argument(
        "chern_realspace: window must keep at least 4 sites from the boundary");
  }
  const arma::uword n = P.n_rows;
  if (n != static_cast<arma::uword>(space.dim())) {
    throw std::invalid_argument("chern_realspace: dimension mismatch");
  }
  const PositionOperators pos = position_operators(space);
  arma::mat dx(n, n), dy(n, n);
  for (arma::uword j = 0; j < n; ++j) {
    dx.col(j) = pos.x1 - pos.x1(j);
    dy.col(j) = pos.x2 - pos.x2(j);
  }
  const arma::cx_mat Cx = P % arma::cx_mat(dx, arma::mat(n, n, arma::fill::zeros));
  const arma::cx_mat Cy = P % arma::cx_mat(dy, arma::mat(n, n, arma::fill::zeros));
  const arma::cx_mat D = Cx * Cy - Cy * Cx;
  // diag(P * D) without the third matrix product
  const arma::cx_vec t = arma::sum(P % D.st(), 1);
  const arma::vec vals = -2.0 * kPi * arma::imag(t);

  double acc = 0.0;
  int count = 0;
  for (int x = space.x_min; x <= space.x_max; ++x) {
    if (x - space.x_min < window_margin || space.x_max - x < window_margin)
      continue;
    for (int y = space.y_min; y <= space.y_max; ++y) {
      if (y - space.y_min < window_margin || space.y_max - y < window_margin)
        continue;
      double site = 0.0;
      for (int l = 0; l < space.orbitals; ++l) {
        site += vals(space.flatten(x, y, l));
      }
      acc += site;
      ++count;
    }
  }
  if (count == 0) {
    throw std::invalid_argument("chern_realspace: window is empty");
  }
  ChernReport out;
  out.value = acc / count;
  out.rounded = static_cast<int>(std::lround(out.value));
  out.residual = std::abs(out.value - out.rounded);
  out.reliable = out.residual < 0.2;
  return out;
}

IndexReport index_pfp(const arma::cx_mat& occupied, const arma::cx_vec& F_diag,
                      const arma::vec& xs, const arma::vec& ys, Cell m,
                      double rho, const IndexPolicy& policy) {
  const TinyGroup g =
      analyze_compression(occupied, F_diag, xs, ys, m, rho, policy);
  IndexReport out;
  out.kernel = g.kernel;
  out.cokernel = g.cokernel;
  out.excluded = g.excluded;
  out.index = g.kernel - g.cokernel;
  out.tiny_sigmas = g.tiny_sigmas;
  out.kernel_masses = g.kernel_masses;
  out.cokernel_masses = g.cokernel_masses;
  out.sigma_floor = g.sigma_floor;
  return out;
}

IndexReport index_pfp(const arma::cx_mat& occupied, const LatticeSpace& space,
                      Cell m, double rho, const IndexPolicy& policy) {
  if (rho <= 0) rho = default_flux_radius(space, m);
  const PositionOperators pos = position_operators(space);
  // orientation pinned to match the Chern number of the projection
  const arma::cx_vec F = arma::conj(flux_phase(space, m, 1.0));
  return index_pfp(occupied, F, pos.x1, pos.x2, m, rho, policy);
}

Ind2Report ind2_pfp(const arma::cx_mat& occupied, const arma::cx_mat& I_tr,
                    const LatticeSpace& space, Cell m, double rho,
                    const IndexPolicy& policy) {
  if (rho <= 0) rho = default_flux_radius(space, m);
  const arma::cx_mat P = occupied * occupied.t();
  const arma::cx_mat P_trs = I_tr * arma::conj(P) * I_tr.t();
  Ind2Report out;
  out.trs_residual = arma::abs(P_trs - P).max();
  if (out.trs_residual > 1e-8) {
    throw std::runtime_error(
        "ind2_pfp: projection is not time-reversal invariant (residual " +
        std::to_string(out.trs_residual) + ")");
  }
  const PositionOperators pos = position_operators(space);
  const arma::cx_vec F = arma::conj(flux_phase(space, m, 1.0));
  const TinyGroup g =
      analyze_compression(occupied, F, pos.x1, pos.x2, m, rho, policy);
  out.kernel = g.kernel;
  out.cokernel = g.cokernel;
  out.parity = g.kernel % 2;
  out.tiny_sigmas = g.tiny_sigmas;
  return out;
}

VerifyReport verify_sf_equals_index(const FluxFamily& family, double mu,
                                    double window_delta, double loc_radius,
                                    int alpha_points) {
  VerifyReport out;
  std::vector<double> grid(alpha_points);
  for (int i = 0; i < alpha_points; ++i) {
    grid[i] = static_cast<double>(i) / (alpha_points - 1);
  }
  const SpectralFlowResult flow =
      spectral_flow(family, grid, mu, window_delta, loc_radius);
  out.sf_localized = flow.localized;

  const SpectrumResult spec = diagonalize(family.build(0.0));
  const FermiProjection proj = fermi_projection(spec, mu);
  const Cell m = family.cells.front();
  const IndexReport ind = index_pfp(proj.occupied, family.space, m);
  out.index = ind.index;

  const ChernReport ch = chern_realspace(proj.P, family.space);
  out.chern_rounded = ch.rounded;
  out.chern_value = ch.value;
  out.chern_residual = ch.residual;
  out.agree = ch.reliable && out.sf_localized == out.index &&
              out.index == out.chern_rounded;
  return out;
}

double default_flux_radius(const LatticeSpace& space, Cell m) {
  const double cx = m.first + 0.5, cy = m.second + 0.5;
  const double r = std::min(std::min(cx - space.x_min, space.x_max - cx),
                            std::min(cy - space.y_min, space.y_max - cy));
  return std::max(r - 4.0, 2.0);
}

}  // namespace fluxlab
