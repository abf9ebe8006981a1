#pragma once

#include "fluxlab/spectral.h"

namespace fluxlab {

// Real-space Chern number of a projection: window average over sites of
// Re(2 pi i <n| P [[X1, P], [X2, P]] |n>), fiber-traced per site. The window
// must stay >= margin from the boundary.
struct ChernReport {
  double value = 0.0;
  int rounded = 0;
  double residual = 0.0;   // |value - rounded|
  bool reliable = false;   // residual < 0.2 guard
};
ChernReport chern_realspace(const arma::cx_mat& P, const LatticeSpace& space,
                            double window_margin = 4.0);

// Fredholm index estimate of the flux-phase compression T = V* F V over the
// occupied basis. Tiny singular values (below 1/2, split off by the largest
// multiplicative jump >= 10) are classified by localization, jointly over the
// whole tiny group: the eigenvalues of the Gram matrix of the right (left)
// singular vectors restricted to the ball of radius rho about the flux center
// count the kernel (cokernel) directions carrying >= 90% mass there. The
// joint form is insensitive to the arbitrary rotation LAPACK picks inside a
// degenerate pair (Kramers doublets). Tiny directions localized on neither
// side are excluded and reported.
// The flux-phase orientation is pinned so that the index matches the Chern
// number of the projection (and the localized spectral flow); with that
// orientation the strip edge-current identity reads  I = +index / (2 pi).
struct IndexReport {
  int index = 0;
  int kernel = 0;
  int cokernel = 0;
  int excluded = 0;
  std::vector<double> tiny_sigmas;
  std::vector<double> kernel_masses;
  std::vector<double> cokernel_masses;
  double sigma_floor = 1.0;  // smallest singular value kept as "large"
};
struct IndexPolicy {
  double mass_threshold = 0.9;
  double sigma_max = 0.5;
  double jump_min = 10.0;
};
IndexReport index_pfp(const arma::cx_mat& occupied, const LatticeSpace& space,
                      Cell m, double rho = -1.0, const IndexPolicy& policy = {});
IndexReport index_pfp(const arma::cx_mat& occupied, const arma::cx_vec& F_diag,
                      const arma::vec& xs, const arma::vec& ys, Cell m, double rho,
                      const IndexPolicy& policy = {});

// Z2 index: parity of the localized kernel of the same compression for a
// time-reversal invariant projection (I_tr* P^t I_tr = P checked to 1e-8).
struct Ind2Report {
  int parity = 0;
  int kernel = 0;
  int cokernel = 0;
  double trs_residual = 0.0;
  std::vector<double> tiny_sigmas;
};
Ind2Report ind2_pfp(const arma::cx_mat& occupied, const arma::cx_mat& I_tr,
                    const LatticeSpace& space, Cell m, double rho = -1.0,
                    const IndexPolicy& policy = {});

// Run localized spectral flow, index_pfp, and chern_realspace on one family
// and check the three integers agree.
struct VerifyReport {
  int sf_localized = 0;
  int index = 0;
  int chern_rounded = 0;
  double chern_value = 0.0;
  double chern_residual = 0.0;
  bool agree = false;
};
VerifyReport verify_sf_equals_index(const FluxFamily& family, double mu,
                                    double window_delta, double loc_radius,
                                    int alpha_points = 41);

double default_flux_radius(const LatticeSpace& space, Cell m);

}  // namespace fluxlab
