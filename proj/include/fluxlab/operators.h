#pragma once

#include <vector>

#include "fluxlab/gauge.h"
#include "fluxlab/lattice.h"

namespace fluxlab {

// Magnetic translation S^A_j = sum_n e^{-i A(n-e_j, n)} |n-e_j><n| (x) 1_L.
// Open boundaries truncate (partial isometry); periodic directions wrap, with
// the potential evaluated at the unwrapped starting site.
arma::cx_mat magnetic_translation(const LatticeSpace& space,
                                  const MagneticPotential& A, int direction);

// Combined field + flux translations. (ab, symmetric) gives the AB-gauge flux
// family; (half_line, landau) the half-line one.
struct FluxTranslations {
  arma::cx_mat S1;
  arma::cx_mat S2;
};
FluxTranslations flux_translations(const LatticeSpace& space, double B, double alpha,
                                   Cell m, FluxGauge flux_gauge = FluxGauge::ab,
                                   FieldGauge field_gauge = FieldGauge::symmetric);
FluxTranslations flux_translations_multi(const LatticeSpace& space, double B,
                                         double alpha, const std::vector<Cell>& cells,
                                         FluxGauge flux_gauge = FluxGauge::ab,
                                         FieldGauge field_gauge = FieldGauge::symmetric);

// U* Op U, fixed so that conjugating S^A by U = e^{i G(X)} yields S^{A'} when
// G solves the gauge transformation from A to A'.
arma::cx_mat conjugate(const arma::cx_mat& Op, const arma::cx_mat& U);
arma::cx_mat conjugate_diag(const arma::cx_mat& Op, const arma::cx_vec& u_diag);

// S2 S1 S2* S1*; on interior cells this is diagonal with entries e^{i B_A}.
arma::cx_mat commutation_defect(const arma::cx_mat& S1, const arma::cx_mat& S2);

// L_alpha = Z1^{B,alpha} - S1^{B,0} in the half-line/Landau pair: supported on
// the cut column n1 = m1, n2 > m2 with entries of modulus |e^{2 pi i alpha} - 1|.
arma::cx_mat halfline_defect(const LatticeSpace& space, double B, double alpha,
                             Cell m);

// Max |entry| among matrix elements whose nearer endpoint is at Chebyshev
// distance >= r from the center, one row per requested radius.
struct DecayPoint {
  double radius;
  double max_entry;
};
std::vector<DecayPoint> decay_profile(const arma::cx_mat& Op,
                                      const LatticeSpace& space, double cx,
                                      double cy, const std::vector<double>& radii);

// Integer operator power with S^{-1} := S* (adjoint), matching the truncated
// partial-isometry convention.
arma::cx_mat operator_power(const arma::cx_mat& S, int n);

}  // namespace fluxlab
