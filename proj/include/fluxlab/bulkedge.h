#pragma once

#include "fluxlab/spectral.h"

namespace fluxlab {

// Edge current of a strip Hamiltonian (periodic_x), measured at one column as
// the bottom-half sum of <n| g'(H) i[X1, H] |n> with minimal-image horizontal
// displacement. For a bulk gap hosting net chirality the value is quantized
// at index/(2 pi) (sign per the index orientation in topology.h); the top
// edge gives the opposite value.
double edge_current(const arma::cx_mat& H, const LatticeSpace& space,
                    const SwitchFunction& sw, int column, bool bottom = true);

// Per-site summand <n| g'(H) i[X1, H] |n> for decay diagnostics.
arma::vec edge_current_summand(const arma::cx_mat& H, const LatticeSpace& space,
                               const SwitchFunction& sw);

// Column-averaged edge current per disorder seed, then mean/stderr over seeds.
// make_disordered(seed) must return the strip Hamiltonian at that seed.
struct AveragedCurrent {
  double mean = 0.0;
  double stderr_mean = 0.0;
  std::vector<double> per_seed;
};
AveragedCurrent averaged_edge_current(
    const std::function<arma::cx_mat(std::uint64_t)>& make_disordered,
    const LatticeSpace& space, const SwitchFunction& sw,
    const std::vector<std::uint64_t>& seeds, bool bottom = true);

// Switch over the middle `fraction` of the gap (-gap, gap), order-5 smoothstep.
SwitchFunction gap_switch(double gap_half_width, double fraction = 0.6,
                          int order = 5);

// i [X1, H] with minimal-image displacement in the periodic direction.
arma::cx_mat velocity_x(const arma::cx_mat& H, const LatticeSpace& space);

// Flux-derivative commutator identity for a half-line family whose cut enters
// the strip from below: returns max |dH/dalpha - 2 pi i [Pi_<, H]| where Pi_<
// is the left half {n1 <= m1} (the quarter plane anchored below the edge).
double flux_derivative_identity_residual(const FluxFamily& family, double alpha,
                                         double fd_step = 1e-4);

}  // namespace fluxlab
