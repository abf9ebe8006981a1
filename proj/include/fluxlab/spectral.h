#pragma once

#include <functional>
#include <vector>

#include "fluxlab/models.h"

namespace fluxlab {

struct SpectrumResult {
  arma::vec eigenvalues;
  arma::cx_mat eigenvectors;  // may be empty when values-only
};

// Full dense Hermitian eigensolve (divide and conquer).
SpectrumResult diagonalize(const arma::cx_mat& H, bool vectors = true);
arma::vec eigenvalues_only(const arma::cx_mat& H);

// Eigenpairs with eigenvalue in (lo, hi), via the RRR solver.
SpectrumResult diagonalize_window(const arma::cx_mat& H, double lo, double hi,
                                  bool vectors = true);
// Number of eigenvalues <= mu.
int count_below(const arma::cx_mat& H, double mu);

// Fermi projection onto {E < mu}. Throws if an eigenvalue lies within
// `guard` of mu. Returns the occupied-column basis too.
struct FermiProjection {
  arma::cx_mat P;
  arma::cx_mat occupied;  // columns spanning ran P
  int rank = 0;
};
FermiProjection fermi_projection(const SpectrumResult& spec, double mu,
                                 double guard = 1e-8);

// Smooth switch: g = 1 left of [a, b], 0 right, C^(order-1)/2 smoothstep in
// between; the derivative integrates to -1 (checked to 1e-8 at construction).
struct SwitchFunction {
  double a = 0.0, b = 0.0;
  int order = 5;
  std::function<double(double)> g;
  std::function<double(double)> gp;
};
SwitchFunction make_switch(double a, double b, int order = 5);

// Apply f elementwise through the spectral theorem.
arma::cx_mat spectral_function(const SpectrumResult& spec,
                               const std::function<double(double)>& f);

// Fraction of |v|^2 within radius r of the nearest flux cell center.
double flux_mass(const arma::cx_vec& v, const FluxFamily& family, double r);

struct Crossing {
  double alpha;       // bracketed crossing location (interval midpoint)
  int direction;      // net upward crossings through mu in the bracket
  double weight;      // eigenvector mass within the localization ball
  double eigenvalue;  // eigenvalue nearest mu after the bracket
};

struct SpectralFlowResult {
  int raw = 0;        // all crossings, signed
  int localized = 0;  // flux-localized crossings only (weight > 1/2)
  std::vector<Crossing> crossings;
  int evaluations = 0;
};

// Count signed eigenvalue crossings along alpha in [grid.front(),
// grid.back()]. Counting runs at a probe level displaced into the gap,
// mu_eff = mu + (gap distance at the first grid point)/4; the flow integer is
// level-independent within one gap, and the displacement separates crossings
// that coincide exactly at a symmetry-pinned level (BdG families cross mu = 0
// in simultaneous cancelling pairs, invisible to any counter there). Grid
// intervals are bisected (depth <= max_depth) until each carries one
// crossing, then tightened so the crossing state can be classified just past
// the crossing on its departure side; near-level intervals are refined
// defensively. Exactly degenerate multiple crossings (bracket below 1e-6)
// are classified jointly by the localization Gram matrix. Localization mass
// is measured within radius r of the nearest flux cell center. Throws
// std::runtime_error when mu sits on an eigenvalue at the first grid point
// or a multiple crossing stays unresolved at full depth.
SpectralFlowResult spectral_flow(const FluxFamily& family,
                                 const std::vector<double>& alpha_grid, double mu,
                                 double window_delta, double loc_radius,
                                 int max_depth = 20);

// Windowed trace formula: -Integral_0^1 Tr(Pi_w g'(H_a) dH/da Pi_w) d alpha
// with dH/da by central differences (h = 1e-4) and Simpson quadrature on
// `points` uniform nodes (odd count). Pi_w is a box of half-width
// `window_half` around the (first) flux cell center; pass <= 0 for a default.
double spectral_flow_trace(const FluxFamily& family, const SwitchFunction& sw,
                           int points = 41, double window_half = -1.0);

// Kernel cluster about E0: states ordered by |E - E0|, cluster boundary at the
// largest multiplicative jump > 10 within |E - E0| <= cap. The localized
// dimension counts eigenvalues > 1/2 of the cluster's ball-mass Gram matrix.
struct KernelReport {
  int dim_raw = 0;
  int dim_localized = 0;
  int parity = 0;  // dim_localized mod 2
  double cluster_edge = 0.0;   // largest |E - E0| inside the cluster
  double first_outside = 0.0;  // smallest |E - E0| beyond it
};
KernelReport kernel_index(const arma::cx_mat& H, double E0, double cap,
                          const FluxFamily& family, double loc_radius);
KernelReport kernel_index(const SpectrumResult& spec, double E0, double cap,
                          const arma::vec& xs, const arma::vec& ys, double cx,
                          double cy, double loc_radius);

// Z2 flow of a time-reversal symmetric family over alpha in [0, 1/2]: number
// of flux-localized gap crossings mod 2, counted at the displaced probe level
// of spectral_flow. The displacement moves the crossing of a Kramers doublet
// forming at alpha = 1/2 strictly into the interior (or mirrors it outside),
// so the parity is the interior count alone. The family spectrum must satisfy
// the reflection sigma(H_alpha) = sigma(H_{1-alpha}) to `reflect_tol`
// (checked at one sample pair). The localized kernel cluster at alpha = 1/2
// (within pin_tol of mu) is reported as endpoint_doublets for diagnostics and
// must be even, else Kramers pairing is broken and the call throws.
struct Z2FlowResult {
  int parity = 0;
  int interior_crossings = 0;
  int endpoint_doublets = 0;
  double reflection_residual = 0.0;
  std::vector<Crossing> crossings;
};
Z2FlowResult z2_spectral_flow(const FluxFamily& family,
                              const std::vector<double>& alpha_grid, double mu,
                              double loc_radius, double pin_tol,
                              double reflect_tol = 1e-8);

// Sorted-spectrum distance max_i |a_i - b_i|.
double spectrum_distance(const arma::vec& a, const arma::vec& b);

}  // namespace fluxlab
