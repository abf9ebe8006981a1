#pragma once

#include <functional>
#include <map>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "fluxlab/operators.h"

namespace fluxlab {

// Finite-range hopping data: map n -> L x L fiber matrix t_n, an optional
// per-site fiber potential V, and its coupling lambda. Hermiticity is enforced
// on the assembled operator, not on the coefficients.
struct HoppingSpec {
  std::map<std::pair<int, int>, arma::cx_mat> t;
  std::vector<arma::cx_mat> V;  // one Hermitian fiber block per site; may be empty
  double lambda = 0.0;

  int fiber() const;
  int range() const;
};

// H = sum_n t_n (S1^{B,a})^{n1} (S2^{B,a})^{n2} + lambda V, Hermitized as
// (M + M*)/2. Throws if the asymmetry defect exceeds 1e-10.
arma::cx_mat build_hamiltonian(const LatticeSpace& space, const HoppingSpec& spec,
                               double B, double alpha, const std::vector<Cell>& cells,
                               FluxGauge flux_gauge = FluxGauge::ab,
                               FieldGauge field_gauge = FieldGauge::symmetric,
                               double* defect_out = nullptr);

// Assemble from prebuilt site-space shifts (shared across hops for speed).
arma::cx_mat assemble_hoppings(const LatticeSpace& space, const HoppingSpec& spec,
                               const arma::cx_mat& S1_site, const arma::cx_mat& S2_site,
                               double* defect_out = nullptr);

// BdG doubling [[h, Delta], [-eta conj(Delta), -conj(h)]] on the fiber-doubled
// space (per-site fiber ordering: L particle components then L hole ones).
// Requires Delta^t = -eta Delta on the lattice (checked to 1e-10).
arma::cx_mat build_bdg(const LatticeSpace& space, const arma::cx_mat& h,
                       const arma::cx_mat& delta, int eta_ph);

// Majorana (Cayley) rotation C^t H conj(C) for eta_ph = +1 inputs; the result
// must be purely imaginary and antisymmetric to 1e-12 (checked), and
// conj(C) M C^t round-trips to H.
arma::cx_mat majorana_transform(const LatticeSpace& space, const arma::cx_mat& H_bdg);
arma::cx_mat majorana_rotation(const LatticeSpace& space);  // full-space C

// One flux-family of Hamiltonians alpha -> H_alpha with constant fiber
// coefficients; all alpha dependence is carried by the gauge.
struct FluxFamily {
  LatticeSpace space;   // orbital space of the built operators
  std::vector<Cell> cells{{-1, -1}};
  FluxGauge flux_gauge = FluxGauge::ab;
  FieldGauge field_gauge = FieldGauge::symmetric;
  double B = 0.0;
  std::string descriptor;  // serialized model + parameters
  double bulk_gap = 0.0;   // clean torus gap half-width about E = 0 (BdG models)
  std::function<arma::cx_mat(double)> build;
  std::shared_ptr<const HoppingSpec> hoppings;  // set by named_model
  std::vector<arma::uword> keep;  // nonempty for cutout families
  arma::vec xs, ys;               // coordinates per basis index of build(alpha)

  arma::cx_mat operator()(double alpha) const { return build(alpha); }
  arma::uword dim() const { return keep.empty() ? space.dim() : keep.size(); }
};

// Uniform i.i.d. site potential in [-w, w], reproducible from the seed.
arma::vec random_potential(const LatticeSpace& space, double w, std::uint64_t seed);

// Named models: harper, p_ip, d_id, wilson_dirac, km_double.
// Common parameters (JSON): flux_cells, gauge handled by the caller arguments;
// disorder_w and seed add a model-appropriate symmetry-preserving random
// potential; lambda_dis scales it.
//   harper:       {"B":, "mu":}               fiber 1, field B
//   p_ip:         {"mu":, "delta":}           fiber 2, eta = +1
//   d_id:         {"mu":, "delta":}           fiber 2, eta = -1 (chiral d+id)
//   wilson_dirac: {"mu":, "lambda":}          fiber 2, Majorana form
//   km_double:    {"mu":, "lambda":, "gamma":, "block":"wilson_dirac"|"p_ip", ...}
//                                             fiber 4, time-reversal doubled
FluxFamily named_model(const std::string& name, const nlohmann::json& params,
                       const LatticeSpace& space,
                       FluxGauge flux_gauge = FluxGauge::ab,
                       const std::vector<Cell>& cells = {{-1, -1}});

// The fiber hopping map of a named model (exposed for oracle tests).
HoppingSpec named_model_hoppings(const std::string& name, const nlohmann::json& params);

// Clean torus-dispersion gap half-width about E = 0 for the BdG-type named
// models, from a dense k-grid of the fiber symbol.
double named_model_bulk_gap(const std::string& name, const nlohmann::json& params,
                            int k_grid = 241);

// Same model with flux alpha through every listed cell; cells must be pairwise
// and boundary separated by >= 8 (Chebyshev).
FluxFamily multi_flux_family(const FluxFamily& base, const std::vector<Cell>& cells);

// Compress the family to the complement of Lambda. Lambda may not touch any
// flux-cell plaquette corner.
FluxFamily cutout(const FluxFamily& family, const Region& lambda);

}  // namespace fluxlab
