#include <catch2/catch.hpp>

#include <complex>

#include "fluxlab/models.h"
#include "fluxlab/spectral.h"

using namespace fluxlab;

namespace {
const std::complex<double> kI(0.0, 1.0);

LatticeSpace model_space(const std::string& name, const nlohmann::json& params,
                         int half) {
  const int fiber = named_model_hoppings(name, params).fiber();
  return build_lattice(-half, half - 1, -half, half - 1, fiber, Boundary::open);
}

double hermiticity_defect(const arma::cx_mat& H) {
  return arma::abs(H - H.t()).max();
}
}  // namespace

TEST_CASE("harper_hamiltonian_is_hermitian_and_bounded") {
  nlohmann::json params = {{"B", 2.0 * arma::datum::pi / 3.0}, {"mu", 0.0}};
  const LatticeSpace space = model_space("harper", params, 8);
  const FluxFamily fam = named_model("harper", params, space);
  const arma::cx_mat H = fam.build(0.0);
  CHECK(hermiticity_defect(H) < 1e-12);
  const arma::vec ev = eigenvalues_only(H);
  CHECK(ev.min() > -4.0 - 1e-12);  // Gershgorin bound for four unit hops
  CHECK(ev.max() < 4.0 + 1e-12);
}

TEST_CASE("empty_hopping_spec_builds_the_zero_operator") {
  const LatticeSpace space = build_lattice(-3, 2, -3, 2, 1, Boundary::open);
  HoppingSpec spec;
  const arma::cx_mat H =
      build_hamiltonian(space, spec, 0.0, 0.3, {{-1, -1}});
  CHECK(arma::abs(H).max() == 0.0);
}

TEST_CASE("non_hermitian_hopping_data_is_rejected") {
  const LatticeSpace space = build_lattice(-3, 2, -3, 2, 1, Boundary::open);
  HoppingSpec spec;
  spec.t[{1, 0}] = arma::cx_mat(1, 1, arma::fill::ones);
  spec.t[{-1, 0}] = 2.0 * arma::cx_mat(1, 1, arma::fill::ones);  // t_{-n} != t_n*
  CHECK_THROWS_AS(build_hamiltonian(space, spec, 0.0, 0.0, {{-1, -1}}),
                  std::invalid_argument);
}

TEST_CASE("flux_period_conjugates_by_the_flux_phase") {
  nlohmann::json params = {{"mu", 2.0}, {"delta", 1.0}};
  const LatticeSpace space = model_space("p_ip", params, 6);
  const FluxFamily fam = named_model("p_ip", params, space);
  const arma::cx_mat H0 = fam.build(0.37);
  const arma::cx_mat H1 = fam.build(1.37);
  arma::cx_vec F = flux_phase(space.site_space(), {-1, -1}, 1.0);
  arma::cx_vec Ffull(space.dim());
  for (arma::uword s = 0; s < space.n_sites(); ++s) {
    Ffull.subvec(s * 2, s * 2 + 1).fill(F(s));
  }
  const arma::cx_mat rhs = arma::diagmat(Ffull) * H0 * arma::diagmat(arma::conj(Ffull));
  // interior rows only: open-boundary truncation breaks exactness at the rim
  double worst = 0.0;
  for (arma::uword c = 0; c < H0.n_cols; ++c) {
    const Site sc = space.unflatten(c);
    if (sc.x <= space.x_min + 1 || sc.x >= space.x_max - 1 ||
        sc.y <= space.y_min + 1 || sc.y >= space.y_max - 1)
      continue;
    for (arma::uword r = 0; r < H0.n_rows; ++r) {
      const Site sr = space.unflatten(r);
      if (sr.x <= space.x_min + 1 || sr.x >= space.x_max - 1 ||
          sr.y <= space.y_min + 1 || sr.y >= space.y_max - 1)
        continue;
      worst = std::max(worst, std::abs(H1(r, c) - rhs(r, c)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("named_families_have_periodic_spectra") {
  const std::vector<std::pair<std::string, nlohmann::json>> models = {
      {"harper", {{"B", 2.0 * arma::datum::pi / 3.0}, {"mu", 0.0}}},
      {"p_ip", {{"mu", 2.0}, {"delta", 1.0}}},
      {"d_id", {{"mu", 2.0}, {"delta", 0.5}}},
      {"wilson_dirac", {{"mu", 2.0}, {"lambda", 1.0}}},
      {"km_double", {{"mu", 2.0}, {"lambda", 1.0}, {"gamma", 0.3}}}};
  for (const auto& [name, params] : models) {
    const LatticeSpace space = model_space(name, params, 6);
    const FluxFamily fam = named_model(name, params, space);
    for (double a : {0.0, 0.3, 0.5}) {
      CHECK(hermiticity_defect(fam.build(a)) < 1e-12);
    }
    const double d = spectrum_distance(eigenvalues_only(fam.build(0.37)),
                                       eigenvalues_only(fam.build(1.37)));
    INFO(name);
    CHECK(d < 1e-8);
  }
}

TEST_CASE("family_map_is_continuous_in_alpha") {
  nlohmann::json params = {{"mu", 2.0}, {"delta", 1.0}};
  const LatticeSpace space = model_space("p_ip", params, 6);
  const FluxFamily fam = named_model("p_ip", params, space);
  const arma::cx_mat H = fam.build(0.3);
  const double d4 = arma::abs(fam.build(0.3 + 1e-4) - H).max();
  const double d5 = arma::abs(fam.build(0.3 + 1e-5) - H).max();
  CHECK(d4 < 1e-2);
  CHECK(d4 / d5 == Approx(10.0).epsilon(0.3));  // linear shrinkage
}

TEST_CASE("bdg_families_reflect_the_spectrum") {
  const std::vector<std::pair<std::string, nlohmann::json>> models = {
      {"p_ip", {{"mu", 2.0}, {"delta", 1.0}}},
      {"d_id", {{"mu", 2.0}, {"delta", 0.5}}},
      {"wilson_dirac", {{"mu", 2.0}, {"lambda", 1.0}}},
      {"km_double", {{"mu", 2.0}, {"lambda", 1.0}, {"gamma", 0.3}}}};
  for (const auto& [name, params] : models) {
    const LatticeSpace space = model_space(name, params, 6);
    const FluxFamily fam = named_model(name, params, space);
    const arma::vec lo = eigenvalues_only(fam.build(0.3));
    const arma::vec hi = eigenvalues_only(fam.build(0.7));
    INFO(name);
    CHECK(spectrum_distance(lo, arma::vec(-hi)) < 1e-8);
  }
}

TEST_CASE("bdg_block_doubling_and_guards") {
  const LatticeSpace space = build_lattice(-2, 1, -2, 1, 1, Boundary::open);
  const arma::uword n = space.dim();
  arma::cx_mat h(n, n, arma::fill::zeros);
  h.diag() = arma::linspace<arma::cx_vec>(1.0, 2.5, n);
  const arma::cx_mat zero(n, n, arma::fill::zeros);
  const arma::cx_mat Hb = build_bdg(space, h, zero, +1);
  const arma::vec ev = eigenvalues_only(Hb);
  arma::vec expect = arma::join_cols(arma::real(h.diag()), -arma::real(h.diag()));
  CHECK(spectrum_distance(ev, expect) < 1e-12);

  // eta = +1 needs antisymmetric Delta, eta = -1 symmetric
  arma::cx_mat sym(n, n, arma::fill::zeros);
  sym(0, 1) = sym(1, 0) = 0.5;
  arma::cx_mat anti(n, n, arma::fill::zeros);
  anti(0, 1) = 0.5;
  anti(1, 0) = -0.5;
  CHECK_NOTHROW(build_bdg(space, h, anti, +1));
  CHECK_THROWS_AS(build_bdg(space, h, sym, +1), std::invalid_argument);
  CHECK_NOTHROW(build_bdg(space, h, sym, -1));
  CHECK_THROWS_AS(build_bdg(space, h, anti, -1), std::invalid_argument);
}

TEST_CASE("majorana_transform_gives_imaginary_antisymmetric_form") {
  // exact particle-hole symmetry holds at integer flux only: the tube phases
  // both Nambu components the same way, so alpha = 0 here
  nlohmann::json params = {{"mu", 2.0}, {"delta", 1.0}};
  const LatticeSpace space = model_space("p_ip", params, 5);
  const arma::cx_mat H = named_model("p_ip", params, space).build(0.0);
  const arma::cx_mat M = majorana_transform(space, H);
  CHECK(arma::abs(arma::real(M)).max() < 1e-12);
  CHECK(arma::abs(M + M.st()).max() < 1e-12);

  // round trip through the Cayley rotation
  const arma::cx_mat C = majorana_rotation(space);
  CHECK(arma::abs(arma::conj(C) * M * C.st() - H).max() < 1e-12);

  const arma::cx_mat z(space.dim(), space.dim(), arma::fill::zeros);
  CHECK(arma::abs(majorana_transform(space, z)).max() == 0.0);
}

TEST_CASE("km_double_decouples_at_zero_coupling") {
  nlohmann::json params = {{"mu", 2.0}, {"lambda", 1.0}, {"gamma", 0.0}};
  const LatticeSpace space = model_space("km_double", params, 6);
  const FluxFamily fam = named_model("km_double", params, space);
  const SpectrumResult spec = diagonalize(fam.build(0.0));

  // Kramers: consecutive eigenvalues pair up
  for (arma::uword i = 0; i + 1 < spec.eigenvalues.n_elem; i += 2) {
    CHECK(spec.eigenvalues(i + 1) - spec.eigenvalues(i) < 1e-8);
  }

  // Fermi projection block diagonal over the two spin blocks
  const FermiProjection proj = fermi_projection(spec, 0.0);
  double offdiag = 0.0;
  for (arma::uword s = 0; s < space.n_sites(); ++s) {
    for (arma::uword t = 0; t < space.n_sites(); ++t) {
      offdiag = std::max(
          offdiag,
          arma::abs(proj.P.submat(s * 4, t * 4 + 2, s * 4 + 1, t * 4 + 3)).max());
    }
  }
  CHECK(offdiag < 1e-10);
}

TEST_CASE("random_potential_contract") {
  const LatticeSpace space = build_lattice(0, 99, 0, 99, 1, Boundary::open);
  CHECK(arma::abs(random_potential(space, 0.0, 7)).max() == 0.0);
  const arma::vec a = random_potential(space, 1.0, 42);
  const arma::vec b = random_potential(space, 1.0, 42);
  CHECK(arma::abs(a - b).max() == 0.0);
  const arma::vec c = random_potential(space, 1.0, 43);
  CHECK(arma::abs(a - c).max() > 1e-3);  // different seed, different draw
  CHECK(arma::abs(a).max() <= 1.0);
  CHECK(std::abs(arma::mean(a)) < 0.05);  // CLT bound at 3 sigma for 10^4 draws
}

TEST_CASE("disorder_respects_the_model_symmetry_structure") {
  // p_ip disorder enters as mu-like diag(1,-1): PHS survives exactly
  nlohmann::json params = {
      {"mu", 2.0}, {"delta", 1.0}, {"disorder_w", 0.4}, {"seed", 11}};
  const LatticeSpace space = model_space("p_ip", params, 5);
  const arma::cx_mat H = named_model("p_ip", params, space).build(0.0);
  arma::cx_mat K(space.dim(), space.dim(), arma::fill::zeros);
  for (arma::uword s = 0; s < space.n_sites(); ++s) {
    K(s * 2, s * 2 + 1) = 1.0;
    K(s * 2 + 1, s * 2) = 1.0;
  }
  CHECK(arma::abs(K.t() * arma::conj(H) * K + H).max() < 1e-12);

  // disordered Hamiltonian differs from the clean one
  nlohmann::json clean = {{"mu", 2.0}, {"delta", 1.0}};
  CHECK(arma::abs(H - named_model("p_ip", clean, space).build(0.0)).max() > 0.01);
}

TEST_CASE("named_model_rejects_unknown_input") {
  const LatticeSpace space = build_lattice(-4, 3, -4, 3, 2, Boundary::open);
  CHECK_THROWS_AS(named_model("q_ip", {{"mu", 2.0}}, space),
                  std::invalid_argument);
  CHECK_THROWS_AS(named_model("p_ip", {{"mu", 2.0}, {"nu", 1.0}}, space),
                  std::invalid_argument);
}

TEST_CASE("bulk_gap_tracks_the_phase_diagram") {
  CHECK(named_model_bulk_gap("p_ip", {{"mu", 2.0}, {"delta", 1.0}}) ==
        Approx(2.0).margin(1e-6));
  CHECK(named_model_bulk_gap("wilson_dirac", {{"mu", 2.0}, {"lambda", 1.0}}) >
        0.5);
  // transitions of the Wilson-Dirac mass at mu/lambda = 0 and 4; the sampled
  // minimum is limited by the momentum grid resolution, not exactly zero
  CHECK(named_model_bulk_gap("wilson_dirac", {{"mu", 0.0}, {"lambda", 1.0}}) <
        0.05);
  CHECK(named_model_bulk_gap("wilson_dirac", {{"mu", 4.0}, {"lambda", 1.0}}) <
        0.05);
  CHECK(named_model_bulk_gap("d_id", {{"mu", 2.0}, {"delta", 0.5}}) > 0.8);
}

TEST_CASE("multi_flux_family_construction") {
  nlohmann::json params = {{"mu", 2.0}, {"delta", 1.0}};
  const LatticeSpace space = model_space("p_ip", params, 13);
  const FluxFamily base = named_model("p_ip", params, space);

  // one listed cell reproduces the single-tube family
  const FluxFamily single = multi_flux_family(base, {{-1, -1}});
  CHECK(arma::abs(single.build(0.37) - base.build(0.37)).max() < 1e-14);

  // separation guard
  CHECK_THROWS_AS(multi_flux_family(base, {{-1, -1}, {3, 3}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(multi_flux_family(base, {{-1, -1}, {9, 9}}),
                  std::invalid_argument);  // too close to the boundary

  // full-period covariance through the product flux phase
  const std::vector<Cell> cells = {{-5, -5}, {3, 3}};
  const FluxFamily two = multi_flux_family(base, cells);
  const arma::cx_mat H0 = two.build(0.0);
  const arma::cx_mat H1 = two.build(1.0);
  arma::cx_vec F = flux_phase_multi(space.site_space(), cells, 1.0);
  arma::cx_vec Ffull(space.dim());
  for (arma::uword s = 0; s < space.n_sites(); ++s) {
    Ffull.subvec(s * 2, s * 2 + 1).fill(F(s));
  }
  const arma::cx_mat rhs =
      arma::diagmat(Ffull) * H0 * arma::diagmat(arma::conj(Ffull));
  double worst = 0.0;
  for (arma::uword c = 0; c < H0.n_cols; ++c) {
    const Site sc = space.unflatten(c);
    if (sc.x <= space.x_min + 1 || sc.x >= space.x_max - 1 ||
        sc.y <= space.y_min + 1 || sc.y >= space.y_max - 1)
      continue;
    for (arma::uword r = 0; r < H0.n_rows; ++r) {
      const Site sr = space.unflatten(r);
      if (sr.x <= space.x_min + 1 || sr.x >= space.x_max - 1 ||
          sr.y <= space.y_min + 1 || sr.y >= space.y_max - 1)
        continue;
      worst = std::max(worst, std::abs(H1(r, c) - rhs(r, c)));
    }
  }
  CHECK(worst < 1e-10);
}

TEST_CASE("cutout_compressions") {
  nlohmann::json params = {{"mu", 2.0}, {"delta", 1.0}};
  const LatticeSpace space = model_space("p_ip", params, 8);
  const FluxFamily fam = named_model("p_ip", params, space);

  const Region empty =
      Region::from_predicate(space, [](int, int) { return false; });
  const FluxFamily same = cutout(fam, empty);
  CHECK(arma::abs(same.build(0.3) - fam.build(0.3)).max() == 0.0);

  // removing a block keeps Hermiticity, drops dimension, keeps periodicity
  const Region block = Region::from_predicate(
      space, [](int x, int y) { return x >= 3 && x <= 5 && y >= 3 && y <= 5; });
  const FluxFamily cut = cutout(fam, block);
  CHECK(cut.dim() == space.dim() - 9 * 2);
  const arma::cx_mat Hc = cut.build(0.3);
  CHECK(hermiticity_defect(Hc) < 1e-12);
  CHECK(spectrum_distance(eigenvalues_only(cut.build(0.2)),
                          eigenvalues_only(cut.build(1.2))) < 1e-8);

  // the region may not touch the flux plaquette
  const Region onflux = Region::from_predicate(
      space, [](int x, int y) { return x == -1 && y == -1; });
  CHECK_THROWS_AS(cutout(fam, onflux), std::invalid_argument);
}

TEST_CASE("p_ip_fiber_hoppings_match_the_bdg_blocks") {
  const double mu = 2.0, delta = 1.0;
  const HoppingSpec spec =
      named_model_hoppings("p_ip", {{"mu", mu}, {"delta", delta}});
  REQUIRE(spec.fiber() == 2);
  auto block = [&](int n1, int n2) { return spec.t.at({n1, n2}); };
  auto mat2 = [](std::complex<double> a, std::complex<double> b,
                 std::complex<double> c, std::complex<double> d) {
    arma::cx_mat m(2, 2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
  };
  CHECK(arma::abs(block(0, 0) - mat2(-mu, 0.0, 0.0, mu)).max() < 1e-14);
  CHECK(arma::abs(block(1, 0) - mat2(1.0, delta, -delta, -1.0)).max() < 1e-14);
  CHECK(arma::abs(block(0, 1) - mat2(1.0, kI * delta, kI * delta, -1.0)).max() <
        1e-14);
  // adjoint pairing t_{-n} = t_n^dagger keeps the assembly Hermitian
  CHECK(arma::abs(block(-1, 0) - block(1, 0).t()).max() < 1e-14);
  CHECK(arma::abs(block(0, -1) - block(0, 1).t()).max() < 1e-14);
}
