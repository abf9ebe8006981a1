#include <catch2/catch.hpp>

#include <cmath>
#include <complex>

#include "fluxlab/operators.h"

using namespace fluxlab;

namespace {
constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kI(0.0, 1.0);

// true when both endpoint sites of entry (row, col) are at least `buffer`
// sites away from the open boundary
bool interior_entry(const LatticeSpace& space, arma::uword row, arma::uword col,
                    int buffer) {
  for (arma::uword idx : {row, col}) {
    const Site s = space.unflatten(idx);
    if (s.x - space.x_min < buffer || space.x_max - s.x < buffer ||
        s.y - space.y_min < buffer || space.y_max - s.y < buffer)
      return false;
  }
  return true;
}

double max_interior_diff(const arma::cx_mat& A, const arma::cx_mat& B,
                         const LatticeSpace& space, int buffer) {
  double worst = 0.0;
  for (arma::uword c = 0; c < A.n_cols; ++c) {
    for (arma::uword r = 0; r < A.n_rows; ++r) {
      if (A(r, c) == 0.0 && B(r, c) == 0.0) continue;
      if (!interior_entry(space, r, c, buffer)) continue;
      worst = std::max(worst, std::abs(A(r, c) - B(r, c)));
    }
  }
  return worst;
}
}  // namespace

TEST_CASE("zero_potential_gives_the_plain_shift") {
  const LatticeSpace space = build_lattice(-3, 3, -3, 3, 1, Boundary::open);
  const arma::cx_mat S = magnetic_translation(space, zero_gauge(), 1);
  for (int x = space.x_min + 1; x <= space.x_max; ++x) {
    for (int y = space.y_min; y <= space.y_max; ++y) {
      CHECK(std::abs(S(space.flatten(x - 1, y, 0), space.flatten(x, y, 0)) -
                     1.0) < 1e-15);
    }
  }
  CHECK(std::abs(arma::accu(arma::abs(S)) - space.ny() * (space.nx() - 1)) <
        1e-12);
}

TEST_CASE("translations_are_partial_isometries_on_open_spaces") {
  const LatticeSpace space = build_lattice(-4, 4, -4, 4, 2, Boundary::open);
  const MagneticPotential A =
      uniform_field_gauge(0.31, FieldGauge::symmetric) + ab_gauge(0.5, {-1, -1});
  for (int j : {1, 2}) {
    const arma::cx_mat S = magnetic_translation(space, A, j);
    const arma::cx_mat StS = S.t() * S;
    arma::cx_mat D = StS;
    D.diag().zeros();
    CHECK(arma::abs(D).max() < 1e-12);  // off-diagonal part
    int zeros = 0, ones = 0;
    for (arma::uword i = 0; i < StS.n_rows; ++i) {
      const double v = std::real(StS(i, i));
      if (std::abs(v) < 1e-12) ++zeros;
      if (std::abs(v - 1.0) < 1e-12) ++ones;
    }
    CHECK(zeros + ones == static_cast<int>(StS.n_rows));
    CHECK(zeros == 9 * 2);  // one truncated line of sites, both orbitals
  }
}

TEST_CASE("translations_are_unitary_on_periodic_directions") {
  const LatticeSpace space = build_lattice(-4, 3, -4, 3, 1, Boundary::periodic_x);
  const MagneticPotential A = uniform_field_gauge(2.0 * kPi / 4.0, FieldGauge::landau);
  const arma::cx_mat S = magnetic_translation(space, A, 1);
  const arma::cx_mat id(space.dim(), space.dim(), arma::fill::eye);
  CHECK(arma::abs(S.t() * S - id).max() < 1e-12);
  CHECK(arma::abs(S * S.t() - id).max() < 1e-12);
}

TEST_CASE("commutation_defect_reads_the_field") {
  const LatticeSpace space = build_lattice(-4, 4, -4, 4, 1, Boundary::open);

  // plain shifts: identity on interior sites
  const arma::cx_mat P1 = magnetic_translation(space, zero_gauge(), 1);
  const arma::cx_mat P2 = magnetic_translation(space, zero_gauge(), 2);
  const arma::cx_mat D0 = commutation_defect(P1, P2);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      CHECK(std::abs(D0(space.flatten(x, y, 0), space.flatten(x, y, 0)) - 1.0) <
            1e-12);

  // uniform field: diagonal e^{iB} on interior sites
  const double B = 0.47;
  const MagneticPotential A = uniform_field_gauge(B, FieldGauge::symmetric);
  const arma::cx_mat S1 = magnetic_translation(space, A, 1);
  const arma::cx_mat S2 = magnetic_translation(space, A, 2);
  const arma::cx_mat D = commutation_defect(S1, S2);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y)
      CHECK(std::abs(D(space.flatten(x, y, 0), space.flatten(x, y, 0)) -
                     std::exp(kI * B)) < 1e-12);
}

TEST_CASE("commutation_defect_sees_the_flux_tube") {
  const LatticeSpace space = build_lattice(-6, 6, -6, 6, 1, Boundary::open);
  const Cell m{-1, -1};
  const MagneticPotential A = ab_gauge(0.5, m);
  const arma::cx_mat D = commutation_defect(magnetic_translation(space, A, 1),
                                            magnetic_translation(space, A, 2));
  // diagonal entry at site n is e^{i * holonomy of the cell with corner n}
  for (int x = -5; x <= 5; ++x) {
    for (int y = -5; y <= 5; ++y) {
      const std::complex<double> d =
          D(space.flatten(x, y, 0), space.flatten(x, y, 0));
      if (x == m.first && y == m.second) {
        CHECK(std::abs(d + 1.0) < 1e-12);  // e^{i pi}
      } else {
        CHECK(std::abs(d - 1.0) < 1e-12);
      }
    }
  }
}

TEST_CASE("flux_translations_reduce_to_field_only_at_zero_flux") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  const double B = 0.6;
  const FluxTranslations st =
      flux_translations(space, B, 0.0, {-1, -1}, FluxGauge::ab,
                        FieldGauge::symmetric);
  const MagneticPotential As = uniform_field_gauge(B, FieldGauge::symmetric);
  CHECK(arma::abs(st.S1 - magnetic_translation(space, As, 1)).max() < 1e-14);
  CHECK(arma::abs(st.S2 - magnetic_translation(space, As, 2)).max() < 1e-14);
}

TEST_CASE("halfline_landau_vertical_translation_is_the_plain_shift") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  const FluxTranslations st =
      flux_translations(space, 0.0, 0.37, {-1, -1}, FluxGauge::half_line,
                        FieldGauge::landau);
  const arma::cx_mat S2 = magnetic_translation(space, zero_gauge(), 2);
  CHECK(arma::abs(st.S2 - S2).max() == 0.0);
}

TEST_CASE("conjugation_moves_between_gauges") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  const double B = 0.4;
  const MagneticPotential Asym = uniform_field_gauge(B, FieldGauge::symmetric);
  const MagneticPotential Alan = uniform_field_gauge(B, FieldGauge::landau);
  const GaugeFunction G = gauge_transform_solve(Asym, Alan, space);
  arma::cx_vec u(space.dim());
  for (arma::uword i = 0; i < space.dim(); ++i) {
    const Site s = space.unflatten(i);
    u(i) = std::exp(kI * G(s.x, s.y));
  }
  for (int j : {1, 2}) {
    const arma::cx_mat Ssym = magnetic_translation(space, Asym, j);
    const arma::cx_mat Slan = magnetic_translation(space, Alan, j);
    CHECK(arma::abs(conjugate_diag(Ssym, u) - Slan).max() < 1e-12);
  }

  // identity conjugation is a no-op
  const arma::cx_mat S = magnetic_translation(space, Asym, 1);
  const arma::cx_mat id(space.dim(), space.dim(), arma::fill::eye);
  CHECK(arma::abs(conjugate(S, id) - S).max() == 0.0);
}

TEST_CASE("complex_conjugation_flips_the_potential") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  const MagneticPotential A =
      uniform_field_gauge(0.52, FieldGauge::symmetric) + ab_gauge(0.3, {0, 1});
  const MagneticPotential Aneg = -1.0 * A;
  for (int j : {1, 2}) {
    const arma::cx_mat S = magnetic_translation(space, A, j);
    const arma::cx_mat Sneg = magnetic_translation(space, Aneg, j);
    CHECK(arma::abs(arma::conj(S) - Sneg).max() < 1e-14);
  }
}

TEST_CASE("flux_period_covariance_through_the_flux_phase") {
  const LatticeSpace space = build_lattice(-6, 5, -6, 5, 1, Boundary::open);
  const Cell m{-1, -1};
  const double B = 0.3, alpha = 0.37;
  const FluxTranslations lo = flux_translations(space, B, alpha, m);
  const FluxTranslations hi = flux_translations(space, B, alpha + 1.0, m);
  const arma::cx_vec F = flux_phase(space, m, 1.0);
  for (int j : {1, 2}) {
    const arma::cx_mat& Sa = (j == 1) ? lo.S1 : lo.S2;
    const arma::cx_mat& Sa1 = (j == 1) ? hi.S1 : hi.S2;
    // S^{B,alpha+1} = F S^{B,alpha} F* = conjugate(S, F*)
    const arma::cx_mat rhs = conjugate_diag(Sa, arma::conj(F));
    CHECK(max_interior_diff(Sa1, rhs, space, 2) < 1e-12);
  }
}

TEST_CASE("flux_dressing_decays_away_from_the_tube") {
  const LatticeSpace space = build_lattice(-16, 16, -16, 16, 1, Boundary::open);
  const Cell m{-1, -1};
  const double B = 0.3;
  const arma::cx_mat S0 = flux_translations(space, B, 0.0, m).S1;
  const arma::cx_mat Sh = flux_translations(space, B, 0.5, m).S1;
  const std::vector<DecayPoint> prof =
      decay_profile(Sh - S0, space, m.first + 0.5, m.second + 0.5,
                    {4.0, 8.0, 12.0});
  REQUIRE(prof.size() == 3);
  CHECK(prof[0].max_entry > prof[1].max_entry);
  CHECK(prof[1].max_entry > prof[2].max_entry);

  // the far-field bound of the dressing phase, checked on the potential
  // itself: the operator entry on an edge is exactly e^{-iA}, so
  // |dressed - bare| = |e^{-iA_AB} - 1| on that edge
  const MagneticPotential ab = ab_gauge(0.5, m);
  double worst = 0.0;
  for (int x = 63; x <= 65; ++x) {
    for (int y = -65; y <= 65; ++y) {
      for (int j : {1, 2}) {
        worst = std::max(worst, std::abs(std::exp(-kI * ab(x, y, j)) - 1.0));
      }
    }
  }
  CHECK(worst < 1e-2);
}

TEST_CASE("halfline_defect_lives_on_the_cut") {
  const int N = 6;
  const LatticeSpace space = build_lattice(-N, N, -N, N, 1, Boundary::open);
  const Cell m{-1, -1};

  CHECK(arma::abs(halfline_defect(space, 0.3, 0.0, m)).max() == 0.0);

  const double alpha = 0.5;
  const arma::cx_mat L = halfline_defect(space, 0.3, alpha, m);
  const double mod = std::abs(std::exp(2.0 * kPi * kI * alpha) - 1.0);
  CHECK(mod == Approx(2.0).margin(1e-14));
  int support = 0;
  for (arma::uword c = 0; c < L.n_cols; ++c) {
    for (arma::uword r = 0; r < L.n_rows; ++r) {
      if (std::abs(L(r, c)) == 0.0) continue;
      ++support;
      CHECK(std::abs(L(r, c)) == Approx(mod).margin(1e-12));
      // the affected hop is the edge from (m1, y) to (m1+1, y), y > m2
      const Site row = space.unflatten(r);
      const Site col = space.unflatten(c);
      CHECK(row.x == m.first);
      CHECK(col.x == m.first + 1);
      CHECK(row.y == col.y);
      CHECK(row.y > m.second);
    }
  }
  CHECK(support == N + 1);

  // no decay with distance along the cut: the non-compactness witness
  const std::vector<DecayPoint> prof = decay_profile(
      L, space, m.first + 0.5, m.second + 0.5, {1.0, 3.0, 5.0});
  for (const DecayPoint& p : prof) {
    CHECK(p.max_entry == Approx(mod).margin(1e-12));
  }

  const std::vector<DecayPoint> zeros = decay_profile(
      arma::cx_mat(space.dim(), space.dim(), arma::fill::zeros), space, 0.0,
      0.0, {1.0, 2.0});
  for (const DecayPoint& p : zeros) CHECK(p.max_entry == 0.0);
}

TEST_CASE("operator_power_uses_the_adjoint_for_negative_steps") {
  const LatticeSpace space = build_lattice(-4, 4, -4, 4, 1, Boundary::open);
  const arma::cx_mat S =
      magnetic_translation(space, uniform_field_gauge(0.3, FieldGauge::symmetric), 1);
  CHECK(arma::abs(operator_power(S, 2) - S * S).max() == 0.0);
  CHECK(arma::abs(operator_power(S, -2) - S.t() * S.t()).max() == 0.0);
  const arma::cx_mat id(space.dim(), space.dim(), arma::fill::eye);
  CHECK(arma::abs(operator_power(S, 0) - id).max() == 0.0);
}
