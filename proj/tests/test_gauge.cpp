#include <catch2/catch.hpp>

#include <cmath>

#include "fluxlab/gauge.h"

using namespace fluxlab;

namespace {
constexpr double kPi = 3.14159265358979323846;

// max |holonomy| over all cells of the patch except the listed one
double max_holonomy_off(const MagneticPotential& A, const LatticeSpace& space,
                        Cell skip) {
  double worst = 0.0;
  for (int x = space.x_min; x < space.x_max; ++x) {
    for (int y = space.y_min; y < space.y_max; ++y) {
      if (x == skip.first && y == skip.second) continue;
      worst = std::max(worst, std::abs(holonomy(A, x, y)));
    }
  }
  return worst;
}
}  // namespace

TEST_CASE("zero_gauge_has_zero_holonomy") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  CHECK(max_holonomy_off(zero_gauge(), space, {99, 99}) == 0.0);
}

TEST_CASE("ab_gauge_holonomy_is_a_point_flux") {
  const LatticeSpace space = build_lattice(-10, 10, -10, 10, 1, Boundary::open);
  const Cell m{-1, -1};
  for (double alpha : {0.3, 0.5, 1.0, -0.7}) {
    const MagneticPotential A = ab_gauge(alpha, m);
    CHECK(holonomy(A, m.first, m.second) ==
          Approx(2.0 * kPi * alpha).margin(1e-12));
    CHECK(max_holonomy_off(A, space, m) < 1e-12);
  }
}

TEST_CASE("ab_gauge_is_linear_in_alpha") {
  const Cell m{2, -3};
  const MagneticPotential A1 = ab_gauge(0.37, m);
  const MagneticPotential A2 = ab_gauge(0.74, m);
  for (int x = -6; x <= 6; ++x) {
    for (int y = -6; y <= 6; ++y) {
      for (int j : {1, 2}) {
        CHECK(A2(x, y, j) == Approx(2.0 * A1(x, y, j)).margin(1e-14));
      }
    }
  }
}

TEST_CASE("holonomy_is_linear_in_the_potential") {
  const MagneticPotential A = ab_gauge(0.4, {-1, -1});
  const MagneticPotential Ap = uniform_field_gauge(0.23, FieldGauge::symmetric);
  const MagneticPotential sum = A + 1.7 * Ap;
  for (int x = -4; x <= 3; ++x) {
    for (int y = -4; y <= 3; ++y) {
      CHECK(holonomy(sum, x, y) ==
            Approx(holonomy(A, x, y) + 1.7 * holonomy(Ap, x, y)).margin(1e-12));
    }
  }
}

TEST_CASE("holonomy_bounds_check_rejects_outside_cells") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 1, Boundary::open);
  const MagneticPotential A = zero_gauge();
  CHECK(holonomy(A, space, 4, 4) == 0.0);
  CHECK_THROWS_AS(holonomy(A, space, 5, 0), std::out_of_range);
  CHECK_THROWS_AS(holonomy(A, space, 0, -6), std::out_of_range);
}

TEST_CASE("uniform_field_gauge_closed_forms") {
  const double B = 0.8;
  const MagneticPotential sym = uniform_field_gauge(B, FieldGauge::symmetric);
  const MagneticPotential lan = uniform_field_gauge(B, FieldGauge::landau);
  CHECK(sym(1, 1, 2) == Approx(0.5 * B).margin(1e-14));
  CHECK(sym(3, -2, 1) == Approx(-0.5 * B * -2).margin(1e-14));
  CHECK(lan(3, -2, 1) == Approx(-B * -2).margin(1e-14));
  CHECK(lan(3, -2, 2) == 0.0);
  const LatticeSpace space = build_lattice(-6, 6, -6, 6, 1, Boundary::open);
  for (const MagneticPotential* A : {&sym, &lan}) {
    for (int x = -5; x < 5; ++x) {
      for (int y = -5; y < 5; ++y) {
        CHECK(holonomy(*A, x, y) == Approx(B).margin(1e-12));
      }
    }
  }
  (void)space;
}

TEST_CASE("uniform_field_zero_is_the_zero_potential") {
  for (FieldGauge kind : {FieldGauge::symmetric, FieldGauge::landau}) {
    const MagneticPotential A = uniform_field_gauge(0.0, kind);
    for (int x = -3; x <= 3; ++x)
      for (int y = -3; y <= 3; ++y)
        for (int j : {1, 2}) CHECK(A(x, y, j) == 0.0);
  }
}

TEST_CASE("standard_gauge_reproduces_its_field") {
  const LatticeSpace space = build_lattice(-8, 8, -8, 8, 1, Boundary::open);

  // zero field -> zero potential
  const MagneticPotential z = standard_gauge([](int, int) { return 0.0; });
  for (int x = -4; x <= 4; ++x)
    for (int y = -4; y <= 4; ++y)
      for (int j : {1, 2}) CHECK(z(x, y, j) == 0.0);

  // constant field reduces to the Landau gauge on horizontal edges
  const double B0 = 0.35;
  const MagneticPotential c = standard_gauge([&](int, int) { return B0; });
  for (int x = -4; x <= 4; ++x) {
    for (int y = -4; y <= 4; ++y) {
      CHECK(c(x, y, 1) == Approx(-B0 * y).margin(1e-12));
      CHECK(c(x, y, 2) == 0.0);
    }
  }

  // point flux at (0,0)
  const MagneticPotential p = standard_gauge(
      [](int x, int y) { return (x == 0 && y == 0) ? kPi : 0.0; });
  CHECK(holonomy(p, 0, 0) == Approx(kPi).margin(1e-12));
  CHECK(max_holonomy_off(p, space, {0, 0}) < 1e-12);

  // generic smooth field reproduced on every interior cell
  auto field = [](int x, int y) { return 0.1 * x - 0.07 * y * y; };
  const MagneticPotential g = standard_gauge(field);
  for (int x = -7; x < 7; ++x) {
    for (int y = -7; y < 7; ++y) {
      CHECK(holonomy(g, x, y) == Approx(field(x, y)).margin(1e-12));
    }
  }
}

TEST_CASE("half_line_gauge_support_and_holonomy") {
  const Cell m{-1, -1};
  const double alpha = 0.41;
  const MagneticPotential A = half_line_gauge(alpha, m);
  const LatticeSpace space = build_lattice(-9, 9, -9, 9, 1, Boundary::open);
  CHECK(holonomy(A, m.first, m.second) ==
        Approx(2.0 * kPi * alpha).margin(1e-12));
  CHECK(max_holonomy_off(A, space, m) < 1e-12);

  // support: exactly N+1 horizontal edges at n1 = -1, n2 in {0..N} on [-N,N]^2
  const int N = 9;
  int support = 0;
  for (int x = -N; x <= N; ++x) {
    for (int y = -N; y <= N; ++y) {
      if (A(x, y, 1) != 0.0) {
        ++support;
        CHECK(x == m.first);
        CHECK(y > m.second);
        CHECK(A(x, y, 1) == Approx(-2.0 * kPi * alpha).margin(1e-14));
      }
      CHECK(A(x, y, 2) == 0.0);
    }
  }
  CHECK(support == N + 1);

  const MagneticPotential zero = half_line_gauge(0.0, m);
  for (int x = -3; x <= 3; ++x)
    for (int y = -3; y <= 3; ++y) CHECK(zero(x, y, 1) == 0.0);
}

TEST_CASE("gauge_transform_solve_identity_and_mismatch") {
  const LatticeSpace space = build_lattice(-6, 6, -6, 6, 1, Boundary::open);
  const MagneticPotential A = uniform_field_gauge(0.3, FieldGauge::symmetric);
  const GaugeFunction G = gauge_transform_solve(A, A, space);
  for (int x = -6; x <= 6; ++x)
    for (int y = -6; y <= 6; ++y) CHECK(std::abs(G(x, y)) < 1e-12);

  // different holonomies are not gauge equivalent
  const MagneticPotential Ap = uniform_field_gauge(0.4, FieldGauge::symmetric);
  CHECK_THROWS_AS(gauge_transform_solve(A, Ap, space), std::runtime_error);
}

TEST_CASE("symmetric_vs_landau_gauge_function") {
  // with the edge convention A'(n,m) = A(n,m) + G(n) - G(m), the
  // Landau-to-symmetric direction carries the textbook G = -(B/2) n1 n2
  const double B = 0.3;
  const LatticeSpace space = build_lattice(-7, 7, -7, 7, 1, Boundary::open);
  const GaugeFunction G =
      gauge_transform_solve(uniform_field_gauge(B, FieldGauge::landau),
                            uniform_field_gauge(B, FieldGauge::symmetric), space);
  const GaugeFunction Grev =
      gauge_transform_solve(uniform_field_gauge(B, FieldGauge::symmetric),
                            uniform_field_gauge(B, FieldGauge::landau), space);
  for (int x = -7; x <= 7; ++x) {
    for (int y = -7; y <= 7; ++y) {
      CHECK(G(x, y) == Approx(-0.5 * B * x * y).margin(1e-9));
      CHECK(Grev(x, y) == Approx(0.5 * B * x * y).margin(1e-9));
    }
  }
}

TEST_CASE("ab_vs_halfline_gauge_function_matches_closed_form") {
  const Cell m{-1, -1};
  const double alpha = 0.37;
  const LatticeSpace space = build_lattice(-8, 8, -8, 8, 1, Boundary::open);
  const GaugeFunction G = gauge_transform_solve(
      ab_gauge(alpha, m), half_line_gauge(alpha, m), space);
  // solved G differs from -alpha * closed form by a constant only
  double lo = 1e300, hi = -1e300;
  for (int x = -8; x <= 8; ++x) {
    for (int y = -8; y <= 8; ++y) {
      const double d = G(x, y) + alpha * flux_gauge_function(x, y, m);
      lo = std::min(lo, d);
      hi = std::max(hi, d);
    }
  }
  CHECK(hi - lo < 1e-9);
}

TEST_CASE("arctan_branch_identity") {
  for (double a : {0.1, 0.7, 1.0, 3.5, 40.0, -0.2, -1.0, -8.0}) {
    CHECK(std::atan(a) + std::atan(1.0 / a) ==
          Approx(0.5 * kPi * (a > 0 ? 1.0 : -1.0)).margin(1e-14));
  }
}

TEST_CASE("flux_phase_unimodular_closed_form") {
  const LatticeSpace space = build_lattice(-6, 6, -6, 6, 1, Boundary::open);
  const Cell m{-1, -1};
  const arma::cx_vec F = flux_phase(space, m, 1.0);
  CHECK(arma::abs(arma::abs(F) - 1.0).max() < 1e-12);

  // at n = m + (1,1) the relative coordinate is (1/2, 1/2)
  const std::complex<double> z(0.5, 0.5);
  const std::complex<double> expect = -z / std::abs(z);
  const arma::uword idx = space.flatten(0, 0, 0);
  CHECK(std::abs(F(idx) - expect) < 1e-12);

  // general closed form -z/|z| at every site
  for (int x = -6; x <= 6; ++x) {
    for (int y = -6; y <= 6; ++y) {
      const std::complex<double> w(x + 0.5, y + 0.5);
      CHECK(std::abs(F(space.flatten(x, y, 0)) + w / std::abs(w)) < 1e-12);
    }
  }
}

TEST_CASE("flux_phase_powers_compose") {
  const LatticeSpace space = build_lattice(-5, 5, -5, 5, 2, Boundary::open);
  const Cell m{1, 0};
  const arma::cx_vec F1 = flux_phase(space, m, 1.0);
  const arma::cx_vec F2 = flux_phase(space, m, 2.0);
  CHECK(arma::abs(F2 - F1 % F1).max() < 1e-12);
  const arma::cx_vec Fh = flux_phase(space, m, 0.5);
  CHECK(arma::abs(F1 - Fh % Fh).max() < 1e-12);
}

TEST_CASE("flux_phase_multi_is_the_per_cell_product") {
  const LatticeSpace space = build_lattice(-12, 11, -12, 11, 1, Boundary::open);
  const std::vector<Cell> cells = {{-6, -6}, {5, 5}};
  const arma::cx_vec FM = flux_phase_multi(space, cells, 0.7);
  const arma::cx_vec prod =
      flux_phase(space, cells[0], 0.7) % flux_phase(space, cells[1], 0.7);
  CHECK(arma::abs(FM - prod).max() < 1e-12);
}
