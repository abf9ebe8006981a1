#include "fluxlab/gauge.h"

#include <cmath>

namespace fluxlab {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

MagneticPotential operator+(const MagneticPotential& a, const MagneticPotential& b) {
  auto fa = a.value, fb = b.value;
  return {[fa, fb](int x, int y, int j) { return fa(x, y, j) + fb(x, y, j); },
          a.description + " + " + b.description};
}

MagneticPotential operator*(double c, const MagneticPotential& a) {
  auto fa = a.value;
  return {[c, fa](int x, int y, int j) { return c * fa(x, y, j); },
          "scaled " + a.description};
}

MagneticPotential zero_gauge() {
  return {[](int, int, int) { return 0.0; }, "zero"};
}

MagneticPotential uniform_field_gauge(double B, FieldGauge kind) {
  if (kind == FieldGauge::symmetric) {
    return {[B](int x, int y, int j) {
              return j == 1 ? -0.5 * B * y : 0.5 * B * x;
            },
            "symmetric uniform field"};
  }
  return {[B](int, int y, int j) { return j == 1 ? -B * y : 0.0; },
          "Landau uniform field"};
}

MagneticPotential ab_gauge(double alpha, Cell m) {
  const double mx = m.first + 0.5, my = m.second + 0.5;
  return {[alpha, mx, my](int x, int y, int j) {
            // Half-integer center keeps every denominator away from zero.
            if (j == 1) {
              return -alpha * (std::atan((x + 1 - mx) / (y - my)) -
                               std::atan((x - mx) / (y - my)));
            }
            return alpha * (std::atan((y + 1 - my) / (x - mx)) -
                            std::atan((y - my) / (x - mx)));
          },
          "Aharonov-Bohm flux"};
}

MagneticPotential half_line_gauge(double alpha, Cell m) {
  const int m1 = m.first, m2 = m.second;
  return {[alpha, m1, m2](int x, int y, int j) {
            if (j == 1 && x == m1 && y > m2) return -2.0 * kPi * alpha;
            return 0.0;
          },
          "half-line flux"};
}

MagneticPotential standard_gauge(const std::function<double(int, int)>& field_B) {
  return {[field_B](int x, int y, int j) {
            if (j == 2) return 0.0;
            // A(n, n+e1) accumulates -B over the cells between row 0 and n.
            double acc = 0.0;
            if (y > 0) {
              for (int k = 0; k < y; ++k) acc -= field_B(x, k);
            } else if (y < 0) {
              for (int k = y; k < 0; ++k) acc += field_B(x, k);
            }
            return acc;
          },
          "standard gauge"};
}

double holonomy(const MagneticPotential& A, int mx, int my) {
  return A(mx, my, 1) + A(mx + 1, my, 2) - A(mx, my + 1, 1) - A(mx, my, 2);
}

double holonomy(const MagneticPotential& A, const LatticeSpace& space, int mx,
                int my) {
  if (!space.contains(mx, my) || !space.contains(mx + 1, my + 1)) {
    throw std::out_of_range("holonomy: cell touches outside the patch");
  }
  return holonomy(A, mx, my);
}

GaugeFunction gauge_transform_solve(const MagneticPotential& A,
                                    const MagneticPotential& Aprime,
                                    const LatticeSpace& space, double tol) {
  for (int x = space.x_min; x < space.x_max; ++x) {
    for (int y = space.y_min; y < space.y_max; ++y) {
      const double d = holonomy(A, x, y) - holonomy(Aprime, x, y);
      if (std::abs(d) > tol) {
        throw std::runtime_error(
            "gauge_transform_solve: potentials are not gauge equivalent "
            "(holonomy mismatch " +
            std::to_string(d) + " at cell " + std::to_string(x) + "," +
            std::to_string(y) + ")");
      }
    }
  }
  // A'(n, n+e_j) - A(n, n+e_j) = G(n) - G(n+e_j): accumulate differences
  // along row-first paths from the anchor.
  const int ax = (space.contains(0, 0)) ? 0 : space.x_min;
  const int ay = (space.contains(0, 0)) ? 0 : space.y_min;
  const int nx = space.nx(), ny = space.ny();
  arma::mat G(nx, ny, arma::fill::zeros);
  auto dA = [&](int x, int y, int j) { return Aprime(x, y, j) - A(x, y, j); };
  auto gx = [&](int x) { return x - space.x_min; };
  auto gy = [&](int y) { return y - space.y_min; };

  // along the anchor row, then up/down each column
  for (int x = ax + 1; x <= space.x_max; ++x)
    G(gx(x), gy(ay)) = G(gx(x - 1), gy(ay)) - dA(x - 1, ay, 1);
  for (int x = ax - 1; x >= space.x_min; --x)
    G(gx(x), gy(ay)) = G(gx(x + 1), gy(ay)) + dA(x, ay, 1);
  for (int x = space.x_min; x <= space.x_max; ++x) {
    for (int y = ay + 1; y <= space.y_max; ++y)
      G(gx(x), gy(y)) = G(gx(x), gy(y - 1)) - dA(x, y - 1, 2);
    for (int y = ay - 1; y >= space.y_min; --y)
      G(gx(x), gy(y)) = G(gx(x), gy(y + 1)) + dA(x, y, 2);
  }

  // path independence: column-first accumulation must agree
  double max_dev = 0.0;
  for (int y = space.y_min; y <= space.y_max; ++y) {
    for (int x = space.x_min; x < space.x_max; ++x) {
      const double lhs = G(gx(x), gy(y)) - G(gx(x + 1), gy(y));
      max_dev = std::max(max_dev, std::abs(lhs - dA(x, y, 1)));
    }
  }
  if (max_dev > tol) {
    throw std::runtime_error(
        "gauge_transform_solve: path-dependent result, residual " +
        std::to_string(max_dev));
  }

  const double g0 = G(gx(ax), gy(ay));
  auto xmin = space.x_min, ymin = space.y_min;
  return {[G, xmin, ymin, g0](int x, int y) {
    return G(x - xmin, y - ymin) - g0;
  }};
}

double flux_gauge_function(double x, double y, Cell m) {
  const double mx = m.first + 0.5, my = m.second + 0.5;
  return -(kPi * (x > mx ? 1.0 : 0.0) + std::atan((y - my) / (x - mx)));
}

arma::cx_vec flux_phase(const LatticeSpace& space, Cell m, double alpha) {
  arma::cx_vec F(space.dim());
  for (arma::uword i = 0; i < space.dim(); ++i) {
    const Site s = space.unflatten(i);
    F(i) = std::exp(std::complex<double>(
        0.0, -alpha * flux_gauge_function(s.x, s.y, m)));
  }
  return F;
}

arma::cx_vec flux_phase_multi(const LatticeSpace& space,
                              const std::vector<Cell>& cells, double alpha) {
  arma::cx_vec F(space.dim(), arma::fill::ones);
  for (const Cell& m : cells) F %= flux_phase(space, m, alpha);
  return F;
}

}  // namespace fluxlab
