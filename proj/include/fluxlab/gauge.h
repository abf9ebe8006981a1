#pragma once

#include <functional>
#include <string>
#include <utility>

#include "fluxlab/lattice.h"

namespace fluxlab {

using Cell = std::pair<int, int>;  // lower-left corner of a lattice cell

// A magnetic potential evaluated on directed nearest-neighbor edges.
// value(x, y, j) returns A(n, n+e_j) for n = (x, y), j in {1, 2}; the reverse
// orientation is minus that, so antisymmetry holds by construction.
struct MagneticPotential {
  std::function<double(int, int, int)> value;
  std::string description;

  double operator()(int x, int y, int j) const { return value(x, y, j); }
};

MagneticPotential operator+(const MagneticPotential& a, const MagneticPotential& b);
MagneticPotential operator*(double c, const MagneticPotential& a);

MagneticPotential zero_gauge();

enum class FieldGauge { symmetric, landau };
enum class FluxGauge { ab, half_line };

// Uniform field B per cell: symmetric A(n,n+e1) = -B n2 / 2, A(n,n+e2) = B n1 / 2;
// Landau A(n,n+e1) = -B n2, A(n,n+e2) = 0.
MagneticPotential uniform_field_gauge(double B, FieldGauge kind);

// Aharonov-Bohm potential for flux 2*pi*alpha through the cell with corner m,
// centered at m' = m + (1/2, 1/2); arctan-difference form, linear in alpha.
MagneticPotential ab_gauge(double alpha, Cell m);

// Half-line gauge: A(n, n+e1) = -2*pi*alpha on the column n1 = m1, n2 > m2.
MagneticPotential half_line_gauge(double alpha, Cell m);

// Standard gauge for an arbitrary cell field B: horizontal edges only, with
// A(n, n+e1) accumulating the field through the column below n.
MagneticPotential standard_gauge(const std::function<double(int, int)>& field_B);

// Holonomy B_A(m) = A(m,1) + A(m+e1,2) - A(m+e2,1) - A(m,2) around cell m.
double holonomy(const MagneticPotential& A, int mx, int my);
double holonomy(const MagneticPotential& A, const LatticeSpace& space, int mx,
                int my);  // bounds-checked variant

// Gauge function G over sites.
struct GaugeFunction {
  std::function<double(int, int)> value;
  double operator()(int x, int y) const { return value(x, y); }
};

// Solve A'(n,m) = A(n,m) + G(n) - G(m) for G on the patch by path sums.
// Holonomies must agree on every interior cell to `tol`; row-first and
// column-first path sums must agree to `tol` as well. G is normalized to
// vanish at the origin when the patch contains it, else at the lower-left
// corner. Throws std::runtime_error on holonomy mismatch.
GaugeFunction gauge_transform_solve(const MagneticPotential& A,
                                    const MagneticPotential& Aprime,
                                    const LatticeSpace& space, double tol = 1e-9);

// Closed-form gauge function with A_AB - A_HL = alpha (dG); F^alpha = e^{-i alpha G}.
double flux_gauge_function(double x, double y, Cell m);

// Diagonal unitary F^alpha = exp(-i alpha G(X)) over the flat index of `space`.
// At alpha = 1 the diagonal is -z/|z| with z = (n1 - m1 - 1/2) + i (n2 - m2 - 1/2).
arma::cx_vec flux_phase(const LatticeSpace& space, Cell m, double alpha = 1.0);

// Product of per-cell flux phases, for multi-tube families.
arma::cx_vec flux_phase_multi(const LatticeSpace& space, const std::vector<Cell>& cells,
                              double alpha = 1.0);

}  // namespace fluxlab
