#pragma once

#include <armadillo>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace fluxlab {

enum class Boundary { open, periodic_x, periodic_xy };

struct Site {
  int x;
  int y;
  int orbital;
};

// Finite rectangular patch of the square lattice with an L-dimensional fiber.
// Flat index runs site-major, orbital-minor: ((x-x_min)*ny + (y-y_min))*L + l.
struct LatticeSpace {
  int x_min, x_max;
  int y_min, y_max;
  int orbitals = 1;
  Boundary boundary = Boundary::open;

  int nx() const { return x_max - x_min + 1; }
  int ny() const { return y_max - y_min + 1; }
  arma::uword n_sites() const {
    return static_cast<arma::uword>(nx()) * static_cast<arma::uword>(ny());
  }
  arma::uword dim() const { return n_sites() * static_cast<arma::uword>(orbitals); }

  bool contains(int x, int y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }

  arma::uword site_index(int x, int y) const {
    return static_cast<arma::uword>(x - x_min) * static_cast<arma::uword>(ny()) +
           static_cast<arma::uword>(y - y_min);
  }
  arma::uword flatten(int x, int y, int l) const {
    return site_index(x, y) * static_cast<arma::uword>(orbitals) +
           static_cast<arma::uword>(l);
  }
  Site unflatten(arma::uword idx) const {
    const int l = static_cast<int>(idx % static_cast<arma::uword>(orbitals));
    const arma::uword s = idx / static_cast<arma::uword>(orbitals);
    const int y = y_min + static_cast<int>(s % static_cast<arma::uword>(ny()));
    const int x = x_min + static_cast<int>(s / static_cast<arma::uword>(ny()));
    return {x, y, l};
  }

  // The L = 1 sibling used to build site-space shift operators.
  LatticeSpace site_space() const {
    LatticeSpace s = *this;
    s.orbitals = 1;
    return s;
  }
};

LatticeSpace build_lattice(int x_min, int x_max, int y_min, int y_max, int orbitals,
                           Boundary boundary);

// Diagonal position operators X1, X2 with X_j |n, l> = n_j |n, l>.
// Returned as real diagonal vectors over the flat index; callers needing a
// dense matrix can diagmat() them.
struct PositionOperators {
  arma::vec x1;
  arma::vec x2;
};
PositionOperators position_operators(const LatticeSpace& space);

// A region is a site predicate with a cached flat-index list (all orbitals of a
// member site are members).
struct Region {
  std::vector<arma::uword> flat_indices;  // sorted
  arma::uword space_dim = 0;

  static Region from_predicate(const LatticeSpace& space,
                               const std::function<bool(int, int)>& member);
  static Region quarter_plane(const LatticeSpace& space, int x_lt, int y_gt);
  static Region column(const LatticeSpace& space, int x);
  static Region strip_x(const LatticeSpace& space, int x_lo, int x_hi);
  static Region box(const LatticeSpace& space, double cx, double cy,
                    double half_width);
  static Region ball(const LatticeSpace& space, double cx, double cy, double radius);

  arma::uword rank() const { return flat_indices.size(); }
  // 0/1 indicator over the flat index.
  arma::vec indicator() const;
};

arma::cx_mat region_projector(const LatticeSpace& space, const Region& region);

}  // namespace fluxlab
