#include "fluxlab/lattice.h"

#include <algorithm>

namespace fluxlab {

LatticeSpace build_lattice(int x_min, int x_max, int y_min, int y_max, int orbitals,
                           Boundary boundary) {
  if (x_max < x_min || y_max < y_min) {
    throw std::invalid_argument("build_lattice: empty coordinate range");
  }
  if (orbitals < 1) {
    throw std::invalid_argument("build_lattice: orbitals must be >= 1");
  }
  return LatticeSpace{x_min, x_max, y_min, y_max, orbitals, boundary};
}

PositionOperators position_operators(const LatticeSpace& space) {
  arma::vec x1(space.dim()), x2(space.dim());
  for (arma::uword i = 0; i < space.dim(); ++i) {
    const Site s = space.unflatten(i);
    x1(i) = s.x;
    x2(i) = s.y;
  }
  return {x1, x2};
}

Region Region::from_predicate(const LatticeSpace& space,
                              const std::function<bool(int, int)>& member) {
  Region r;
  r.space_dim = space.dim();
  for (int x = space.x_min; x <= space.x_max; ++x) {
    for (int y = space.y_min; y <= space.y_max; ++y) {
      if (!member(x, y)) continue;
      for (int l = 0; l < space.orbitals; ++l) {
        r.flat_indices.push_back(space.flatten(x, y, l));
      }
    }
  }
  std::sort(r.flat_indices.begin(), r.flat_indices.end());
  return r;
}

Region Region::quarter_plane(const LatticeSpace& space, int x_lt, int y_gt) {
  return from_predicate(space,
                        [=](int x, int y) { return x < x_lt && y > y_gt; });
}

Region Region::column(const LatticeSpace& space, int x) {
  return from_predicate(space, [=](int x0, int) { return x0 == x; });
}

Region Region::strip_x(const LatticeSpace& space, int x_lo, int x_hi) {
  return from_predicate(space,
                        [=](int x, int) { return x >= x_lo && x <= x_hi; });
}

Region Region::box(const LatticeSpace& space, double cx, double cy,
                   double half_width) {
  return from_predicate(space, [=](int x, int y) {
    return std::abs(x - cx) <= half_width && std::abs(y - cy) <= half_width;
  });
}

Region Region::ball(const LatticeSpace& space, double cx, double cy, double radius) {
  return from_predicate(space, [=](int x, int y) {
    const double dx = x - cx, dy = y - cy;
    return dx * dx + dy * dy <= radius * radius;
  });
}

arma::vec Region::indicator() const {
  arma::vec ind(space_dim, arma::fill::zeros);
  for (arma::uword i : flat_indices) ind(i) = 1.0;
  return ind;
}

arma::cx_mat region_projector(const LatticeSpace& space, const Region& region) {
  if (region.space_dim != space.dim()) {
    throw std::invalid_argument("region_projector: region built for another space");
  }
  return arma::cx_mat(arma::diagmat(region.indicator()),
                      arma::mat(space.dim(), space.dim(), arma::fill::zeros));
}

}  // namespace fluxlab
