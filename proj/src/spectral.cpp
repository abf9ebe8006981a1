#include "fluxlab/spectral.h"

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace fluxlab {

namespace {

arma::uvec ball_indices(const arma::vec& xs, const arma::vec& ys, double cx,
                        double cy, double radius) {
  const arma::vec d2 = arma::square(xs - cx) + arma::square(ys - cy);
  return arma::find(d2 <= radius * radius);
}

std::pair<double, double> first_cell_center(const FluxFamily& family) {
  const Cell m = family.cells.front();
  return {m.first + 0.5, m.second + 0.5};
}

// Flat indices within radius r of the nearest flux cell center.
arma::uvec union_ball(const FluxFamily& family, double r) {
  arma::vec best_d2(family.xs.n_elem, arma::fill::value(arma::datum::inf));
  for (const Cell& m : family.cells) {
    const arma::vec d2 = arma::square(family.xs - (m.first + 0.5)) +
                         arma::square(family.ys - (m.second + 0.5));
    best_d2 = arma::min(best_d2, d2);
  }
  return arma::find(best_d2 <= r * r);
}

// All eigenvalues (or a window) through the RRR solver; noticeably faster
// than the divide-and-conquer path when only values are needed.
SpectrumResult zheevr_solve(const arma::cx_mat& H, char range, double lo,
                            double hi, bool vectors) {
  arma::cx_mat W = H;
  const lapack_int n = static_cast<lapack_int>(W.n_rows);
  arma::vec evals(W.n_rows);
  arma::cx_mat Z;
  if (vectors) Z.set_size(W.n_rows, W.n_rows);
  arma::cx_double z_dummy;
  std::vector<lapack_int> isuppz(2 * std::max<std::size_t>(W.n_rows, 1));
  lapack_int found = 0;
  const lapack_int info = LAPACKE_zheevr(
      LAPACK_COL_MAJOR, vectors ? 'V' : 'N', range, 'L', n,
      reinterpret_cast<lapack_complex_double*>(W.memptr()), n, lo, hi, 0, 0,
      2.0 * LAPACKE_dlamch('S'), &found, evals.memptr(),
      reinterpret_cast<lapack_complex_double*>(vectors ? Z.memptr() : &z_dummy),
      vectors ? n : 1, isuppz.data());
  if (info != 0) throw std::runtime_error("zheevr failed");
  SpectrumResult out;
  out.eigenvalues = evals.head(found);
  if (vectors) out.eigenvectors = Z.head_cols(found);
  return out;
}

}  // namespace

SpectrumResult diagonalize(const arma::cx_mat& H, bool vectors) {
  SpectrumResult out;
  if (!vectors) {
    out.eigenvalues = eigenvalues_only(H);
    return out;
  }
  arma::eig_sym(out.eigenvalues, out.eigenvectors, H, "dc");
  return out;
}

arma::vec eigenvalues_only(const arma::cx_mat& H) {
  return zheevr_solve(H, 'A', 0, 0, false).eigenvalues;
}

SpectrumResult diagonalize_window(const arma::cx_mat& H, double lo, double hi,
                                  bool vectors) {
  return zheevr_solve(H, 'V', lo, hi, vectors);
}

int count_below(const arma::cx_mat& H, double mu) {
  const double floor = -0.25 * std::numeric_limits<double>::max();
  return static_cast<int>(
      zheevr_solve(H, 'V', floor, mu, false).eigenvalues.n_elem);
}

FermiProjection fermi_projection(const SpectrumResult& spec, double mu,
                                 double guard) {
  if (spec.eigenvectors.n_cols == 0) {
    throw std::invalid_argument("fermi_projection: eigenvectors required");
  }
  const double closest = arma::abs(spec.eigenvalues - mu).min();
  if (closest < guard) {
    throw std::runtime_error(
        "fermi_projection: eigenvalue within guard distance of the Fermi "
        "level (" +
        std::to_string(closest) + ")");
  }
  FermiProjection out;
  const arma::uvec occ = arma::find(spec.eigenvalues < mu);
  out.occupied = spec.eigenvectors.cols(occ);
  out.P = out.occupied * out.occupied.t();
  out.rank = static_cast<int>(occ.n_elem);
  return out;
}

SwitchFunction make_switch(double a, double b, int order) {
  if (!(b > a)) throw std::invalid_argument("make_switch: need b > a");
  if (order != 3 && order != 5 && order != 7) {
    throw std::invalid_argument("make_switch: order must be 3, 5, or 7");
  }
  auto s = [order](double t) {
    t = std::clamp(t, 0.0, 1.0);
    switch (order) {
      case 3: return (3 - 2 * t) * t * t;
      case 5: return ((6 * t - 15) * t + 10) * t * t * t;
      default: return (((-20 * t + 70) * t - 84) * t + 35) * t * t * t * t;
    }
  };
  auto sp = [order](double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    switch (order) {
      case 3: return 6 * t * (1 - t);
      case 5: return ((30 * t - 60) * t + 30) * t * t;
      default: return (((-140 * t + 420) * t - 420) * t + 140) * t * t * t;
    }
  };
  SwitchFunction sw;
  sw.a = a;
  sw.b = b;
  sw.order = order;
  sw.g = [a, b, s](double x) { return 1.0 - s((x - a) / (b - a)); };
  sw.gp = [a, b, sp](double x) { return -sp((x - a) / (b - a)) / (b - a); };
  // the derivative must integrate to -1 across the step (Simpson)
  const int n = 2000;
  const double h = (b - a) / n;
  double integral = sw.gp(a) + sw.gp(b);
  for (int i = 1; i < n; ++i) {
    integral += (i % 2 ? 4.0 : 2.0) * sw.gp(a + i * h);
  }
  integral *= h / 3.0;
  if (std::abs(integral + 1.0) > 1e-8) {
    throw std::runtime_error(
        "make_switch: derivative fails to integrate to -1");
  }
  return sw;
}

arma::cx_mat spectral_function(const SpectrumResult& spec,
                               const std::function<double(double)>& f) {
  arma::vec fe(spec.eigenvalues.n_elem);
  for (arma::uword i = 0; i < fe.n_elem; ++i) fe(i) = f(spec.eigenvalues(i));
  return spec.eigenvectors * arma::diagmat(fe) * spec.eigenvectors.t();
}

namespace {

struct FlowPoint {
  double alpha;
  int below;
  double nearest;  // min |E - mu|
};

FlowPoint flow_point(const FluxFamily& family, double alpha, double mu,
                     int* evals) {
  const arma::vec ev = eigenvalues_only(family.build(alpha));
  ++*evals;
  return {alpha, static_cast<int>(arma::accu(ev <= mu)),
          arma::abs(ev - mu).min()};
}

}  // namespace

double flux_mass(const arma::cx_vec& v, const FluxFamily& family, double r) {
  const arma::vec w = arma::square(arma::abs(v));
  const double total = arma::accu(w);
  if (total == 0.0) return 0.0;
  return arma::accu(w(union_ball(family, r))) / total;
}

SpectralFlowResult spectral_flow(const FluxFamily& family,
                                 const std::vector<double>& alpha_grid,
                                 double mu, double window_delta,
                                 double loc_radius, int max_depth) {
  if (alpha_grid.size() < 2) {
    throw std::invalid_argument("spectral_flow: need at least two grid points");
  }
  // bracket width the counter tightens single crossings to before classifying
  constexpr double kCrossingWidth = 1e-3;
  // below this width a persisting multiple crossing is treated as degenerate
  constexpr double kDegenerateWidth = 1e-6;

  SpectralFlowResult out;

  // The gap about mu at the first grid point fixes the displaced probe level.
  // Counting at mu itself fails on symmetric families: a BdG spectrum is
  // mirror-symmetric at every alpha, so #{E <= 0} never changes even while a
  // vortex level and an edge level trade places through zero.
  const arma::vec ev0 = eigenvalues_only(family.build(alpha_grid.front()));
  ++out.evaluations;
  const double dist0 = arma::abs(ev0 - mu).min();
  if (dist0 < 1e-9) {
    throw std::runtime_error(
        "spectral_flow: mu sits on an eigenvalue at the first grid point");
  }
  const double mu_eff = mu + 0.25 * dist0;

  std::vector<FlowPoint> pts;
  pts.reserve(alpha_grid.size());
  pts.push_back({alpha_grid.front(),
                 static_cast<int>(arma::accu(ev0 <= mu_eff)),
                 arma::abs(ev0 - mu_eff).min()});
  for (std::size_t i = 1; i < alpha_grid.size(); ++i) {
    pts.push_back(flow_point(family, alpha_grid[i], mu_eff, &out.evaluations));
  }

  // Refine intervals: crossings are tightened for classification, multiple
  // crossings bisected until they separate or prove degenerate, and intervals
  // whose edge eigenvalues sit closer to the probe level than the local slope
  // resolves are bisected defensively (a crossing pair could hide inside).
  std::vector<std::pair<FlowPoint, FlowPoint>> work;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    work.push_back({pts[i], pts[i + 1]});
  }
  struct Bracket {
    double a0, a1;
    int dc;
    double nearest;
  };
  std::vector<Bracket> brackets;
  const double base_step = (alpha_grid.back() - alpha_grid.front()) /
                           static_cast<double>(alpha_grid.size() - 1);
  while (!work.empty()) {
    const auto [p0, p1] = work.back();
    work.pop_back();
    const int dc = p0.below - p1.below;  // net upward crossings
    const double step = p1.alpha - p0.alpha;
    const int depth_used = static_cast<int>(
        std::round(std::log2(std::max(base_step / step, 1.0))));
    bool split = false;
    if (dc != 0) {
      const double target =
          (std::abs(dc) > 1) ? kDegenerateWidth : kCrossingWidth;
      split = step > target && depth_used < max_depth;
    } else {
      const double slope =
          std::abs(p1.nearest - p0.nearest) / std::max(step, 1e-300) + 1e-12;
      split = std::min(p0.nearest, p1.nearest) < 2.0 * step * slope &&
              depth_used < 8;
    }
    if (split) {
      const FlowPoint mid = flow_point(family, 0.5 * (p0.alpha + p1.alpha),
                                       mu_eff, &out.evaluations);
      work.push_back({p0, mid});
      work.push_back({mid, p1});
      continue;
    }
    if (std::abs(dc) > 1 && step > kDegenerateWidth) {
      throw std::runtime_error(
          "spectral_flow: unresolved multiple crossing near alpha = " +
          std::to_string(0.5 * (p0.alpha + p1.alpha)));
    }
    if (dc != 0) brackets.push_back({p0.alpha, p1.alpha, dc, p1.nearest});
  }
  std::sort(brackets.begin(), brackets.end(),
            [](const Bracket& a, const Bracket& b) { return a.a0 < b.a0; });

  for (const Bracket& br : brackets) {
    // classify by the |dc| states just past the crossing on the departure
    // side of the probe level (above after an upward crossing, below after a
    // downward one); the bracket is tight, so they still carry the crossing
    // character
    const int k = std::abs(br.dc);
    const double delta =
        (window_delta > 0) ? window_delta : std::max(4 * br.nearest, 1e-6);
    SpectrumResult win = diagonalize_window(family.build(br.a1),
                                            mu_eff - delta, mu_eff + delta,
                                            true);
    ++out.evaluations;
    const auto departure_side = [&](const SpectrumResult& s) -> arma::uvec {
      if (br.dc > 0) return arma::find(s.eigenvalues > mu_eff);
      return arma::find(s.eigenvalues < mu_eff);
    };
    arma::uvec side = departure_side(win);
    if (static_cast<int>(side.n_elem) < k) {
      win = diagonalize(family.build(br.a1));
      ++out.evaluations;
      side = departure_side(win);
    }
    if (static_cast<int>(side.n_elem) < k) {
      throw std::runtime_error(
          "spectral_flow: cannot classify crossing near alpha = " +
          std::to_string(br.a1));
    }
    const arma::uvec order =
        arma::sort_index(arma::abs(win.eigenvalues(side) - mu_eff));
    out.raw += br.dc;
    if (k == 1) {
      const arma::uword idx = side(order(0));
      const double w = flux_mass(win.eigenvectors.col(idx), family, loc_radius);
      out.crossings.push_back(
          {0.5 * (br.a0 + br.a1), br.dc, w, win.eigenvalues(idx)});
      if (w > 0.5) out.localized += br.dc;
    } else {
      // degenerate crossings: localized share from the Gram matrix of the
      // ball-restricted crossing states (same device as kernel_index)
      arma::cx_mat block(win.eigenvectors.n_rows, k);
      for (int i = 0; i < k; ++i) {
        block.col(i) = win.eigenvectors.col(side(order(i)));
      }
      const arma::cx_mat inside = block.rows(union_ball(family, loc_radius));
      const arma::vec mass_ev =
          arma::eig_sym(arma::cx_mat(inside.t() * inside));
      const int nloc = static_cast<int>(arma::accu(mass_ev > 0.5));
      out.crossings.push_back({0.5 * (br.a0 + br.a1), br.dc,
                               static_cast<double>(nloc) / k,
                               win.eigenvalues(side(order(0)))});
      out.localized += (br.dc > 0 ? 1 : -1) * nloc;
    }
  }
  return out;
}

double spectral_flow_trace(const FluxFamily& family, const SwitchFunction& sw,
                           int points, double window_half) {
  if (points < 3 || points % 2 == 0) {
    throw std::invalid_argument(
        "spectral_flow_trace: need an odd point count >= 3");
  }
  const auto [cx, cy] = first_cell_center(family);
  if (window_half <= 0) {
    const LatticeSpace& sp = family.space;
    const double to_edge = std::min(std::min(cx - sp.x_min, sp.x_max - cx),
                                    std::min(cy - sp.y_min, sp.y_max - cy));
    window_half = std::min(8.0, to_edge - 2.0);
  }
  const arma::uvec box =
      arma::find((arma::abs(family.xs - cx) <= window_half) %
                 (arma::abs(family.ys - cy) <= window_half));

  const double h = 1e-4;
  auto integrand = [&](double alpha) {
    const arma::cx_mat dH =
        (family.build(alpha + h) - family.build(alpha - h)) / (2 * h);
    const SpectrumResult spec = diagonalize(family.build(alpha));
    const arma::cx_mat Gp = spectral_function(spec, sw.gp);
    double tr = 0.0;
    for (arma::uword ii = 0; ii < box.n_elem; ++ii) {
      const arma::uword i = box(ii);
      // cdot conjugates its first argument and Gp is Hermitian, so this
      // accumulates (Gp * dH)(i, i)
      tr += std::real(arma::cdot(Gp.col(i), dH.col(i)));
    }
    return tr;
  };

  // composite Simpson over alpha in [0, 1]
  const int n = points - 1;
  const double ha = 1.0 / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    acc += w * integrand(i * ha);
  }
  return -acc * ha / 3.0;
}

KernelReport kernel_index(const SpectrumResult& spec, double E0, double cap,
                          const arma::vec& xs, const arma::vec& ys, double cx,
                          double cy, double loc_radius) {
  KernelReport out;
  const arma::vec dist = arma::abs(spec.eigenvalues - E0);
  const arma::uvec order = arma::sort_index(dist);
  const arma::vec d = dist(order);
  // cluster boundary: largest multiplicative jump > 10, scanning candidates
  // with |E - E0| <= cap (the jump itself may step past the cap)
  int cluster = 0;
  double best_ratio = 0.0;
  for (arma::uword i = 0; i + 1 < d.n_elem; ++i) {
    if (d(i) > cap) break;
    const double ratio = d(i + 1) / std::max(d(i), 1e-300);
    if (ratio > best_ratio) {
      best_ratio = ratio;
      cluster = static_cast<int>(i) + 1;
    }
  }
  if (best_ratio <= 10.0) cluster = 0;
  out.dim_raw = cluster;
  if (cluster == 0) {
    out.first_outside = d.n_elem ? d(0) : 0.0;
    return out;
  }
  out.cluster_edge = d(cluster - 1);
  out.first_outside =
      (cluster < static_cast<int>(d.n_elem)) ? d(cluster) : 0.0;

  if (spec.eigenvectors.n_cols == 0) {
    throw std::invalid_argument("kernel_index: eigenvectors required");
  }
  // localized dimension: eigenvalues of the ball-mass Gram matrix above 1/2
  const arma::uvec ball = ball_indices(xs, ys, cx, cy, loc_radius);
  arma::cx_mat cluster_vecs(spec.eigenvectors.n_rows, cluster);
  for (int i = 0; i < cluster; ++i) {
    cluster_vecs.col(i) = spec.eigenvectors.col(order(i));
  }
  const arma::cx_mat inside = cluster_vecs.rows(ball);
  const arma::vec mass_ev = arma::eig_sym(arma::cx_mat(inside.t() * inside));
  out.dim_localized = static_cast<int>(arma::accu(mass_ev > 0.5));
  out.parity = out.dim_localized % 2;
  return out;
}

KernelReport kernel_index(const arma::cx_mat& H, double E0, double cap,
                          const FluxFamily& family, double loc_radius) {
  const auto [cx, cy] = first_cell_center(family);
  return kernel_index(diagonalize(H), E0, cap, family.xs, family.ys, cx, cy,
                      loc_radius);
}

Z2FlowResult z2_spectral_flow(const FluxFamily& family,
                              const std::vector<double>& alpha_grid, double mu,
                              double loc_radius, double pin_tol,
                              double reflect_tol) {
  Z2FlowResult out;
  // the family must satisfy the time-reversal reflection
  // sigma(H_alpha) = sigma(H_{1-alpha}); checked at one sample pair
  const double a_probe = 0.3;
  out.reflection_residual =
      spectrum_distance(eigenvalues_only(family.build(a_probe)),
                        eigenvalues_only(family.build(1.0 - a_probe)));
  if (out.reflection_residual > reflect_tol) {
    throw std::runtime_error(
        "z2_spectral_flow: family is not time-reversal symmetric (reflection "
        "residual " +
        std::to_string(out.reflection_residual) + ")");
  }
  if (std::abs(alpha_grid.front()) > 1e-12 ||
      std::abs(alpha_grid.back() - 0.5) > 1e-12) {
    throw std::invalid_argument("z2_spectral_flow: grid must span [0, 1/2]");
  }
  // The displaced probe level of spectral_flow moves the crossing of a
  // Kramers doublet forming at alpha = 1/2 strictly into the interior (or
  // reflects it outside, in which case its mirror partner lies inside), so
  // the parity is the interior localized count alone.
  const SpectralFlowResult flow =
      spectral_flow(family, alpha_grid, mu, -1.0, loc_radius);
  int interior = 0;
  for (const Crossing& c : flow.crossings) {
    interior += static_cast<int>(
        std::lround(c.weight * std::abs(c.direction)));
  }
  out.interior_crossings = interior;
  out.crossings = flow.crossings;
  out.parity = interior % 2;

  // diagnostic: the localized zero cluster at half flux must pair evenly
  const auto [cx, cy] = first_cell_center(family);
  const KernelReport k =
      kernel_index(diagonalize(family.build(0.5)), mu, pin_tol, family.xs,
                   family.ys, cx, cy, loc_radius);
  if (k.dim_localized % 2 != 0) {
    throw std::runtime_error(
        "z2_spectral_flow: odd localized cluster at half flux breaks Kramers "
        "pairing");
  }
  out.endpoint_doublets = k.dim_localized / 2;
  return out;
}

double spectrum_distance(const arma::vec& a, const arma::vec& b) {
  if (a.n_elem != b.n_elem) {
    throw std::invalid_argument("spectrum_distance: size mismatch");
  }
  return arma::abs(arma::sort(a) - arma::sort(b)).max();
}

}  // namespace fluxlab
