#include "fluxlab/models.h"

#include <cmath>
#include <random>
#include <set>

namespace fluxlab {

namespace {

constexpr double kPi = 3.14159265358979323846;
const std::complex<double> kI(0.0, 1.0);

// A shift-type operator has at most one nonzero entry per column; products of
// shifts keep that form, so hopping assembly never needs dense matmuls.
struct PhaseMap {
  std::vector<long long> target;  // -1: column annihilated by truncation
  arma::cx_vec phase;

  static PhaseMap identity(arma::uword n) {
    PhaseMap p;
    p.target.resize(n);
    for (arma::uword i = 0; i < n; ++i) p.target[i] = static_cast<long long>(i);
    p.phase = arma::cx_vec(n, arma::fill::ones);
    return p;
  }
};

// Site-space shift in direction j under potential A (mirrors
// magnetic_translation, column-compressed).
PhaseMap shift_map(const LatticeSpace& site_space, const MagneticPotential& A,
                   int direction) {
  const arma::uword n = site_space.dim();
  PhaseMap p;
  p.target.assign(n, -1);
  p.phase = arma::cx_vec(n, arma::fill::zeros);
  const bool wrap_x = site_space.boundary != Boundary::open;
  const bool wrap_y = site_space.boundary == Boundary::periodic_xy;
  for (int x = site_space.x_min; x <= site_space.x_max; ++x) {
    for (int y = site_space.y_min; y <= site_space.y_max; ++y) {
      int tx = (direction == 1) ? x - 1 : x;
      int ty = (direction == 2) ? y - 1 : y;
      if (direction == 1 && tx < site_space.x_min) {
        if (!wrap_x) continue;
        tx = site_space.x_max;
      }
      if (direction == 2 && ty < site_space.y_min) {
        if (!wrap_y) continue;
        ty = site_space.y_max;
      }
      const arma::uword col = site_space.flatten(x, y, 0);
      p.target[col] = static_cast<long long>(site_space.flatten(tx, ty, 0));
      p.phase(col) = std::exp(std::complex<double>(0.0, -A(tx, ty, direction)));
    }
  }
  return p;
}

PhaseMap adjoint(const PhaseMap& p) {
  const arma::uword n = p.target.size();
  PhaseMap a;
  a.target.assign(n, -1);
  a.phase = arma::cx_vec(n, arma::fill::zeros);
  for (arma::uword col = 0; col < n; ++col) {
    if (p.target[col] < 0) continue;
    const arma::uword row = static_cast<arma::uword>(p.target[col]);
    a.target[row] = static_cast<long long>(col);
    a.phase(row) = std::conj(p.phase(col));
  }
  return a;
}

// (A B)(col) = A applied to B's image.
PhaseMap compose(const PhaseMap& A, const PhaseMap& B) {
  const arma::uword n = B.target.size();
  PhaseMap c;
  c.target.assign(n, -1);
  c.phase = arma::cx_vec(n, arma::fill::zeros);
  for (arma::uword col = 0; col < n; ++col) {
    if (B.target[col] < 0) continue;
    const arma::uword mid = static_cast<arma::uword>(B.target[col]);
    if (A.target[mid] < 0) continue;
    c.target[col] = A.target[mid];
    c.phase(col) = A.phase(mid) * B.phase(col);
  }
  return c;
}

PhaseMap map_power(const PhaseMap& p, const PhaseMap& p_adj, int n) {
  PhaseMap acc = PhaseMap::identity(p.target.size());
  const PhaseMap& base = (n >= 0) ? p : p_adj;
  for (int k = 0; k < std::abs(n); ++k) acc = compose(base, acc);
  return acc;
}

MagneticPotential family_potential(double B, double alpha,
                                   const std::vector<Cell>& cells,
                                   FluxGauge flux_gauge, FieldGauge field_gauge) {
  MagneticPotential A = uniform_field_gauge(B, field_gauge);
  for (const Cell& m : cells) {
    A = A + (flux_gauge == FluxGauge::ab ? ab_gauge(alpha, m)
                                         : half_line_gauge(alpha, m));
  }
  return A;
}

arma::cx_mat assemble_from_maps(const LatticeSpace& space, const HoppingSpec& spec,
                                const PhaseMap& S1, const PhaseMap& S2,
                                double* defect_out) {
  const int L = spec.fiber();
  if (L != space.orbitals) {
    throw std::invalid_argument("hopping fiber dimension does not match the space");
  }
  const arma::uword d = space.dim();
  arma::cx_mat M(d, d, arma::fill::zeros);
  const PhaseMap S1a = adjoint(S1), S2a = adjoint(S2);
  for (const auto& [hop, t] : spec.t) {
    // Order the staircase path so the reverse hop retraces the forward one;
    // otherwise the two paths around a composed hop enclose the flux plaquette
    // and the assembly picks up a spurious Hermiticity defect |1 - e^{2 pi i a}|.
    const bool x_leads = hop.first > 0 || (hop.first == 0 && hop.second >= 0);
    const PhaseMap Px = map_power(S1, S1a, hop.first);
    const PhaseMap Py = map_power(S2, S2a, hop.second);
    const PhaseMap P = x_leads ? compose(Px, Py) : compose(Py, Px);
    for (arma::uword col = 0; col < P.target.size(); ++col) {
      if (P.target[col] < 0) continue;
      const arma::uword row = static_cast<arma::uword>(P.target[col]);
      M.submat(row * L, col * L, row * L + L - 1, col * L + L - 1) +=
          P.phase(col) * t;
    }
  }
  if (!spec.V.empty() && spec.lambda != 0.0) {
    if (spec.V.size() != space.n_sites()) {
      throw std::invalid_argument("potential must provide one fiber block per site");
    }
    for (arma::uword s = 0; s < space.n_sites(); ++s) {
      M.submat(s * L, s * L, s * L + L - 1, s * L + L - 1) +=
          spec.lambda * spec.V[s];
    }
  }
  const double defect = arma::abs(M - M.t()).max();
  if (defect_out) *defect_out = defect;
  if (defect > 1e-10) {
    throw std::invalid_argument(
        "hopping data violates Hermiticity: assembly defect " +
        std::to_string(defect));
  }
  return (M + M.t()) / 2.0;
}

arma::cx_mat eye2() { return arma::cx_mat(2, 2, arma::fill::eye); }

arma::cx_mat mat2(std::complex<double> a, std::complex<double> b,
                  std::complex<double> c, std::complex<double> d) {
  arma::cx_mat m(2, 2);
  m(0, 0) = a;
  m(0, 1) = b;
  m(1, 0) = c;
  m(1, 1) = d;
  return m;
}

std::map<std::pair<int, int>, arma::cx_mat> pip_fibers(double mu, double delta) {
  std::map<std::pair<int, int>, arma::cx_mat> t;
  t[{0, 0}] = mat2(-mu, 0, 0, mu);
  t[{1, 0}] = mat2(1, delta, -delta, -1);
  t[{-1, 0}] = mat2(1, -delta, delta, -1);
  t[{0, 1}] = mat2(1, kI * delta, kI * delta, -1);
  t[{0, -1}] = mat2(1, -kI * delta, -kI * delta, -1);
  return t;
}

// Chiral d+id pairing: the two d-wave components in quadrature keep the gap
// open (the equal-phase combination is nodal on the Fermi curve).
std::map<std::pair<int, int>, arma::cx_mat> did_fibers(double mu, double delta) {
  std::map<std::pair<int, int>, std::complex<double>> dmap = {
      {{1, 0}, kI * delta},   {{-1, 0}, kI * delta}, {{0, 1}, -kI * delta},
      {{0, -1}, -kI * delta}, {{1, 1}, -delta},      {{1, -1}, delta},
      {{-1, 1}, delta},       {{-1, -1}, -delta}};
  std::map<std::pair<int, int>, std::complex<double>> hmap = {
      {{0, 0}, -mu}, {{1, 0}, 1}, {{-1, 0}, 1}, {{0, 1}, 1}, {{0, -1}, 1}};
  std::map<std::pair<int, int>, arma::cx_mat> t;
  std::set<std::pair<int, int>> keys;
  for (const auto& kv : dmap) keys.insert(kv.first);
  for (const auto& kv : hmap) keys.insert(kv.first);
  for (const auto& n : keys) {
    const auto h = hmap.count(n) ? hmap[n] : 0.0;
    const auto dd = dmap.count(n) ? dmap[n] : 0.0;
    // eta = -1: hole-side off-diagonal is +conj(Delta)
    t[n] = mat2(h, dd, std::conj(dd), -std::conj(h));
  }
  return t;
}

// Majorana-form Wilson-Dirac fibers; lam is the internal sign convention
// (named_model passes -lambda_user so the advertised phase diagram holds).
std::map<std::pair<int, int>, arma::cx_mat> wd_fibers(double lam, double mu) {
  std::map<std::pair<int, int>, arma::cx_mat> t;
  t[{0, 0}] = mat2(0, kI * (mu + 4 * lam), -kI * (mu + 4 * lam), 0);
  t[{1, 0}] = mat2(0, kI * (1 + lam), kI * (1 - lam), 0);
  t[{-1, 0}] = mat2(0, kI * (-1 + lam), kI * (-1 - lam), 0);
  t[{0, 1}] = mat2(kI, kI * lam, -kI * lam, -kI);
  t[{0, -1}] = mat2(-kI, kI * lam, -kI * lam, kI);
  return t;
}

// Time-reversal doubling [[t, c], [c^dag of the reversed hop, conj(t)]] over a
// 2x2 block model, with nearest-neighbor purely imaginary coupling
// g = i gamma (S1 - S1* + S2 - S2*) (x) 1.
std::map<std::pair<int, int>, arma::cx_mat> doubled_fibers(
    const std::map<std::pair<int, int>, arma::cx_mat>& block, double gamma) {
  std::map<std::pair<int, int>, std::complex<double>> cmap = {
      {{1, 0}, kI * gamma},
      {{-1, 0}, -kI * gamma},
      {{0, 1}, kI * gamma},
      {{0, -1}, -kI * gamma}};
  std::set<std::pair<int, int>> keys;
  for (const auto& kv : block) keys.insert(kv.first);
  for (const auto& kv : cmap) keys.insert(kv.first);
  std::map<std::pair<int, int>, arma::cx_mat> t;
  for (const auto& n : keys) {
    arma::cx_mat w =
        block.count(n) ? block.at(n) : arma::cx_mat(2, 2, arma::fill::zeros);
    const std::pair<int, int> rn{-n.first, -n.second};
    const std::complex<double> cn = cmap.count(n) ? cmap.at(n) : 0.0;
    const std::complex<double> crn = cmap.count(rn) ? cmap.at(rn) : 0.0;
    arma::cx_mat T(4, 4, arma::fill::zeros);
    T.submat(0, 0, 1, 1) = w;
    T.submat(0, 2, 1, 3) = cn * eye2();
    T.submat(2, 0, 3, 1) = std::conj(crn) * eye2();
    T.submat(2, 2, 3, 3) = arma::conj(w);
    t[n] = T;
  }
  return t;
}

struct ModelRecipe {
  std::map<std::pair<int, int>, arma::cx_mat> t;
  arma::cx_mat disorder_fiber;  // per-site potential is v(n) * this
  double B = 0.0;
  int fiber = 1;
};

double jget(const nlohmann::json& p, const std::string& key, double dflt) {
  return p.contains(key) ? p.at(key).get<double>() : dflt;
}

ModelRecipe model_recipe(const std::string& name, const nlohmann::json& params) {
  static const std::set<std::string> common = {"disorder_w", "seed", "lambda_dis"};
  auto check_keys = [&](std::set<std::string> allowed) {
    allowed.insert(common.begin(), common.end());
    for (const auto& item : params.items()) {
      if (!allowed.count(item.key())) {
        throw std::invalid_argument("named_model(" + name +
                                    "): unknown parameter '" + item.key() + "'");
      }
    }
  };
  ModelRecipe r;
  if (name == "harper") {
    check_keys({"B", "mu"});
    const double mu = jget(params, "mu", 0.0);
    r.t[{0, 0}] = arma::cx_mat(1, 1, arma::fill::value(-mu));
    const arma::cx_mat one(1, 1, arma::fill::ones);
    r.t[{1, 0}] = one;
    r.t[{-1, 0}] = one;
    r.t[{0, 1}] = one;
    r.t[{0, -1}] = one;
    r.disorder_fiber = one;
    r.B = jget(params, "B", 2.0 * kPi / 3.0);
    r.fiber = 1;
  } else if (name == "p_ip") {
    check_keys({"mu", "delta"});
    r.t = pip_fibers(jget(params, "mu", 2.0), jget(params, "delta", 1.0));
    r.disorder_fiber = mat2(1, 0, 0, -1);
    r.fiber = 2;
  } else if (name == "d_id") {
    check_keys({"mu", "delta"});
    r.t = did_fibers(jget(params, "mu", 2.0), jget(params, "delta", 0.5));
    r.disorder_fiber = mat2(1, 0, 0, -1);
    r.fiber = 2;
  } else if (name == "wilson_dirac") {
    check_keys({"mu", "lambda"});
    r.t = wd_fibers(-jget(params, "lambda", 1.0), jget(params, "mu", 2.0));
    r.disorder_fiber = mat2(0, kI, -kI, 0);
    r.fiber = 2;
  } else if (name == "km_double") {
    check_keys({"mu", "lambda", "delta", "gamma", "block"});
    const std::string block =
        params.contains("block") ? params.at("block").get<std::string>()
                                 : std::string("wilson_dirac");
    std::map<std::pair<int, int>, arma::cx_mat> blk;
    arma::cx_mat dis;
    if (block == "wilson_dirac") {
      blk = wd_fibers(-jget(params, "lambda", 1.0), jget(params, "mu", 2.0));
      dis = mat2(0, kI, -kI, 0);
    } else if (block == "p_ip") {
      blk = pip_fibers(jget(params, "mu", 2.0), jget(params, "delta", 1.0));
      dis = mat2(1, 0, 0, -1);
    } else {
      throw std::invalid_argument("km_double: unknown block '" + block + "'");
    }
    r.t = doubled_fibers(blk, jget(params, "gamma", 0.0));
    arma::cx_mat D(4, 4, arma::fill::zeros);
    D.submat(0, 0, 1, 1) = dis;
    D.submat(2, 2, 3, 3) = arma::conj(dis);
    r.disorder_fiber = D;
    r.fiber = 4;
  } else {
    throw std::invalid_argument("named_model: unknown model '" + name + "'");
  }
  return r;
}

}  // namespace

int HoppingSpec::fiber() const {
  if (t.empty()) return V.empty() ? 1 : static_cast<int>(V.front().n_rows);
  return static_cast<int>(t.begin()->second.n_rows);
}

int HoppingSpec::range() const {
  int R = 0;
  for (const auto& kv : t) {
    R = std::max({R, std::abs(kv.first.first), std::abs(kv.first.second)});
  }
  return R;
}

arma::cx_mat assemble_hoppings(const LatticeSpace& space, const HoppingSpec& spec,
                               const arma::cx_mat& S1_site, const arma::cx_mat& S2_site,
                               double* defect_out) {
  // Convert the dense shifts back to column maps; inputs must be shift-type.
  auto to_map = [](const arma::cx_mat& S) {
    PhaseMap p;
    const arma::uword n = S.n_cols;
    p.target.assign(n, -1);
    p.phase = arma::cx_vec(n, arma::fill::zeros);
    for (arma::uword col = 0; col < n; ++col) {
      for (arma::uword row = 0; row < n; ++row) {
        if (std::abs(S(row, col)) == 0.0) continue;
        if (p.target[col] >= 0) {
          throw std::invalid_argument(
              "assemble_hoppings: operator is not shift-type");
        }
        p.target[col] = static_cast<long long>(row);
        p.phase(col) = S(row, col);
      }
    }
    return p;
  };
  return assemble_from_maps(space, spec, to_map(S1_site), to_map(S2_site),
                            defect_out);
}

arma::cx_mat build_hamiltonian(const LatticeSpace& space, const HoppingSpec& spec,
                               double B, double alpha, const std::vector<Cell>& cells,
                               FluxGauge flux_gauge, FieldGauge field_gauge,
                               double* defect_out) {
  const LatticeSpace sites = space.site_space();
  const MagneticPotential A =
      family_potential(B, alpha, cells, flux_gauge, field_gauge);
  return assemble_from_maps(space, spec, shift_map(sites, A, 1),
                            shift_map(sites, A, 2), defect_out);
}

arma::cx_mat build_bdg(const LatticeSpace& space, const arma::cx_mat& h,
                       const arma::cx_mat& delta, int eta_ph) {
  if (eta_ph != 1 && eta_ph != -1) {
    throw std::invalid_argument("build_bdg: eta_ph must be +1 or -1");
  }
  if (h.n_rows != space.dim() || delta.n_rows != space.dim()) {
    throw std::invalid_argument("build_bdg: operator dimension mismatch");
  }
  const double anti = arma::abs(delta.st() + double(eta_ph) * delta).max();
  if (anti > 1e-10) {
    throw std::invalid_argument(
        "build_bdg: pairing violates Delta^t = -eta Delta, defect " +
        std::to_string(anti));
  }
  const int L = space.orbitals;
  LatticeSpace doubled = space;
  doubled.orbitals = 2 * L;
  arma::cx_mat H(doubled.dim(), doubled.dim(), arma::fill::zeros);
  const arma::cx_mat h21 = -double(eta_ph) * arma::conj(delta);
  const arma::cx_mat h22 = -arma::conj(h);
  for (arma::uword s = 0; s < space.n_sites(); ++s) {
    for (arma::uword sp = 0; sp < space.n_sites(); ++sp) {
      for (int a = 0; a < L; ++a) {
        for (int b = 0; b < L; ++b) {
          const arma::uword r = s * L + a, c = sp * L + b;
          const arma::uword R = s * (2 * L), C = sp * (2 * L);
          H(R + a, C + b) = h(r, c);
          H(R + a, C + L + b) = delta(r, c);
          H(R + L + a, C + b) = h21(r, c);
          H(R + L + a, C + L + b) = h22(r, c);
        }
      }
    }
  }
  return H;
}

arma::cx_mat majorana_rotation(const LatticeSpace& space) {
  const int twoL = space.orbitals;
  if (twoL % 2 != 0) {
    throw std::invalid_argument("majorana_rotation: fiber dimension must be even");
  }
  const int L = twoL / 2;
  arma::cx_mat Cf(twoL, twoL, arma::fill::zeros);
  const double s = 1.0 / std::sqrt(2.0);
  for (int l = 0; l < L; ++l) {
    Cf(l, l) = s;
    Cf(l, L + l) = -kI * s;
    Cf(L + l, l) = s;
    Cf(L + l, L + l) = kI * s;
  }
  return arma::kron(arma::cx_mat(space.n_sites(), space.n_sites(), arma::fill::eye),
                    Cf);
}

arma::cx_mat majorana_transform(const LatticeSpace& space, const arma::cx_mat& H_bdg) {
  const arma::cx_mat C = majorana_rotation(space);
  const arma::cx_mat M = C.st() * H_bdg * arma::conj(C);
  const double realness = arma::abs(arma::real(M)).max();
  const double anti = arma::abs(M.st() + M).max();
  if (realness > 1e-12 || anti > 1e-12) {
    throw std::invalid_argument(
        "majorana_transform: input is not a particle-hole symmetric (eta = +1) "
        "BdG operator; realness " +
        std::to_string(realness) + ", antisymmetry defect " + std::to_string(anti));
  }
  return M;
}

arma::vec random_potential(const LatticeSpace& space, double w, std::uint64_t seed) {
  if (w < 0) throw std::invalid_argument("random_potential: negative strength");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(-w, w);
  arma::vec v(space.n_sites());
  for (arma::uword i = 0; i < space.n_sites(); ++i) v(i) = uni(rng);
  return v;
}

FluxFamily named_model(const std::string& name, const nlohmann::json& params,
                       const LatticeSpace& space, FluxGauge flux_gauge,
                       const std::vector<Cell>& cells) {
  const ModelRecipe recipe = model_recipe(name, params);
  LatticeSpace full = space;
  full.orbitals = recipe.fiber;

  auto spec = std::make_shared<HoppingSpec>();
  spec->t = recipe.t;
  const double w = jget(params, "disorder_w", 0.0);
  if (w > 0.0) {
    const auto seed = static_cast<std::uint64_t>(jget(params, "seed", 1000.0));
    const arma::vec v = random_potential(full, w, seed);
    spec->lambda = jget(params, "lambda_dis", 1.0);
    spec->V.reserve(full.n_sites());
    for (arma::uword s = 0; s < full.n_sites(); ++s) {
      spec->V.push_back(v(s) * recipe.disorder_fiber);
    }
  }

  FluxFamily fam;
  fam.space = full;
  fam.cells = cells;
  fam.flux_gauge = flux_gauge;
  fam.field_gauge =
      (flux_gauge == FluxGauge::ab) ? FieldGauge::symmetric : FieldGauge::landau;
  fam.B = recipe.B;
  fam.hoppings = spec;
  nlohmann::json desc = params;
  desc["model"] = name;
  fam.descriptor = desc.dump();
  if (name != "harper") fam.bulk_gap = named_model_bulk_gap(name, params);
  const PositionOperators X = position_operators(full);
  fam.xs = X.x1;
  fam.ys = X.x2;
  const FluxGauge fg = fam.flux_gauge;
  const FieldGauge fieldg = fam.field_gauge;
  const double B = fam.B;
  const std::vector<Cell> cs = cells;
  fam.build = [full, spec, B, cs, fg, fieldg](double alpha) {
    return build_hamiltonian(full, *spec, B, alpha, cs, fg, fieldg);
  };
  return fam;
}

HoppingSpec named_model_hoppings(const std::string& name,
                                 const nlohmann::json& params) {
  HoppingSpec s;
  s.t = model_recipe(name, params).t;
  return s;
}

double named_model_bulk_gap(const std::string& name, const nlohmann::json& params,
                            int k_grid) {
  const ModelRecipe recipe = model_recipe(name, params);
  double gap = arma::datum::inf;
  arma::cx_mat symbol(recipe.fiber, recipe.fiber);
  for (int i = 0; i < k_grid; ++i) {
    const double k1 = 2.0 * kPi * i / k_grid;
    for (int j = 0; j < k_grid; ++j) {
      const double k2 = 2.0 * kPi * j / k_grid;
      symbol.zeros();
      for (const auto& [hop, t] : recipe.t) {
        symbol += t * std::exp(kI * (hop.first * k1 + hop.second * k2));
      }
      const arma::vec ev = arma::eig_sym(symbol);
      gap = std::min(gap, arma::abs(ev).min());
    }
  }
  return gap;
}

FluxFamily multi_flux_family(const FluxFamily& base, const std::vector<Cell>& cells) {
  const LatticeSpace& sp = base.space;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const auto [m1, m2] = cells[i];
    const int edge = std::min(std::min(m1 - sp.x_min, sp.x_max - (m1 + 1)),
                              std::min(m2 - sp.y_min, sp.y_max - (m2 + 1)));
    if (edge < 8) {
      throw std::invalid_argument(
          "multi_flux_family: flux cell closer than 8 to the boundary");
    }
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      const int d = std::max(std::abs(cells[j].first - m1),
                             std::abs(cells[j].second - m2));
      if (d < 8) {
        throw std::invalid_argument(
            "multi_flux_family: flux cells closer than 8 apart");
      }
    }
  }
  if (!base.hoppings) {
    throw std::invalid_argument("multi_flux_family: family lacks hopping data");
  }
  FluxFamily fam = base;
  fam.cells = cells;
  const LatticeSpace full = fam.space;
  const auto spec = fam.hoppings;
  const double B = fam.B;
  const FluxGauge fg = fam.flux_gauge;
  const FieldGauge fieldg = fam.field_gauge;
  fam.build = [full, spec, B, cells, fg, fieldg](double alpha) {
    return build_hamiltonian(full, *spec, B, alpha, cells, fg, fieldg);
  };
  return fam;
}

FluxFamily cutout(const FluxFamily& family, const Region& lambda) {
  if (!family.keep.empty()) {
    throw std::invalid_argument("cutout: family is already restricted");
  }
  const LatticeSpace& sp = family.space;
  std::set<arma::uword> removed_sites;
  for (arma::uword idx : lambda.flat_indices) {
    removed_sites.insert(idx / static_cast<arma::uword>(sp.orbitals));
  }
  for (const Cell& m : family.cells) {
    for (int dx = 0; dx <= 1; ++dx) {
      for (int dy = 0; dy <= 1; ++dy) {
        if (!sp.contains(m.first + dx, m.second + dy)) continue;
        if (removed_sites.count(sp.site_index(m.first + dx, m.second + dy))) {
          throw std::invalid_argument("cutout: region touches a flux plaquette");
        }
      }
    }
  }
  std::vector<arma::uword> keep;
  keep.reserve(sp.dim() - lambda.flat_indices.size());
  std::size_t li = 0;
  for (arma::uword i = 0; i < sp.dim(); ++i) {
    if (li < lambda.flat_indices.size() && lambda.flat_indices[li] == i) {
      ++li;
      continue;
    }
    keep.push_back(i);
  }
  FluxFamily fam = family;
  fam.keep = keep;
  const arma::uvec keep_v(keep);
  const auto inner = family.build;
  fam.build = [inner, keep_v](double alpha) {
    const arma::cx_mat H = inner(alpha);
    return arma::cx_mat(H.submat(keep_v, keep_v));
  };
  fam.xs = family.xs(keep_v);
  fam.ys = family.ys(keep_v);
  return fam;
}

}  // namespace fluxlab
