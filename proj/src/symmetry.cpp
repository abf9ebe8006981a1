#include "fluxlab/symmetry.h"

#include <cmath>
#include <stdexcept>

namespace fluxlab {

namespace {

arma::cx_mat site_kron(const LatticeSpace& space, const arma::cx_mat& fiber) {
  const int ns = space.n_sites();
  const int L = space.orbitals;
  if (static_cast<int>(fiber.n_rows) != L) {
    throw std::invalid_argument("site_kron: fiber size mismatch");
  }
  arma::cx_mat out(space.dim(), space.dim(), arma::fill::zeros);
  for (int s = 0; s < ns; ++s) {
    out.submat(s * L, s * L, s * L + L - 1, s * L + L - 1) = fiber;
  }
  return out;
}

arma::cx_mat bdg_ph_fiber(int L, int eta) {
  const int half = L / 2;
  arma::cx_mat K(L, L, arma::fill::zeros);
  K.submat(0, half, half - 1, L - 1) =
      double(eta) * arma::eye<arma::cx_mat>(half, half);
  K.submat(half, 0, L - 1, half - 1) = arma::eye<arma::cx_mat>(half, half);
  return K;
}

arma::cx_mat doubling_tr_fiber(int L) {
  const int half = L / 2;
  arma::cx_mat I(L, L, arma::fill::zeros);
  I.submat(0, half, half - 1, L - 1) = -arma::eye<arma::cx_mat>(half, half);
  I.submat(half, 0, L - 1, half - 1) = arma::eye<arma::cx_mat>(half, half);
  return I;
}

}  // namespace

std::string to_string(CAZClass c) {
  switch (c) {
    case CAZClass::A: return "A";
    case CAZClass::AI: return "AI";
    case CAZClass::AII: return "AII";
    case CAZClass::AIII: return "AIII";
    case CAZClass::BDI: return "BDI";
    case CAZClass::CII: return "CII";
    case CAZClass::D: return "D";
    case CAZClass::DIII: return "DIII";
    case CAZClass::C: return "C";
    case CAZClass::CI: return "CI";
  }
  return "?";
}

SymmetryOps standard_symmetry_ops(const LatticeSpace& space,
                                  const std::string& kind, int eta_ph) {
  const int L = space.orbitals;
  SymmetryOps ops;
  if (kind == "none") {
    return ops;
  }
  if (kind == "spinless") {
    ops.I_tr = arma::eye<arma::cx_mat>(space.dim(), space.dim());
    ops.tr_square = +1;
    return ops;
  }
  if (kind == "majorana") {
    ops.K_ph = arma::eye<arma::cx_mat>(space.dim(), space.dim());
    ops.ph_square = +1;
    return ops;
  }
  if (L % 2 != 0) {
    throw std::invalid_argument("standard_symmetry_ops: fiber must be even");
  }
  if (kind == "bdg") {
    ops.K_ph = site_kron(space, bdg_ph_fiber(L, eta_ph));
    ops.ph_square = eta_ph;
    arma::cx_mat sl(L, L, arma::fill::zeros);
    sl.submat(0, 0, L / 2 - 1, L / 2 - 1) =
        arma::eye<arma::cx_mat>(L / 2, L / 2);
    sl.submat(L / 2, L / 2, L - 1, L - 1) =
        -arma::eye<arma::cx_mat>(L / 2, L / 2);
    ops.K_sl = site_kron(space, sl);
  } else if (kind == "doubled") {
    ops.I_tr = site_kron(space, doubling_tr_fiber(L));
    ops.tr_square = -1;
    // purely imaginary hopping data makes plain conjugation a particle-hole
    // operation; offer the identity as that candidate
    ops.K_ph = arma::eye<arma::cx_mat>(space.dim(), space.dim());
    ops.ph_square = +1;
    ops.K_sl = ops.I_tr;
  } else if (kind == "bdg_doubled") {
    if (L % 4 != 0) {
      throw std::invalid_argument(
          "standard_symmetry_ops: doubled BdG fiber must be a multiple of 4");
    }
    const int Lb = L / 2;
    ops.I_tr = site_kron(space, doubling_tr_fiber(L));
    ops.tr_square = -1;
    const arma::cx_mat Kb = bdg_ph_fiber(Lb, eta_ph);
    arma::cx_mat Kf(L, L, arma::fill::zeros);
    Kf.submat(0, 0, Lb - 1, Lb - 1) = Kb;
    Kf.submat(Lb, Lb, L - 1, L - 1) = Kb;
    ops.K_ph = site_kron(space, Kf);
    ops.ph_square = eta_ph;
    arma::cx_mat Sf(L, L, arma::fill::zeros);
    Sf.submat(0, Lb, Lb - 1, L - 1) = -Kb;
    Sf.submat(Lb, 0, L - 1, Lb - 1) = Kb;
    ops.K_sl = site_kron(space, Sf);
  } else {
    throw std::invalid_argument("standard_symmetry_ops: unknown kind " + kind);
  }
  return ops;
}

SymmetryDetection detect_symmetries(const arma::cx_mat& H,
                                    const SymmetryOps& ops, double tol) {
  SymmetryDetection out;
  if (ops.I_tr.n_rows == H.n_rows) {
    out.trs_residual =
        arma::abs(ops.I_tr * arma::conj(H) * ops.I_tr.t() - H).max();
    out.has_trs = out.trs_residual < tol;
    if (out.has_trs) out.trs_sign = ops.tr_square;
  }
  if (ops.K_ph.n_rows == H.n_rows) {
    out.phs_residual =
        arma::abs(ops.K_ph * arma::conj(H) * ops.K_ph.t() + H).max();
    out.has_phs = out.phs_residual < tol;
    if (out.has_phs) out.phs_sign = ops.ph_square;
  }
  if (ops.K_sl.n_rows == H.n_rows) {
    out.sls_residual = arma::abs(ops.K_sl * H * ops.K_sl.t() + H).max();
    out.has_sls = out.sls_residual < tol;
  }
  if (out.has_trs && out.has_phs) {
    // composite sublattice operation I_tr K_ph must then flip the sign too
    const arma::cx_mat S = ops.I_tr * arma::conj(ops.K_ph);
    const double derived = arma::abs(S * H * S.t() + H).max();
    if (derived >= tol) {
      throw std::runtime_error(
          "detect_symmetries: TRS and PHS hold but the composite sublattice "
          "symmetry fails (residual " +
          std::to_string(derived) + ")");
    }
    out.has_sls = true;
    out.sls_residual = std::min(out.sls_residual, derived);
  }
  out.caz = caz_class(out.has_trs, out.trs_sign, out.has_phs, out.phs_sign,
                      out.has_sls);
  return out;
}

CAZClass caz_class(bool trs, int trs_sign, bool phs, int phs_sign, bool sls) {
  if (trs && phs) {
    if (trs_sign > 0 && phs_sign > 0) return CAZClass::BDI;
    if (trs_sign < 0 && phs_sign < 0) return CAZClass::CII;
    if (trs_sign > 0 && phs_sign < 0) return CAZClass::CI;
    return CAZClass::DIII;
  }
  if (trs) return trs_sign > 0 ? CAZClass::AI : CAZClass::AII;
  if (phs) return phs_sign > 0 ? CAZClass::D : CAZClass::C;
  if (sls) return CAZClass::AIII;
  return CAZClass::A;
}

KramersReport kramers_check(const SpectrumResult& spec,
                            const arma::cx_mat& I_tr, double pair_tol,
                            double angle_tol) {
  KramersReport out;
  const arma::uword n = spec.eigenvalues.n_elem;
  if (n % 2 != 0 || spec.eigenvectors.n_cols != n) {
    out.ok = false;
    return out;
  }
  // degenerate clusters (consecutive relative gap below 1e-6)
  std::vector<std::pair<arma::uword, arma::uword>> clusters;
  arma::uword start = 0;
  for (arma::uword i = 1; i <= n; ++i) {
    const bool brk =
        i == n ||
        (spec.eigenvalues(i) - spec.eigenvalues(i - 1)) >
            1e-6 * std::max(1.0, std::abs(spec.eigenvalues(i)));
    if (brk) {
      clusters.push_back({start, i - 1});
      start = i;
    }
  }
  const arma::cx_mat partners = I_tr * arma::conj(spec.eigenvectors);
  for (const auto& [lo, hi] : clusters) {
    const arma::uword size = hi - lo + 1;
    if (size % 2 != 0) {
      out.ok = false;
      out.max_pair_gap = 1.0;
      out.witness = spec.eigenvalues(lo);
      return out;
    }
    for (arma::uword i = lo; i + 1 <= hi; i += 2) {
      const double a = spec.eigenvalues(i), b = spec.eigenvalues(i + 1);
      const double rel =
          std::abs(b - a) / std::max(1.0, 0.5 * (std::abs(a) + std::abs(b)));
      if (rel > out.max_pair_gap) {
        out.max_pair_gap = rel;
        out.witness = a;
      }
    }
    const arma::cx_mat basis = spec.eigenvectors.cols(lo, hi);
    for (arma::uword i = lo; i <= hi; ++i) {
      const arma::cx_vec phi = partners.col(i);
      const double inside = arma::norm(basis.t() * phi);
      const double leak = std::sqrt(std::max(0.0, 1.0 - inside * inside));
      if (leak > out.max_subspace_angle) {
        out.max_subspace_angle = leak;
        out.witness = spec.eigenvalues(i);
      }
    }
  }
  out.ok = out.max_pair_gap < pair_tol && out.max_subspace_angle < angle_tol;
  return out;
}

InvariantReport strong_invariant(const FluxFamily& family,
                                 const SymmetryOps& ops, double mu,
                                 double rho) {
  InvariantReport out;
  const arma::cx_mat H = family.build(0.0);
  out.caz = detect_symmetries(H, ops).caz;
  const Cell m = family.cells.front();
  switch (out.caz) {
    case CAZClass::A:
    case CAZClass::D:
    case CAZClass::C: {
      const FermiProjection proj = fermi_projection(diagonalize(H), mu);
      out.index = index_pfp(proj.occupied, family.space, m, rho);
      out.value = out.index.index;
      out.kind = (out.caz == CAZClass::C) ? "2Z" : "Z";
      out.valid = out.index.excluded == 0;
      if (out.caz == CAZClass::C && out.value % 2 != 0) out.valid = false;
      break;
    }
    case CAZClass::AII:
    case CAZClass::DIII: {
      const FermiProjection proj = fermi_projection(diagonalize(H), mu);
      out.index2 = ind2_pfp(proj.occupied, ops.I_tr, family.space, m, rho);
      out.value = out.index2.parity;
      out.kind = "Z2";
      out.valid = true;
      break;
    }
    case CAZClass::AI:
    case CAZClass::BDI:
    case CAZClass::CI: {
      // even time reversal forces a vanishing index; verify it
      const FermiProjection proj = fermi_projection(diagonalize(H), mu);
      out.index = index_pfp(proj.occupied, family.space, m, rho);
      out.value = 0;
      out.kind = "0";
      out.valid = out.index.index == 0;
      break;
    }
    default:
      out.kind = "0";
      out.value = 0;
      out.valid = true;
      break;
  }
  return out;
}

ZeroModeReport half_flux_zero_modes(const FluxFamily& family,
                                    const SymmetryOps& ops, double cap,
                                    double loc_radius) {
  ZeroModeReport out;
  out.caz = detect_symmetries(family.build(0.0), ops).caz;
  const SpectrumResult spec = diagonalize(family.build(0.5));
  const Cell m = family.cells.front();
  out.kernel = kernel_index(spec, 0.0, cap, family.xs, family.ys, m.first + 0.5,
                            m.second + 0.5, loc_radius);
  out.smallest_abs_eigenvalue = arma::abs(spec.eigenvalues).min();
  out.doublet_splitting = (out.kernel.dim_raw > 0)
                              ? out.kernel.cluster_edge
                              : out.smallest_abs_eigenvalue;
  switch (out.caz) {
    case CAZClass::D:
      out.protected_expected = out.kernel.parity == 1;
      out.consistent = true;
      break;
    case CAZClass::C:
      out.protected_expected = false;
      out.consistent = out.kernel.dim_localized % 2 == 0;
      break;
    case CAZClass::DIII:
      out.protected_expected =
          out.kernel.dim_localized > 0 && out.kernel.dim_localized % 2 == 0;
      out.consistent = out.kernel.dim_localized % 2 == 0;
      break;
    default:
      out.protected_expected = false;
      out.consistent = true;
      break;
  }
  return out;
}

}  // namespace fluxlab
