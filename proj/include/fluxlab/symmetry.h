#pragma once

#include "fluxlab/topology.h"

namespace fluxlab {

enum class CAZClass { A, AI, AII, AIII, BDI, CII, D, DIII, C, CI };
std::string to_string(CAZClass c);

// Unitary parts of the candidate symmetry operations on a fiber-structured
// space. Time reversal and particle-hole act antiunitarily: TRS is
// I* conj(H) I = H, PHS is K* conj(H) K = -H; the chiral/sublattice operation
// is unitary: K_sl* H K_sl = -H.
struct SymmetryOps {
  arma::cx_mat I_tr;   // empty when the fiber carries no TRS candidate
  arma::cx_mat K_ph;
  arma::cx_mat K_sl;
  int tr_square = 0;   // I conj(I) = tr_square * identity (+1/-1)
  int ph_square = 0;
};

// Standard fiber operators for a model layout:
//   kind "none":     no candidates
//   kind "spinless": I_tr = identity (plain conjugation, square +1)
//   kind "majorana": K_ph = identity (purely imaginary operators, square +1)
//   kind "bdg":      fiber 2L, K_ph = [[0, eta], [1, 0]] blocks
//   kind "doubled":  fiber 2L, I_tr = [[0, -1], [1, 0]] blocks (spin-1/2 form)
//                    plus the identity K_ph candidate
//   kind "bdg_doubled": doubled BdG (e.g. km over p_ip)
// All returned unitaries are real 0/+-1 matrices (exact).
SymmetryOps standard_symmetry_ops(const LatticeSpace& space, const std::string& kind,
                                  int eta_ph = +1);

struct SymmetryDetection {
  bool has_trs = false;
  bool has_phs = false;
  bool has_sls = false;
  int trs_sign = 0;  // square of the antiunitary
  int phs_sign = 0;
  double trs_residual = 1.0;
  double phs_residual = 1.0;
  double sls_residual = 1.0;
  CAZClass caz = CAZClass::A;
};
// When both antiunitaries are detected, the composite K_sl = I_tr K_ph must
// give a sublattice symmetry too; a failure there throws (inconsistent
// signature).
SymmetryDetection detect_symmetries(const arma::cx_mat& H, const SymmetryOps& ops,
                                    double tol = 1e-6);

// Tenfold dispatch from the (TRS^2, PHS^2, SLS) signature.
CAZClass caz_class(bool trs, int trs_sign, bool phs, int phs_sign, bool sls);

// Eigenvalue pairing under an odd antiunitary: every eigenvalue must be (at
// least) doubly degenerate with the Kramers partner I_tr conj(psi) lying in
// the same eigenspace.
struct KramersReport {
  double max_pair_gap = 0.0;        // relative degeneracy defect
  double max_subspace_angle = 0.0;  // partner leakage out of the eigenspace
  double witness = 0.0;             // eigenvalue at the worst defect
  bool ok = false;
};
KramersReport kramers_check(const SpectrumResult& spec, const arma::cx_mat& I_tr,
                            double pair_tol = 1e-8, double angle_tol = 1e-6);

// Class-dispatched strong invariant of a gapped family at Fermi level mu.
//   A, D : Z      (index_pfp)
//   C    : 2Z     (index_pfp, evenness checked)
//   AII, DIII : Z2 (ind2_pfp)
//   others     : 0 (vanishing / none)
struct InvariantReport {
  CAZClass caz = CAZClass::A;
  std::string kind;  // "Z", "2Z", "Z2", "0"
  int value = 0;
  bool valid = false;
  IndexReport index;   // filled for Z / 2Z
  Ind2Report index2;   // filled for Z2
};
InvariantReport strong_invariant(const FluxFamily& family, const SymmetryOps& ops,
                                 double mu, double rho = -1.0);

// Kernel structure at half flux, dispatched by symmetry class: class D expects
// an odd localized kernel, class C an even one, DIII a Kramers doublet whose
// splitting is far below the gap.
struct ZeroModeReport {
  CAZClass caz = CAZClass::A;
  KernelReport kernel;
  double smallest_abs_eigenvalue = 0.0;
  double doublet_splitting = 0.0;  // DIII only
  bool protected_expected = false;
  bool consistent = false;
};
ZeroModeReport half_flux_zero_modes(const FluxFamily& family, const SymmetryOps& ops,
                                    double cap, double loc_radius);

}  // namespace fluxlab
