#pragma once

#include <string>
#include <vector>

#include "scatter/linalg.hpp"
#include "scatter/operators.hpp"
#include "scatter/propagate.hpp"

namespace scatter {

// Dense eigenbasis of a Hermitian operator, the desk-scale realization of
// functions f(L) (spectral filters, projectors, bound-state extraction).
struct EigenBasis {
  Grid1D grid;
  int modes = 1;
  Eigen::VectorXd values;    // ascending
  Eigen::MatrixXcd vectors;  // columns, orthonormal in the flat metric

  WaveField apply_function(const WaveField& u,
                           const std::function<double(double)>& f) const;
  WaveField eigenvector(int idx) const;
};

EigenBasis eigenbasis(const DiscreteOperator& L);

// --------------------------------------------------------------------------

struct ScanHit {
  double lambda = 0.0;
  double loc_radius = 0.0;  // <r>-expectation of the eigenvector
};

// All matrix eigenvalues inside [lo, hi] (which may reach below zero when
// hunting bound states), labeled with localization radii; genuinely bound
// states stay localized under grid refinement, continuum artifacts do not.
std::vector<ScanHit> embedded_eigen_scan(const DiscreteOperator& L, double lo,
                                         double hi);
inline std::vector<ScanHit> embedded_eigen_scan(const DiscreteOperator& L,
                                                const SpectralWindow& w) {
  return embedded_eigen_scan(L, w.lo, w.hi);
}

// --------------------------------------------------------------------------

struct MourreReport {
  double alpha_hat = 0.0;  // best commutator lower bound outside the budget
  int violated_dim = 0;    // directions more than 10% below alpha_hat
  int subspace_dim = 0;    // dim ran f(L)
  std::vector<double> betas;  // form eigenvalues on ran f(L), ascending
};

// Filtered commutator check: with f a smooth bump on
// [center - epsilon, center + epsilon], diagonalize the compression of
// i[L, A] onto ran f(L) and report the largest alpha such that all but at
// most compact_dim_budget directions lie above it.
MourreReport mourre_form_check(const DiscreteOperator& L,
                               const DiscreteOperator& A,
                               const SpectralWindow& window, double epsilon,
                               int compact_dim_budget);

// --------------------------------------------------------------------------

struct LapReport {
  double bound_hat = 0.0;
  std::vector<std::pair<double, double>> curve;  // (eta, norm estimate)
  bool plateau = false;  // last two etas within 10%
};

// sup_eta || <r>^{-s} (L - lambda - i eta)^{-1} <r>^{-s} || by power
// iteration on sparse solves, swept over eta_list (descending).  Throws
// ResolutionFloor when the smallest eta dips under 3x the local level
// spacing estimate 2 pi sqrt(lambda) / (r_max * n_modes).
LapReport lap_resolvent_sup(const DiscreteOperator& L, double lambda, double s,
                            std::vector<double> eta_list, int probes = 60);

// --------------------------------------------------------------------------

// Weights of the smooth-perturbation machinery:
//   G0 = <r>^{-s},  G1 = chi_R <r>^{-s} D_r,  G2 = chi_R <r>^{-1/2} (kP)^{1/2}
DiscreteOperator make_weight_G0(const Grid1D& g, int modes, double s);
DiscreteOperator make_weight_G1(const Grid1D& g, int modes, double s,
                                const CutoffSpec& cutoff);
DiscreteOperator make_weight_G2(const Grid1D& g, const CrossSection& cs,
                                const CutoffSpec& cutoff,
                                const ScalingFunction& k);

struct SmoothnessReport {
  std::string g_kind;
  std::vector<std::pair<double, double>> integral_curve;  // (t, integral)
  double plateau_ratio = 1.0;  // relative increment over the last doubling
  double bound_hat = 0.0;      // final integral / ||u||^2
  bool pass = false;           // plateau_ratio < 1%
};

// Accumulates int_0^T ||G e^{-itL} u||^2 dt by the trapezoid rule along a
// Crank-Nicolson trajectory, with doubling checkpoints.
SmoothnessReport kato_smoothness_integral(const SparseHamiltonian& L,
                                          const DiscreteOperator& G,
                                          const std::string& g_kind,
                                          const WaveField& u, double T_max,
                                          double sample_dt);

// --------------------------------------------------------------------------

struct RadiationReport {
  double C_found = 0.0;
  double worst_margin = 0.0;  // relative; <= 0 certifies the inequality
  std::vector<std::pair<double, double>> search;  // (C, margin)
};

// Finds the smallest C <= C_max with
//   (c0 - eps) G2*G2 <= i[L, M] + C (G0*G0 + G1*G1)
// as a matrix inequality, probing with Lanczos extreme eigenvectors plus
// random vectors.  The last wall_buffer nodes are excluded from the probe
// space: the artificial far wall truncates [L, iM] and injects O(1/h^2)
// boundary junk that is no part of the modeled end.  Throws NoFiniteC when
// the search exhausts C_max.
RadiationReport radiation_inequality_check(
    const DiscreteOperator& L, const DiscreteOperator& M_op,
    const DiscreteOperator& G0, const DiscreteOperator& G1,
    const DiscreteOperator& G2, double c0, double epsilon, int probes = 8,
    double C_max = 1e3, double tol_rel = 1e-8, int wall_buffer = 8);

}  // namespace scatter
