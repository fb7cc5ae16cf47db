#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>

#include "scatter/grid.hpp"
#include "scatter/model.hpp"

namespace scatter {

// Sparse Hermitian operator over grid (x) modes.  Flat index of grid node i,
// mode column c is i*modes + c.
struct DiscreteOperator {
  Grid1D grid;
  int modes = 1;
  Eigen::SparseMatrix<cplx> mat;
  bool hermitian = true;

  int dim() const { return grid.n * modes; }

  WaveField apply(const WaveField& u) const;
  Eigen::VectorXcd apply_vec(const Eigen::VectorXcd& x) const { return mat * x; }

  Eigen::MatrixXcd dense() const { return Eigen::MatrixXcd(mat); }
  // max_ij |a_ij - conj(a_ji)|
  double hermiticity_defect() const;
  // max_i sum_j |a_ij|; cheap upper bound for the spectral radius
  double gershgorin_bound() const;
};

Eigen::VectorXcd flatten(const WaveField& u);
WaveField unflatten(const Grid1D& g, int modes, const Eigen::VectorXcd& x);

// L0 = D_r^2 + k(r) P on the half line; 3-point stencil plus the diagonal
// k(r_i) m^2 per mode.  Throws GridTooCoarse when h^2 k_max M^2 > 0.1.
DiscreteOperator assemble_L0(const Grid1D& grid, const ScalingFunction& k,
                             const CrossSection& cs);

// Perturbation E assembled term by term in symmetrized form; theta-dependent
// coefficients couple modes through their Fourier data.
DiscreteOperator assemble_E(const Grid1D& grid, const PerturbationCoeffs& coeffs,
                            const CrossSection& cs, const ScalingFunction& k);

// Dilation generator A = (chi_R^2 r D_r + D_r r chi_R^2)/2.
DiscreteOperator assemble_A(const Grid1D& grid, const CutoffSpec& cutoff,
                            int modes = 1);

// Radiation conjugate M = (chi_R D_r + D_r chi_R)/2.
DiscreteOperator assemble_M(const Grid1D& grid, const CutoffSpec& cutoff,
                            int modes = 1);

// Plain D_r = -i d/dr with centered differences.
DiscreteOperator assemble_Dr(const Grid1D& grid, int modes = 1);

// i(LA - AL) as a sparse product difference.
DiscreteOperator commutator_iLA(const DiscreteOperator& L,
                                const DiscreteOperator& A);

enum class ReferenceKind { H0, Hk, HL };

// Reference operators on the full line M_f = R x N:
//   H0 = D_r^2,  Hk = D_r^2 + k(|r|) P,  HL = D_r(1 + a1L(|r|))D_r + k(|r|) P.
// HL uses midpoint fluxes so a1L = 0 reproduces the Hk stencil exactly.
// Throws GridTooSmall when the k (or a1L) tail at the periodic fold
// exceeds 1e-10.
DiscreteOperator assemble_reference(const Grid1D& grid_full,
                                    const ScalingFunction& k,
                                    const CrossSection& cs, ReferenceKind kind,
                                    const RadialProfile& a1L = {});

// Dense twins of the assembly routines.  They run the identical entry
// emission into dense storage, so they must agree with the sparse path
// bit for bit; used as the bookkeeping oracle at small n.
Eigen::MatrixXcd assemble_L0_dense(const Grid1D&, const ScalingFunction&,
                                   const CrossSection&);
Eigen::MatrixXcd assemble_E_dense(const Grid1D&, const PerturbationCoeffs&,
                                  const CrossSection&, const ScalingFunction&);
Eigen::MatrixXcd assemble_A_dense(const Grid1D&, const CutoffSpec&, int modes = 1);
Eigen::MatrixXcd assemble_M_dense(const Grid1D&, const CutoffSpec&, int modes = 1);
Eigen::MatrixXcd assemble_reference_dense(const Grid1D&, const ScalingFunction&,
                                          const CrossSection&, ReferenceKind,
                                          const RadialProfile& a1L = {});

}  // namespace scatter
