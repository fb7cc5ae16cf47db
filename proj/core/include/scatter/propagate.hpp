#pragma once

#include <memory>

#include "scatter/fourier.hpp"
#include "scatter/operators.hpp"

namespace scatter {

// Fraction of |u|^2 within `cells` nodes of the artificial boundary
// (far wall on the half line, both fold edges on the full line).
double boundary_mass_fraction(const WaveField& u, int cells = 5);

struct EvolveOptions {
  double boundary_tol = 1e-8;
  int guard_cells = 5;
  bool check_boundary = true;
};

// Stability/accuracy guard: largest dt with dt * gershgorin(H) <= 0.5,
// capped at the dispersion scale 0.5 h^2.
double default_dt(const DiscreteOperator& H);

// e^{-itH} u by Crank-Nicolson steps (I + i dt H/2) u' = (I - i dt H/2) u
// via sparse LU; exactly norm- and energy-conserving up to solver precision.
// Negative t runs the adjoint evolution.  Throws NonAdmissible when
// dt * gershgorin(H) > 0.5, BoundaryLeak when guarded mass exceeds the
// tolerance, SolverFail when the factorization breaks.
WaveField evolve(const DiscreteOperator& H, const WaveField& u, double t,
                 double dt, const EvolveOptions& opts = {});

// Exact free evolution e^{-it D_r^2} u through the momentum multiplier.
WaveField evolve_free(const WaveField& u, double t);

// Evolution + application interface shared by the scattering drivers.
class Hamiltonian {
 public:
  virtual ~Hamiltonian() = default;
  virtual WaveField apply(const WaveField& u) const = 0;
  virtual WaveField evolve(const WaveField& u, double t) const = 0;
  virtual const Grid1D& grid() const = 0;
  virtual int modes() const = 0;
};

// Sparse Hamiltonian stepped by Crank-Nicolson; LU factorizations are cached
// per effective step size, so repeated evolutions are cheap.
class SparseHamiltonian : public Hamiltonian {
 public:
  SparseHamiltonian(DiscreteOperator H, double dt = 0.0,
                    EvolveOptions opts = {});

  WaveField apply(const WaveField& u) const override;
  WaveField evolve(const WaveField& u, double t) const override;
  const Grid1D& grid() const override;
  int modes() const override;
  const DiscreteOperator& op() const;
  double dt() const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

// H0 = D_r^2 on the full line, applied and evolved exactly in momentum space.
class FreeHamiltonian : public Hamiltonian {
 public:
  FreeHamiltonian(const Grid1D& g, int modes);

  WaveField apply(const WaveField& u) const override;
  WaveField evolve(const WaveField& u, double t) const override;
  const Grid1D& grid() const override { return grid_; }
  int modes() const override { return modes_; }

 private:
  Grid1D grid_;
  int modes_ = 1;
};

// Normalized Gaussian packet e^{i rho0 r} e^{-(r-r0)^2/(4 width^2)} in one
// mode column.  Throws PacketClipped when the tail at the grid edge exceeds
// 1e-12 of the mass.
WaveField make_packet(const Grid1D& g, int modes, int mode_column, double r0,
                      double rho0, double width);

// Multiply u-hat by the indicator of +-rho > 0 (rho = 0 goes with +).
WaveField project_sign(const WaveField& u, int sign);

// psi(H0) spectral filter: momentum multiplier psi(rho^2) built on `window`.
WaveField filter_window_free(const WaveField& u, const SpectralWindow& window,
                             double pad_frac = 0.25);

// <u, H u> (real part; imaginary part is solver noise for Hermitian H)
double energy_expectation(const DiscreteOperator& H, const WaveField& u);

}  // namespace scatter
