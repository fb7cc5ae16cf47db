#pragma once

#include <functional>
#include <memory>

#include "scatter/model.hpp"

namespace scatter {

// Long-range data feeding the phase recursion.  k already carries the
// channel factor (lambda * k for channel eigenvalue lambda); a1L may be the
// zero function.
struct LongRangeInputs {
  std::function<double(double)> k, dk;
  std::function<double(double)> a1L, da1L;

  static LongRangeInputs from_model(const ScalingFunction& k, double lambda,
                                    const RadialProfile& a1L);
};

// Phase modifier Phi(r, rho) on Gamma(R) = { |r| > R, |rho| in the momentum
// window }, built by successive approximation:
//   dPhi_1 = -g,   dPhi_{N} = -g - (dPhi_{N-1})^2 / (2 rho),
//   g(s, rho) = (k(s) + a1L(s) rho^2) / (2 (1 + a1L(s)) rho),
// stopped at N = floor(1/nu).  The r-derivative is the closed-form recursion
// above; Phi itself and the rho-derivative are single quadratures of
// closed-form integrands from the base point sign(r)*R (tolerance 1e-10).
// The remainder R[Phi] = (1+a1L)|dPhi + rho|^2 + k - rho^2 then decays like
// r^{-(1+eps)} with eps = nu (floor(1/nu) + 1) - 1.
class PhaseFunction {
 public:
  PhaseFunction() = default;

  int n_iters() const;
  double onset_radius() const;
  double nu() const;
  double epsilon_expected() const;
  bool is_zero() const;  // identically vanishing phase
  double rho_lo() const;
  double rho_hi() const;

  double phi(double r, double rho) const;
  double dphi_dr(double r, double rho) const;
  double dphi_drho(double r, double rho) const;
  double d2phi_dr2(double r, double rho) const;
  double remainder(double r, double rho) const;

  // dPhi of the previous iterate (for the telescoping identity tests)
  double dphi_dr_iter(int iter, double r, double rho) const;

 private:
  friend PhaseFunction build_phase(const LongRangeInputs&, double, double,
                                   double, double);
  struct Impl;
  std::shared_ptr<const Impl> impl_;
};

// Throws NonAdmissible when |a1L| >= 1/2 beyond R or nu is outside (0,1),
// IntegerNuInverse when 1/nu is an integer, WindowTouchesZero when the
// momentum window reaches 0.
PhaseFunction build_phase(const LongRangeInputs& in, double rho_lo,
                          double rho_hi, double R, double nu);

// Pointwise remainder of an arbitrary phase against given long-range data.
double phase_remainder(const PhaseFunction& phase, const LongRangeInputs& in,
                       double r, double rho);

struct RemainderReport {
  double slope_hat = 0.0;        // log-log slope of |R[Phi]| vs r
  double epsilon_expected = 0.0; // nu (floor(1/nu)+1) - 1
  double fit_residual = 0.0;     // rms residual of the fit
};

RemainderReport remainder_report(const PhaseFunction& phase, double rho,
                                 double r_lo, double r_hi, int n = 80);

}  // namespace scatter
