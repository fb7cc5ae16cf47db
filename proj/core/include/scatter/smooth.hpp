#pragma once

#include "scatter/errors.hpp"

namespace scatter {

// C-infinity step built from exp(-1/x): 0 for x <= 0, 1 for x >= 1,
// strictly increasing in between.  All cutoffs below are mollified
// versions of indicator functions made from this one step.
double smooth_step(double x);
double smooth_step_deriv(double x);

// Base cutoff chi: 0 for r <= 1/2, 1 for r >= 1, monotone on [1/2, 1].
double chi_base(double r);
double chi_base_deriv(double r);
double chi_base_deriv2(double r);

// Cutoff bundle for one analysis radius R.
//   chi_R(r) = chi(r/R): 0 for r <= R/2, 1 for r >= R
//   eta(r):   0 for |r| <= R, 1 for |r| >= 2R (reference-side cutoff)
struct CutoffSpec {
  double R = 8.0;

  double chi(double r) const { return chi_base(r); }
  double chi_prime(double r) const { return chi_base_deriv(r); }

  double chi_R(double r) const { return chi_base(r / R); }
  double chi_R_prime(double r) const { return chi_base_deriv(r / R) / R; }
  double chi_R_second(double r) const { return chi_base_deriv2(r / R) / (R * R); }

  double eta(double r) const;
  double eta_prime(double r) const;
};

// Energy window 0 < lo < hi for the spectral analysis.
struct SpectralWindow {
  double lo = 0.0;
  double hi = 0.0;

  SpectralWindow() = default;
  SpectralWindow(double lo_, double hi_);

  double center() const { return 0.5 * (lo + hi); }
  double half_width() const { return 0.5 * (hi - lo); }
  bool contains(double x) const { return lo <= x && x <= hi; }
};

// Smooth bump psi with psi = 1 on [lo, hi], supported on the window padded
// by pad_frac*(hi-lo) on each side.
double bump_on_window(const SpectralWindow& w, double x, double pad_frac = 0.25);
// Smooth bump f supported inside [lo, hi], f = 1 on the middle half.
double bump_inside_window(const SpectralWindow& w, double x);

}  // namespace scatter
