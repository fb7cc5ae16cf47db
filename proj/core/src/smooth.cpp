#include "scatter/smooth.hpp"

#include <cmath>

namespace scatter {

namespace {
inline double mollifier(double x) { return x > 0.0 ? std::exp(-1.0 / x) : 0.0; }
inline double mollifier_deriv(double x) {
  return x > 0.0 ? std::exp(-1.0 / x) / (x * x) : 0.0;
}
}  // namespace

double smooth_step(double x) {
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double a = mollifier(x);
  const double b = mollifier(1.0 - x);
  return a / (a + b);
}

double smooth_step_deriv(double x) {
  if (x <= 0.0 || x >= 1.0) return 0.0;
  const double a = mollifier(x);
  const double b = mollifier(1.0 - x);
  const double da = mollifier_deriv(x);
  const double db = -mollifier_deriv(1.0 - x);
  const double s = a + b;
  return (da * s - a * (da + db)) / (s * s);
}

double chi_base(double r) { return smooth_step(2.0 * r - 1.0); }
double chi_base_deriv(double r) { return 2.0 * smooth_step_deriv(2.0 * r - 1.0); }

double chi_base_deriv2(double r) {
  // Second derivative by central differencing of the closed-form first
  // derivative; chi'' only feeds diagnostic bounds, never operator entries.
  const double h = 1e-6;
  return (chi_base_deriv(r + h) - chi_base_deriv(r - h)) / (2.0 * h);
}

double CutoffSpec::eta(double r) const {
  const double x = std::abs(r);
  return smooth_step((x - R) / R);  // 0 for |r| <= R, 1 for |r| >= 2R
}

double CutoffSpec::eta_prime(double r) const {
  const double x = std::abs(r);
  const double d = smooth_step_deriv((x - R) / R) / R;
  return r >= 0.0 ? d : -d;
}

SpectralWindow::SpectralWindow(double lo_, double hi_) : lo(lo_), hi(hi_) {
  if (!(0.0 < lo) || !(lo < hi))
    fail(ErrorCode::WindowTouchesThreshold,
         "spectral window must satisfy 0 < lo < hi");
}

double bump_on_window(const SpectralWindow& w, double x, double pad_frac) {
  const double pad = pad_frac * (w.hi - w.lo);
  return smooth_step((x - (w.lo - pad)) / pad) *
         smooth_step(((w.hi + pad) - x) / pad);
}

double bump_inside_window(const SpectralWindow& w, double x) {
  const double rise = 0.25 * (w.hi - w.lo);
  return smooth_step((x - w.lo) / rise) * smooth_step((w.hi - x) / rise);
}

}  // namespace scatter
