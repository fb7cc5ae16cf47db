#pragma once

#include <complex>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scatter/errors.hpp"
#include "scatter/smooth.hpp"

namespace scatter {

using cplx = std::complex<double>;

// End-scaling profile k(r).  Conditions checked by validate_scaling:
//   c0 * k / r <= -k' <= C * k / r  and  |k''| <= C * k / r^2   for r >= 1.
// Near r = 0 the profile is clipped, k(r) := k(max(r, r_clip)), which is
// inside the region where every cutoff vanishes.
class ScalingFunction {
 public:
  enum class Kind { Power, Custom };
  using Fn = std::function<double(double)>;

  static constexpr double r_clip = 0.25;

  // k(r) = amplitude * r^{-alpha}
  static ScalingFunction power(double alpha, double amplitude = 1.0);
  // arbitrary smooth profile with analytic derivatives
  static ScalingFunction custom(Fn k, Fn dk, Fn ddk, double c0_bound,
                                double C_bound, double nu_k);

  double value(double r) const { return k_(clip(r)); }
  double deriv(double r) const { return r < r_clip ? 0.0 : dk_(r); }
  double deriv2(double r) const { return r < r_clip ? 0.0 : ddk_(r); }

  Kind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double amplitude() const { return amplitude_; }
  double c0_bound() const { return c0_bound_; }
  double C_bound() const { return C_bound_; }
  // decay index of k itself (for power laws, nu_k = alpha)
  double nu_k() const { return nu_k_; }

 private:
  static double clip(double r) { return r < r_clip ? r_clip : r; }

  Kind kind_ = Kind::Power;
  double alpha_ = 1.0;
  double amplitude_ = 1.0;
  double c0_bound_ = 1.0, C_bound_ = 1.0, nu_k_ = 1.0;
  Fn k_, dk_, ddk_;
};

struct ScalingCheck {
  double c0_hat = 0.0;  // min over samples of -r k'/k
  double C_hat = 0.0;   // max over samples of -r k'/k
  double c2_hat = 0.0;  // max over samples of r^2 |k''| / k
};

// Dense-sampling certificate for the scaling conditions on [r_lo, r_hi].
// Throws NonPositiveK if k <= 0 at a sample, ViolatedBound if the empirical
// c0 fails to be positive (k must be strictly decreasing).
ScalingCheck validate_scaling(const ScalingFunction& k, double r_lo,
                              double r_hi, int n_samples);

// Cross-section: unit circle with density mu = 1, so P = D_theta^2 acts on
// mode m as multiplication by m^2.  Modes kept: |m| <= M.
struct CrossSection {
  int mode_cutoff = 0;  // M

  int n_modes() const { return 2 * mode_cutoff + 1; }
  // column j in [0, 2M] holds mode m = j - M
  int mode_of_column(int j) const { return j - mode_cutoff; }
  int column_of_mode(int m) const { return m + mode_cutoff; }
};

// [(0,1), (1,2), (4,2), ..., (M^2,2)]
std::vector<std::pair<double, int>> channel_eigenvalues(const CrossSection& cs);

// Radial profile from the preset family c * chi(r) * <r>^{-nu}; vanishes for
// r <= 1/2 and decays like r^{-nu}.
struct RadialProfile {
  double c = 0.0;
  double nu = 1.0;

  bool zero() const { return c == 0.0; }
  double value(double r) const;
  double deriv(double r) const;
};

// One named coefficient of E: radial profile times a real trigonometric
// polynomial in theta.  theta_modes holds (p, w) pairs meaning w*cos(p*theta)
// for p > 0 and a constant w for p = 0.  fourier_mode(p) gives the complex
// coefficient of e^{i p theta}; Hermitian symmetry c_{-p} = conj(c_p) holds
// for this family by construction, but raw_modes may override it (used to
// exercise the NonHermitianCoeffs error path).
struct Coefficient {
  RadialProfile profile;
  std::vector<std::pair<int, double>> theta_modes = {{0, 1.0}};
  std::map<int, std::complex<double>> raw_modes;  // optional override

  bool zero() const { return profile.zero(); }
  int max_theta_mode() const;
  std::complex<double> fourier_mode(int p) const;  // angular part only
  bool hermitian_symmetric(double tol = 1e-14) const;
};

enum class DecayKind { ShortRange, LongRangeK, LongRangeA1 };

const char* decay_kind_name(DecayKind kind);

// Decay indices; nullopt marks an index the caller failed to provide.
struct DecayClass {
  std::optional<double> nu_a1L, nu_a1S, nu_a2, nu_a3, nu_b1, nu_b2, nu_V, nu_k;
  bool a1L_active = false;

  // min over active indices (IncompleteSpec if an active index is missing)
  double nu_min() const;
};

DecayKind classify_decay(const DecayClass& d);

// Full perturbation E = V + (b1 Dr + Dr b1) + (b2 sqrt(k) Dth + adj)
//                    + Dr a1 Dr + (Dr a2 sqrt(k) Dth + adj)
//                    + sqrt(k) Dth a3 sqrt(k) Dth,
// with a1 = a1L(r) + a1S(r,theta) split into long/short-range parts.
struct PerturbationCoeffs {
  RadialProfile a1L;  // theta-independent long-range part of a1
  Coefficient a1S, a2, a3, b1, b2, V;

  DecayClass decay_class(const ScalingFunction& k) const;
};

DecayKind classify_perturbation(const PerturbationCoeffs& coeffs,
                                const ScalingFunction& k);

// Least-squares slope of log f versus log r over n geometrically spaced
// samples.  Throws NonPositiveSample when f <= 0 somewhere.
double estimate_decay(const std::function<double(double)>& f, double r_lo,
                      double r_hi, int n);

// Full problem instance as read from a model JSON document.
struct ModelSpec {
  ScalingFunction k = ScalingFunction::power(1.0);
  CrossSection cross_section;
  PerturbationCoeffs coeffs;
  CutoffSpec cutoff;
  SpectralWindow window{0.5, 1.5};
};

}  // namespace scatter
