#pragma once

#include <functional>
#include <memory>

#include "scatter/fourier.hpp"
#include "scatter/phase.hpp"
#include "scatter/smooth.hpp"

namespace scatter {

// Symbol a(r, rho), compactly supported in rho inside [rho_lo, rho_hi].
// dr is the analytic r-derivative, needed for two-term compositions.
struct Symbol {
  std::function<cplx(double, double)> eval;
  std::function<cplx(double, double)> dr;
  double order = 0.0;
  double rho_lo = 0.0, rho_hi = 0.0;

  cplx operator()(double r, double rho) const { return eval(r, rho); }
  bool in_support(double rho) const { return rho >= rho_lo && rho <= rho_hi; }
};

// b(r, rho) = b0(r) + b1(r) rho + b2(r) rho^2 with analytic r-derivatives;
// covers every left factor Section-6 style compositions need.
struct PolySymbol {
  struct Coef {
    std::function<cplx(double)> f;
    std::function<cplx(double)> df;
  };
  std::vector<Coef> coefs;  // degree = coefs.size()-1 <= 2

  static PolySymbol rho_squared();
  static PolySymbol from_constants(cplx b0, cplx b1, cplx b2);

  cplx eval(double r, double rho) const;
  cplx d_rho(double r, double rho) const;
  cplx d_rho2(double r) const;
  cplx d_r(double r, double rho) const;
  bool r_independent() const;
};

// J(Phi, a) = (e^{i Phi} a)(x, D); zero phase gives the plain PDO a(x, D).
// The complex kernel e^{i Phi(r_i, rho_j)} a(r_i, rho_j) is cached per grid.
class OscillatingOp {
 public:
  OscillatingOp() = default;
  OscillatingOp(PhaseFunction phase, Symbol symbol);

  const PhaseFunction& phase() const;
  const Symbol& symbol() const;

  WaveField apply(const WaveField& u) const;
  // adjoint J(Phi,a)^* with respect to the discrete inner products
  WaveField apply_adjoint(const WaveField& u) const;

 private:
  struct Impl;
  std::shared_ptr<Impl> impl_;
};

inline WaveField apply_osc(const OscillatingOp& op, const WaveField& u) {
  return op.apply(u);
}

// Kohn-Nirenberg application of a polynomial symbol: b0 u + b1 D_r u + b2 D_r^2 u
// with exact momentum derivatives (full-line fields).
WaveField apply_poly_kn(const PolySymbol& b, const WaveField& u);

// b(x,D) J(Phi,a) = J(Phi, d): d0 = b(r, rho + dPhi) a, and for n_terms = 2
// the |alpha| = 1 correction
//   d1 = (d_rho b)(r, rho + dPhi) (D_r a) + (d_rho^2 b)(r, rho + dPhi) *
//        (1/2)(d_r D_r Phi) a.
Symbol compose_left(const PolySymbol& b, const OscillatingOp& op, int n_terms);

// J(Phi,a) c(x,D)^* = J(Phi, e) for r-independent c: e0 = a conj(c), e1 = 0.
Symbol compose_right(const OscillatingOp& op, const PolySymbol& c);

// Channel identifier J_lambda^pm = chi_out(D_r) J(Phi, a_pm) with
// a_pm = eta(r) psi(rho^2) sigma_pm(r, rho); sigma_pm is mollified over
// mollify_width in rho, and chi_out == 1 on the reachable momentum set
// { rho + dPhi : rho^2 in supp psi, |r| > R }.
struct ChannelIdentifier {
  OscillatingOp op;
  std::function<double(double)> chi_out;

  WaveField apply(const WaveField& u) const;
  WaveField apply_adjoint(const WaveField& u) const;
};

ChannelIdentifier build_channel_identifier(const PhaseFunction& phase,
                                           const CutoffSpec& cutoffs,
                                           const SpectralWindow& window,
                                           int sign, double mollify_width = 0.02);

// The symbol a_pm alone (exposed for composition studies).
Symbol channel_symbol(const PhaseFunction& phase, const CutoffSpec& cutoffs,
                      const SpectralWindow& window, int sign,
                      double mollify_width = 0.02);

}  // namespace scatter
