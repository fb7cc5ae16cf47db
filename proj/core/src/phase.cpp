#include "scatter/phase.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <vector>

namespace scatter {

namespace {
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
constexpr double kQuadTol = 1e-10;
}  // namespace

LongRangeInputs LongRangeInputs::from_model(const ScalingFunction& k,
                                            double lambda,
                                            const RadialProfile& a1L) {
  LongRangeInputs in;
  if (lambda == 0.0) {
    in.k = [](double) { return 0.0; };
    in.dk = [](double) { return 0.0; };
  } else {
    in.k = [k, lambda](double r) { return lambda * k.value(r); };
    in.dk = [k, lambda](double r) { return lambda * k.deriv(r); };
  }
  if (a1L.zero()) {
    in.a1L = [](double) { return 0.0; };
    in.da1L = [](double) { return 0.0; };
  } else {
    in.a1L = [a1L](double r) { return a1L.value(std::abs(r)); };
    in.da1L = [a1L](double r) {
      const double d = a1L.deriv(std::abs(r));
      return r >= 0.0 ? d : -d;
    };
  }
  return in;
}

struct PhaseFunction::Impl {
  LongRangeInputs in;
  double rho_lo = 0.0, rho_hi = 0.0;
  double R = 0.0;
  double nu = 0.0;
  int N = 0;
  bool zero = false;

  void check_domain(double r, double rho) const {
    if (std::abs(r) < R * (1.0 - 1e-12))
      fail(ErrorCode::OutOfDomain, "phase queried at |r| < R");
    const double a = std::abs(rho);
    if (a < rho_lo * (1.0 - 1e-9) || a > rho_hi * (1.0 + 1e-9))
      fail(ErrorCode::OutOfDomain, "phase queried outside its momentum window");
  }

  // even extensions k(|s|), a1L(|s|) cover the r < -R branch
  double kk(double s) const { return in.k(std::abs(s)); }
  double dkk(double s) const {
    const double d = in.dk(std::abs(s));
    return s >= 0.0 ? d : -d;
  }
  double g(double s, double rho) const {
    const double a = in.a1L(s);
    return (kk(s) + a * rho * rho) / (2.0 * (1.0 + a) * rho);
  }
  double g_r(double s, double rho) const {
    const double a = in.a1L(s);
    const double da = in.da1L(s);
    const double num =
        (dkk(s) + da * rho * rho) * (1.0 + a) - (kk(s) + a * rho * rho) * da;
    return num / (2.0 * (1.0 + a) * (1.0 + a) * rho);
  }
  double g_rho(double s, double rho) const {
    const double a = in.a1L(s);
    return (a * rho * rho - kk(s)) / (2.0 * (1.0 + a) * rho * rho);
  }

  // dPhi_1 = -g, dPhi_j = -g - dPhi_{j-1}^2 / (2 rho)
  double dphi(int iter, double s, double rho) const {
    if (iter <= 0 || zero) return 0.0;
    const double gs = g(s, rho);
    double d = -gs;
    for (int j = 2; j <= iter; ++j) d = -gs - d * d / (2.0 * rho);
    return d;
  }

  double d2phi(int iter, double s, double rho) const {
    if (iter <= 0 || zero) return 0.0;
    const double gs = g(s, rho), gr = g_r(s, rho);
    double d = -gs, d2 = -gr;
    for (int j = 2; j <= iter; ++j) {
      d2 = -gr - d * d2 / rho;
      d = -gs - d * d / (2.0 * rho);
    }
    return d2;
  }

  double dphi_rho(int iter, double s, double rho) const {
    if (iter <= 0 || zero) return 0.0;
    const double gs = g(s, rho), gp = g_rho(s, rho);
    double d = -gs, dp = -gp;
    for (int j = 2; j <= iter; ++j) {
      dp = -gp + d * d / (2.0 * rho * rho) - d * dp / rho;
      d = -gs - d * d / (2.0 * rho);
    }
    return dp;
  }

  double base_point(double r) const { return r >= 0.0 ? R : -R; }

  double phi(double r, double rho) const {
    if (zero) return 0.0;
    const double a = base_point(r);
    if (r == a) return 0.0;
    auto f = [&](double s) { return dphi(N, s, rho); };
    return GK::integrate(f, a, r, 10, kQuadTol);
  }

  double phi_rho(double r, double rho) const {
    if (zero) return 0.0;
    const double a = base_point(r);
    if (r == a) return 0.0;
    auto f = [&](double s) { return dphi_rho(N, s, rho); };
    return GK::integrate(f, a, r, 10, kQuadTol);
  }

  double rem(double r, double rho) const {
    const double a = in.a1L(r);
    const double d = dphi(N, r, rho) + rho;
    return (1.0 + a) * d * d + kk(r) - rho * rho;
  }
};

int PhaseFunction::n_iters() const { return impl_ ? impl_->N : 0; }
double PhaseFunction::onset_radius() const { return impl_ ? impl_->R : 0.0; }
double PhaseFunction::nu() const { return impl_ ? impl_->nu : 0.0; }
bool PhaseFunction::is_zero() const { return !impl_ || impl_->zero; }
double PhaseFunction::rho_lo() const { return impl_ ? impl_->rho_lo : 0.0; }
double PhaseFunction::rho_hi() const { return impl_ ? impl_->rho_hi : 0.0; }

double PhaseFunction::epsilon_expected() const {
  if (!impl_) return 0.0;
  return impl_->nu * (impl_->N + 1) - 1.0;
}

#define SCATTER_PHASE_CHECK()                                  \
  if (!impl_) fail(ErrorCode::OutOfDomain, "empty phase");     \
  impl_->check_domain(r, rho)

double PhaseFunction::phi(double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->phi(r, rho);
}

double PhaseFunction::dphi_dr(double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->dphi(impl_->N, r, rho);
}

double PhaseFunction::dphi_drho(double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->phi_rho(r, rho);
}

double PhaseFunction::d2phi_dr2(double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->d2phi(impl_->N, r, rho);
}

double PhaseFunction::remainder(double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->rem(r, rho);
}

double PhaseFunction::dphi_dr_iter(int iter, double r, double rho) const {
  SCATTER_PHASE_CHECK();
  return impl_->dphi(iter, r, rho);
}

#undef SCATTER_PHASE_CHECK

PhaseFunction build_phase(const LongRangeInputs& in, double rho_lo,
                          double rho_hi, double R, double nu) {
  if (!(rho_lo > 0.0) || !(rho_hi > rho_lo))
    fail(ErrorCode::WindowTouchesZero,
         "momentum window must satisfy 0 < lo < hi");
  if (!(R > 0.0)) fail(ErrorCode::NonAdmissible, "onset radius R must be > 0");
  if (!(nu > 0.0 && nu < 1.0))
    fail(ErrorCode::NonAdmissible, "phase construction needs nu in (0,1)");
  const double inv = 1.0 / nu;
  if (std::abs(inv - std::round(inv)) < 1e-9)
    fail(ErrorCode::IntegerNuInverse, "1/nu must not be an integer");

  for (int i = 0; i <= 200; ++i) {
    const double r = R * std::pow(100.0, i / 200.0);  // samples R .. 100R
    if (std::abs(in.a1L(r)) >= 0.5)
      fail(ErrorCode::NonAdmissible, "|a1L| >= 1/2 inside the phase domain");
  }

  auto impl = std::make_shared<PhaseFunction::Impl>();
  impl->in = in;
  impl->rho_lo = rho_lo;
  impl->rho_hi = rho_hi;
  impl->R = R;
  impl->nu = nu;
  impl->N = static_cast<int>(std::floor(inv));
  impl->zero = in.k(2.0 * R) == 0.0 && in.a1L(2.0 * R) == 0.0 &&
               in.k(10.0 * R) == 0.0 && in.a1L(10.0 * R) == 0.0;

  PhaseFunction p;
  p.impl_ = std::move(impl);
  return p;
}

double phase_remainder(const PhaseFunction& phase, const LongRangeInputs& in,
                       double r, double rho) {
  const double a = in.a1L(r);
  const double d = phase.is_zero() ? rho : phase.dphi_dr(r, rho) + rho;
  return (1.0 + a) * d * d + in.k(std::abs(r)) - rho * rho;
}

RemainderReport remainder_report(const PhaseFunction& phase, double rho,
                                 double r_lo, double r_hi, int n) {
  if (n < 8) fail(ErrorCode::NonAdmissible, "need at least 8 samples");
  RemainderReport rep;
  rep.epsilon_expected = phase.epsilon_expected();

  const double q = std::pow(r_hi / r_lo, 1.0 / (n - 1));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::vector<double> xs(n), ys(n);
  for (int i = 0; i < n; ++i) {
    const double r = r_lo * std::pow(q, i);
    const double v = std::abs(phase.remainder(r, rho));
    if (!(v > 0.0))
      fail(ErrorCode::NonPositiveSample, "remainder vanished at a sample");
    xs[i] = std::log(r);
    ys[i] = std::log(v);
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  const double denom = n * sxx - sx * sx;
  rep.slope_hat = (n * sxy - sx * sy) / denom;
  const double intercept = (sy - rep.slope_hat * sx) / n;
  double rss = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = ys[i] - (intercept + rep.slope_hat * xs[i]);
    rss += e * e;
  }
  rep.fit_residual = std::sqrt(rss / n);
  return rep;
}

}  // namespace scatter
