#include "scatter/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace scatter {

ScalingFunction ScalingFunction::power(double alpha, double amplitude) {
  if (!(alpha > 0.0)) fail(ErrorCode::NonAdmissible, "power exponent must be > 0");
  if (!(amplitude > 0.0)) fail(ErrorCode::NonAdmissible, "amplitude must be > 0");
  ScalingFunction s;
  s.kind_ = Kind::Power;
  s.alpha_ = alpha;
  s.amplitude_ = amplitude;
  s.c0_bound_ = alpha;
  s.C_bound_ = alpha;
  s.nu_k_ = alpha;
  const double c = amplitude;
  s.k_ = [alpha, c](double r) { return c * std::pow(r, -alpha); };
  s.dk_ = [alpha, c](double r) { return -c * alpha * std::pow(r, -alpha - 1.0); };
  s.ddk_ = [alpha, c](double r) {
    return c * alpha * (alpha + 1.0) * std::pow(r, -alpha - 2.0);
  };
  return s;
}

ScalingFunction ScalingFunction::custom(Fn k, Fn dk, Fn ddk, double c0_bound,
                                        double C_bound, double nu_k) {
  ScalingFunction s;
  s.kind_ = Kind::Custom;
  s.alpha_ = std::numeric_limits<double>::quiet_NaN();
  s.c0_bound_ = c0_bound;
  s.C_bound_ = C_bound;
  s.nu_k_ = nu_k;
  s.k_ = std::move(k);
  s.dk_ = std::move(dk);
  s.ddk_ = std::move(ddk);
  return s;
}

ScalingCheck validate_scaling(const ScalingFunction& k, double r_lo,
                              double r_hi, int n_samples) {
  if (r_lo < 1.0) fail(ErrorCode::NonAdmissible, "validate_scaling needs r_lo >= 1");
  if (n_samples < 100) fail(ErrorCode::NonAdmissible, "need at least 100 samples");
  if (!(r_hi > r_lo)) fail(ErrorCode::NonAdmissible, "need r_hi > r_lo");

  ScalingCheck out;
  out.c0_hat = std::numeric_limits<double>::infinity();
  out.C_hat = -std::numeric_limits<double>::infinity();
  out.c2_hat = 0.0;

  const double step = (r_hi - r_lo) / (n_samples - 1);
  for (int i = 0; i < n_samples; ++i) {
    const double r = r_lo + step * i;
    const double kv = k.value(r);
    if (!(kv > 0.0)) fail(ErrorCode::NonPositiveK, "k <= 0 at r = " + std::to_string(r));
    const double ratio1 = -r * k.deriv(r) / kv;
    const double ratio2 = r * r * std::abs(k.deriv2(r)) / kv;
    out.c0_hat = std::min(out.c0_hat, ratio1);
    out.C_hat = std::max(out.C_hat, ratio1);
    out.c2_hat = std::max(out.c2_hat, ratio2);
  }

  if (!(out.c0_hat > 0.0) || !std::isfinite(out.C_hat) || !std::isfinite(out.c2_hat))
    fail(ErrorCode::ViolatedBound,
         "-k' fails to dominate c0 k / r (empirical c0 = " +
             std::to_string(out.c0_hat) + ")");
  return out;
}

std::vector<std::pair<double, int>> channel_eigenvalues(const CrossSection& cs) {
  std::vector<std::pair<double, int>> out;
  out.reserve(cs.mode_cutoff + 1);
  out.emplace_back(0.0, 1);
  for (int m = 1; m <= cs.mode_cutoff; ++m)
    out.emplace_back(static_cast<double>(m) * m, 2);
  return out;
}

double RadialProfile::value(double r) const {
  if (c == 0.0) return 0.0;
  return c * chi_base(r) * std::pow(1.0 + r * r, -0.5 * nu);
}

double RadialProfile::deriv(double r) const {
  if (c == 0.0) return 0.0;
  const double w = std::pow(1.0 + r * r, -0.5 * nu);
  const double dw = -nu * r * std::pow(1.0 + r * r, -0.5 * nu - 1.0);
  return c * (chi_base_deriv(r) * w + chi_base(r) * dw);
}

int Coefficient::max_theta_mode() const {
  int m = 0;
  for (const auto& [p, w] : theta_modes)
    if (w != 0.0) m = std::max(m, std::abs(p));
  for (const auto& [p, v] : raw_modes)
    if (v != std::complex<double>(0.0)) m = std::max(m, std::abs(p));
  return m;
}

std::complex<double> Coefficient::fourier_mode(int p) const {
  if (auto it = raw_modes.find(p); it != raw_modes.end()) return it->second;
  std::complex<double> val = 0.0;
  for (const auto& [q, w] : theta_modes) {
    if (q == 0 && p == 0) val += w;
    // w cos(q theta) contributes w/2 to modes +q and -q
    if (q != 0 && std::abs(p) == std::abs(q)) val += 0.5 * w;
  }
  return val;
}

bool Coefficient::hermitian_symmetric(double tol) const {
  const int pm = max_theta_mode();
  for (int p = 0; p <= pm; ++p) {
    const auto plus = fourier_mode(p);
    const auto minus = fourier_mode(-p);
    if (std::abs(minus - std::conj(plus)) > tol) return false;
  }
  return true;
}

const char* decay_kind_name(DecayKind kind) {
  switch (kind) {
    case DecayKind::ShortRange: return "short_range";
    case DecayKind::LongRangeK: return "long_range_k";
    case DecayKind::LongRangeA1: return "long_range_a1";
  }
  return "?";
}

namespace {
double require_index(const std::optional<double>& v, const char* name) {
  if (!v) fail(ErrorCode::IncompleteSpec, std::string("missing decay index ") + name);
  return *v;
}
}  // namespace

double DecayClass::nu_min() const {
  double m = std::numeric_limits<double>::infinity();
  auto fold = [&m](const std::optional<double>& v) {
    if (v) m = std::min(m, *v);
  };
  if (a1L_active) fold(nu_a1L);
  fold(nu_a1S);
  fold(nu_a2);
  fold(nu_a3);
  fold(nu_b1);
  fold(nu_b2);
  fold(nu_V);
  return m;
}

DecayKind classify_decay(const DecayClass& d) {
  if (d.a1L_active) {
    require_index(d.nu_a1L, "nu_a1L");
    return DecayKind::LongRangeA1;
  }
  const double a1S = require_index(d.nu_a1S, "nu_a1S");
  const double a2 = require_index(d.nu_a2, "nu_a2");
  const double a3 = require_index(d.nu_a3, "nu_a3");
  const double b1 = require_index(d.nu_b1, "nu_b1");
  const double b2 = require_index(d.nu_b2, "nu_b2");
  const double V = require_index(d.nu_V, "nu_V");
  const double k = require_index(d.nu_k, "nu_k");
  const bool short_range =
      a1S > 1.0 && a2 > 1.0 && b1 > 1.0 && b2 > 1.0 && V > 1.0 && a3 >= 1.0 && k > 1.0;
  return short_range ? DecayKind::ShortRange : DecayKind::LongRangeK;
}

DecayClass PerturbationCoeffs::decay_class(const ScalingFunction& k) const {
  // An inactive coefficient constrains nothing; record it as infinitely
  // decaying so only genuinely present terms drive the classification.
  constexpr double inf = std::numeric_limits<double>::infinity();
  DecayClass d;
  d.a1L_active = !a1L.zero();
  d.nu_a1L = a1L.zero() ? inf : a1L.nu;
  d.nu_a1S = a1S.zero() ? inf : a1S.profile.nu;
  d.nu_a2 = a2.zero() ? inf : a2.profile.nu;
  d.nu_a3 = a3.zero() ? inf : a3.profile.nu;
  d.nu_b1 = b1.zero() ? inf : b1.profile.nu;
  d.nu_b2 = b2.zero() ? inf : b2.profile.nu;
  d.nu_V = V.zero() ? inf : V.profile.nu;
  d.nu_k = k.nu_k();
  return d;
}

DecayKind classify_perturbation(const PerturbationCoeffs& coeffs,
                                const ScalingFunction& k) {
  return classify_decay(coeffs.decay_class(k));
}

double estimate_decay(const std::function<double(double)>& f, double r_lo,
                      double r_hi, int n) {
  if (n < 2) fail(ErrorCode::NonAdmissible, "need at least 2 samples");
  if (!(r_lo > 0.0 && r_hi > r_lo))
    fail(ErrorCode::NonAdmissible, "need 0 < r_lo < r_hi");

  // least squares on (log r, log f) with geometric r spacing
  const double q = std::pow(r_hi / r_lo, 1.0 / (n - 1));
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    const double r = r_lo * std::pow(q, i);
    const double v = f(r);
    if (!(v > 0.0))
      fail(ErrorCode::NonPositiveSample, "f <= 0 at r = " + std::to_string(r));
    const double x = std::log(r), y = std::log(v);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  return (n * sxy - sx * sy) / denom;
}

}  // namespace scatter
