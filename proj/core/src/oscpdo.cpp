#include "scatter/oscpdo.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <map>
#include <mutex>

namespace scatter {

namespace {
constexpr double kSqrt2Pi = 2.5066282746310005024157652848110;
using GK = boost::math::quadrature::gauss_kronrod<double, 15>;
}  // namespace

PolySymbol PolySymbol::rho_squared() { return from_constants(0.0, 0.0, 1.0); }

PolySymbol PolySymbol::from_constants(cplx b0, cplx b1, cplx b2) {
  auto cf = [](cplx v) {
    return Coef{[v](double) { return v; }, [](double) { return cplx(0.0); }};
  };
  PolySymbol p;
  p.coefs = {cf(b0), cf(b1), cf(b2)};
  return p;
}

cplx PolySymbol::eval(double r, double rho) const {
  cplx acc = 0.0, pw = 1.0;
  for (const auto& c : coefs) {
    acc += c.f(r) * pw;
    pw *= rho;
  }
  return acc;
}

cplx PolySymbol::d_rho(double r, double rho) const {
  cplx acc = 0.0;
  for (size_t j = 1; j < coefs.size(); ++j)
    acc += double(j) * coefs[j].f(r) * std::pow(rho, double(j - 1));
  return acc;
}

cplx PolySymbol::d_rho2(double r) const {
  return coefs.size() >= 3 ? 2.0 * coefs[2].f(r) : cplx(0.0);
}

cplx PolySymbol::d_r(double r, double rho) const {
  cplx acc = 0.0, pw = 1.0;
  for (const auto& c : coefs) {
    acc += c.df(r) * pw;
    pw *= rho;
  }
  return acc;
}

bool PolySymbol::r_independent() const {
  for (double r : {0.7, 3.1, 41.5}) {
    for (size_t j = 0; j < coefs.size(); ++j) {
      if (std::abs(coefs[j].f(r) - coefs[j].f(1.0)) > 1e-14) return false;
      if (std::abs(coefs[j].df(r)) > 1e-14) return false;
    }
  }
  return true;
}

// ---------------------------------------------------------------------------

struct OscillatingOp::Impl {
  PhaseFunction phase;
  Symbol symbol;

  struct GridKey {
    int n;
    double r_min, r_max;
    bool operator<(const GridKey& o) const {
      return std::tie(n, r_min, r_max) < std::tie(o.n, o.r_min, o.r_max);
    }
  };
  struct Kernel {
    std::vector<int> cols;    // selected momentum indices
    Eigen::MatrixXcd K;       // n x cols.size(): e^{i Phi} a at (r_i, rho_j)
  };
  std::mutex mu;
  std::map<GridKey, std::shared_ptr<const Kernel>> cache;

  std::shared_ptr<const Kernel> kernel_for(const Grid1D& g) {
    const GridKey key{g.n, g.r_min, g.r_max};
    {
      std::lock_guard<std::mutex> lock(mu);
      if (auto it = cache.find(key); it != cache.end()) return it->second;
    }
    auto ker = build_kernel(g);
    std::lock_guard<std::mutex> lock(mu);
    auto [it, _] = cache.emplace(key, std::move(ker));
    return it->second;
  }

  std::shared_ptr<const Kernel> build_kernel(const Grid1D& g) const {
    const int n = g.n;
    const double drho = 2.0 * M_PI / (n * g.h);
    const double rho_max_grid = (n / 2) * drho;
    if (symbol.rho_hi > rho_max_grid || symbol.rho_lo < -rho_max_grid)
      fail(ErrorCode::SupportMismatch,
           "momentum grid does not cover the symbol support");

    auto ker = std::make_shared<Kernel>();
    for (int j = 0; j < n; ++j) {
      const double rho = (j - n / 2) * drho;
      if (rho >= symbol.rho_lo - drho && rho <= symbol.rho_hi + drho)
        ker->cols.push_back(j);
    }
    const int m = static_cast<int>(ker->cols.size());
    ker->K = Eigen::MatrixXcd::Zero(n, m);

    const bool with_phase = !phase.is_zero();
    const double R = phase.onset_radius();

    std::vector<cplx> a_col(n);
    for (int jj = 0; jj < m; ++jj) {
      const double rho = (ker->cols[jj] - n / 2) * drho;
      bool any = false;
      for (int i = 0; i < n; ++i) {
        a_col[i] = symbol.eval(g.r(i), rho);
        any = any || a_col[i] != cplx(0.0);
      }
      if (!any) continue;
      if (!with_phase) {
        for (int i = 0; i < n; ++i)
          if (a_col[i] != cplx(0.0))
            ker->K(i, jj) = std::polar(1.0, g.r(i) * rho) * a_col[i];
        continue;
      }
      // the phase must cover every point where the symbol lives
      const double arho = std::abs(rho);
      if (arho < phase.rho_lo() * (1.0 - 1e-9) ||
          arho > phase.rho_hi() * (1.0 + 1e-9))
        fail(ErrorCode::SupportMismatch,
             "symbol momentum support leaves the phase window");
      for (int i = 0; i < n; ++i)
        if (std::abs(g.r(i)) <= R && a_col[i] != cplx(0.0))
          fail(ErrorCode::SupportMismatch,
               "symbol support reaches inside the phase onset radius");

      // cumulative phase sweep, positive branch then negative branch
      auto dphi = [&](double s) { return phase.dphi_dr(s, rho); };
      double acc = 0.0, prev = R;
      for (int i = 0; i < n; ++i) {
        const double r = g.r(i);
        if (r <= R) continue;
        acc += GK::integrate(dphi, prev, r, 6, 1e-12);
        prev = r;
        if (a_col[i] != cplx(0.0))
          ker->K(i, jj) = std::polar(1.0, r * rho + acc) * a_col[i];
      }
      acc = 0.0;
      prev = -R;
      for (int i = n - 1; i >= 0; --i) {
        const double r = g.r(i);
        if (r >= -R) continue;
        acc += GK::integrate(dphi, prev, r, 6, 1e-12);
        prev = r;
        if (a_col[i] != cplx(0.0))
          ker->K(i, jj) = std::polar(1.0, r * rho + acc) * a_col[i];
      }
    }
    return ker;
  }
};

OscillatingOp::OscillatingOp(PhaseFunction phase, Symbol symbol)
    : impl_(std::make_shared<Impl>()) {
  impl_->phase = std::move(phase);
  impl_->symbol = std::move(symbol);
}

const PhaseFunction& OscillatingOp::phase() const { return impl_->phase; }
const Symbol& OscillatingOp::symbol() const { return impl_->symbol; }

WaveField OscillatingOp::apply(const WaveField& u) const {
  if (!impl_) fail(ErrorCode::SupportMismatch, "empty oscillating operator");
  SpectrumField s = fourier(u);
  auto ker = impl_->kernel_for(u.grid);
  const int m = static_cast<int>(ker->cols.size());
  Eigen::MatrixXcd sel(m, u.modes);
  for (int jj = 0; jj < m; ++jj) sel.row(jj) = s.values.row(ker->cols[jj]);
  WaveField out(u.grid, u.modes);
  out.values = (s.drho / kSqrt2Pi) * (ker->K * sel);
  return out;
}

WaveField OscillatingOp::apply_adjoint(const WaveField& v) const {
  if (!impl_) fail(ErrorCode::SupportMismatch, "empty oscillating operator");
  auto ker = impl_->kernel_for(v.grid);
  const int m = static_cast<int>(ker->cols.size());
  // w_hat_j = (h / sqrt(2 pi)) sum_i conj(K_ij) v_i on selected columns
  Eigen::MatrixXcd wsel = (v.grid.h / kSqrt2Pi) * (ker->K.adjoint() * v.values);
  SpectrumField s;
  s.source_grid = v.grid;
  s.modes = v.modes;
  const int n = v.grid.n;
  s.drho = 2.0 * M_PI / (n * v.grid.h);
  s.rho.resize(n);
  for (int j = 0; j < n; ++j) s.rho[j] = (j - n / 2) * s.drho;
  s.values = Eigen::MatrixXcd::Zero(n, v.modes);
  for (int jj = 0; jj < m; ++jj) s.values.row(ker->cols[jj]) = wsel.row(jj);
  return inverse_fourier(s);
}

WaveField apply_poly_kn(const PolySymbol& b, const WaveField& u) {
  if (b.coefs.size() > 3)
    fail(ErrorCode::UnsupportedSymbolDegree, "polynomial symbols up to rho^2");
  WaveField du = momentum_multiplier(u, [](double rho) { return rho; });
  WaveField d2u = momentum_multiplier(u, [](double rho) { return rho * rho; });
  WaveField out(u.grid, u.modes);
  for (int i = 0; i < u.grid.n; ++i) {
    const double r = u.grid.r(i);
    const cplx b0 = b.coefs.size() > 0 ? b.coefs[0].f(r) : cplx(0.0);
    const cplx b1 = b.coefs.size() > 1 ? b.coefs[1].f(r) : cplx(0.0);
    const cplx b2 = b.coefs.size() > 2 ? b.coefs[2].f(r) : cplx(0.0);
    for (int c = 0; c < u.modes; ++c)
      out.values(i, c) =
          b0 * u.values(i, c) + b1 * du.values(i, c) + b2 * d2u.values(i, c);
  }
  return out;
}

Symbol compose_left(const PolySymbol& b, const OscillatingOp& op, int n_terms) {
  if (b.coefs.size() > 3)
    fail(ErrorCode::UnsupportedSymbolDegree,
         "compose_left handles polynomial symbols of degree <= 2");
  if (n_terms != 1 && n_terms != 2)
    fail(ErrorCode::NonAdmissible, "n_terms must be 1 or 2");
  const Symbol a = op.symbol();
  const PhaseFunction phase = op.phase();
  if (n_terms == 2 && !a.dr)
    fail(ErrorCode::NonAdmissible,
         "two-term composition needs the symbol's analytic r-derivative");

  Symbol d;
  d.order = a.order;
  d.rho_lo = a.rho_lo;
  d.rho_hi = a.rho_hi;
  d.eval = [b, a, phase, n_terms](double r, double rho) -> cplx {
    const cplx av = a.eval(r, rho);
    if (av == cplx(0.0) && (n_terms == 1 || a.dr(r, rho) == cplx(0.0)))
      return 0.0;
    const double shift = phase.is_zero() ? 0.0 : phase.dphi_dr(r, rho);
    cplx val = b.eval(r, rho + shift) * av;
    if (n_terms == 2) {
      const cplx i_unit(0.0, 1.0);
      const cplx dra = -i_unit * a.dr(r, rho);  // D_r a
      val += b.d_rho(r, rho + shift) * dra;
      if (!phase.is_zero())
        val += b.d_rho2(r) * (-0.5 * i_unit) * phase.d2phi_dr2(r, rho) * av;
    }
    return val;
  };
  return d;
}

Symbol compose_right(const OscillatingOp& op, const PolySymbol& c) {
  if (c.coefs.size() > 3)
    fail(ErrorCode::UnsupportedSymbolDegree,
         "compose_right handles polynomial symbols of degree <= 2");
  if (!c.r_independent())
    fail(ErrorCode::UnsupportedSymbolDegree,
         "compose_right needs an r-independent right factor");
  const Symbol a = op.symbol();
  Symbol e;
  e.order = a.order;
  e.rho_lo = a.rho_lo;
  e.rho_hi = a.rho_hi;
  e.eval = [a, c](double r, double rho) -> cplx {
    const cplx av = a.eval(r, rho);
    if (av == cplx(0.0)) return 0.0;
    return av * std::conj(c.eval(1.0, rho));
  };
  if (a.dr)
    e.dr = [a, c](double r, double rho) -> cplx {
      return a.dr(r, rho) * std::conj(c.eval(1.0, rho));
    };
  return e;
}

// ---------------------------------------------------------------------------

Symbol channel_symbol(const PhaseFunction& phase, const CutoffSpec& cutoffs,
                      const SpectralWindow& window, int sign,
                      double mollify_width) {
  if (sign != +1 && sign != -1)
    fail(ErrorCode::NonAdmissible, "sign must be +1 or -1");
  const double pad = 0.25 * (window.hi - window.lo);
  if (window.lo - pad <= 0.0)
    fail(ErrorCode::WindowTouchesZero,
         "padded energy window reaches zero momentum");
  const double rho_max = std::sqrt(window.hi + pad);
  if (!phase.is_zero()) {
    if (phase.rho_lo() > std::sqrt(window.lo - pad) * (1.0 + 1e-12) ||
        phase.rho_hi() < rho_max * (1.0 - 1e-12))
      fail(ErrorCode::SupportMismatch,
           "phase momentum window does not cover psi support");
  }

  const double w = mollify_width;
  const CutoffSpec cut = cutoffs;
  const SpectralWindow win = window;
  Symbol a;
  a.order = 0.0;
  a.rho_lo = -rho_max;
  a.rho_hi = rho_max;
  a.eval = [cut, win, sign, w](double r, double rho) -> cplx {
    const double eta = cut.eta(r);
    if (eta == 0.0) return 0.0;
    const double psi = bump_on_window(win, rho * rho);
    if (psi == 0.0) return 0.0;
    const double srho = (r >= 0.0 ? rho : -rho) * sign;
    const double sigma = smooth_step((srho + 0.5 * w) / w);
    return eta * psi * sigma;
  };
  a.dr = [cut, win, sign, w](double r, double rho) -> cplx {
    const double deta = cut.eta_prime(r);
    if (deta == 0.0) return 0.0;
    const double psi = bump_on_window(win, rho * rho);
    const double srho = (r >= 0.0 ? rho : -rho) * sign;
    const double sigma = smooth_step((srho + 0.5 * w) / w);
    return deta * psi * sigma;
  };
  return a;
}

WaveField ChannelIdentifier::apply(const WaveField& u) const {
  WaveField v = op.apply(u);
  return momentum_multiplier(v, chi_out);
}

WaveField ChannelIdentifier::apply_adjoint(const WaveField& u) const {
  WaveField v = momentum_multiplier(u, chi_out);
  return op.apply_adjoint(v);
}

ChannelIdentifier build_channel_identifier(const PhaseFunction& phase,
                                           const CutoffSpec& cutoffs,
                                           const SpectralWindow& window,
                                           int sign, double mollify_width) {
  Symbol a = channel_symbol(phase, cutoffs, window, sign, mollify_width);

  // reachable momentum set { rho + dPhi : rho^2 in supp psi, |r| > R }
  const double pad = 0.25 * (window.hi - window.lo);
  const double b_lo = std::sqrt(window.lo - pad);
  const double b_hi = std::sqrt(window.hi + pad);
  double m_lo = b_lo, m_hi = b_hi;
  if (!phase.is_zero()) {
    const double R = phase.onset_radius();
    for (int ir = 0; ir <= 24; ++ir) {
      const double r = R * std::pow(1000.0, ir / 24.0) * (1.0 + 1e-9);
      for (int jq = 0; jq <= 16; ++jq) {
        const double rho = b_lo + (b_hi - b_lo) * jq / 16.0;
        for (double rr : {r, -r})
          for (double pp : {rho, -rho}) {
            const double shifted = pp + phase.dphi_dr(rr, pp);
            if (pp > 0) {
              m_lo = std::min(m_lo, shifted);
              m_hi = std::max(m_hi, shifted);
            }
          }
      }
    }
  }
  double edge = std::max(0.1 * (b_hi - b_lo), 2.0 * mollify_width);
  if (m_lo - 2.0 * edge <= 0.0) edge = 0.45 * m_lo;
  const double lo = m_lo, hi = m_hi, e = edge;
  auto branch = [lo, hi, e](double x) {
    return smooth_step((x - (lo - 2.0 * e)) / e) *
           smooth_step(((hi + 2.0 * e) - x) / e);
  };

  ChannelIdentifier jd;
  jd.op = OscillatingOp(phase, a);
  jd.chi_out = [branch](double rho) { return branch(rho) + branch(-rho); };
  return jd;
}

}  // namespace scatter
