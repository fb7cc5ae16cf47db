#include "scatter/scattering.hpp"

#include <cmath>

namespace scatter {

namespace {
// full-line node carrying the same r as half-line node i (or -1)
int full_index_of(const Grid1D& full, const Grid1D& half, int i) {
  const int j = full.n / 2 + i + 1;  // r_j = (j - n/2) h = (i+1) h
  return j < full.n ? j : -1;
}
}  // namespace

CutoffIdentifier::CutoffIdentifier(Grid1D full, Grid1D half, int modes,
                                   CutoffSpec cutoff)
    : full_(full), half_(half), modes_(modes), cutoff_(cutoff) {
  if (full.kind != DomainKind::FullLinePeriodic ||
      half.kind != DomainKind::HalfLineDirichlet)
    fail(ErrorCode::GridMismatch, "identifier needs (full, half) grid pair");
  if (std::abs(full.h - half.h) > 1e-12 * half.h)
    fail(ErrorCode::GridMismatch, "grids must share their spacing");
}

WaveField CutoffIdentifier::forward(const WaveField& u) const {
  if (!u.grid.same_as(full_) || u.modes != modes_)
    fail(ErrorCode::GridMismatch, "field does not live on the reference grid");
  WaveField out(half_, modes_);
  for (int i = 0; i < half_.n; ++i) {
    const int j = full_index_of(full_, half_, i);
    if (j < 0) continue;
    const double chi = cutoff_.chi(half_.r(i));
    if (chi == 0.0) continue;
    for (int c = 0; c < modes_; ++c) out.values(i, c) = chi * u.values(j, c);
  }
  return out;
}

WaveField CutoffIdentifier::adjoint(const WaveField& v) const {
  if (!v.grid.same_as(half_) || v.modes != modes_)
    fail(ErrorCode::GridMismatch, "field does not live on the target grid");
  WaveField out(full_, modes_);
  for (int i = 0; i < half_.n; ++i) {
    const int j = full_index_of(full_, half_, i);
    if (j < 0) continue;
    const double chi = cutoff_.chi(half_.r(i));
    if (chi == 0.0) continue;
    for (int c = 0; c < modes_; ++c) out.values(j, c) = chi * v.values(i, c);
  }
  return out;
}

ModifiedIdentifier::ModifiedIdentifier(
    std::shared_ptr<const CutoffIdentifier> embed,
    std::vector<ChannelIdentifier> per_abs_mode)
    : embed_(std::move(embed)), per_abs_mode_(std::move(per_abs_mode)) {}

WaveField ModifiedIdentifier::forward(const WaveField& u) const {
  const int M = (u.modes - 1) / 2;
  if (static_cast<int>(per_abs_mode_.size()) < M + 1)
    fail(ErrorCode::DimensionMismatch, "missing channel modifiers");
  WaveField modified(u.grid, u.modes);
  for (int c = 0; c < u.modes; ++c) {
    const int m = c - M;
    WaveField col(u.grid, 1);
    col.values.col(0) = u.values.col(c);
    WaveField mod = per_abs_mode_[std::abs(m)].apply(col);
    modified.values.col(c) = mod.values.col(0);
  }
  return embed_->forward(modified);
}

WaveField ModifiedIdentifier::adjoint(const WaveField& v) const {
  WaveField back = embed_->adjoint(v);
  const int M = (back.modes - 1) / 2;
  WaveField out(back.grid, back.modes);
  for (int c = 0; c < back.modes; ++c) {
    const int m = c - M;
    WaveField col(back.grid, 1);
    col.values.col(0) = back.values.col(c);
    WaveField mod = per_abs_mode_[std::abs(m)].apply_adjoint(col);
    out.values.col(c) = mod.values.col(0);
  }
  return out;
}

ModifiedIdentifier make_modified_identifier(
    std::shared_ptr<const CutoffIdentifier> embed, const ScalingFunction& k,
    const RadialProfile& a1L, const CrossSection& cs, const CutoffSpec& cutoffs,
    const SpectralWindow& window, int sign, double onset_R) {
  const double pad = 0.25 * (window.hi - window.lo);
  if (window.lo - pad <= 0.0)
    fail(ErrorCode::WindowTouchesZero, "padded window reaches zero momentum");
  const double rho_lo = 0.5 * std::sqrt(window.lo - pad);
  const double rho_hi = 1.5 * std::sqrt(window.hi + pad);

  std::vector<ChannelIdentifier> chans;
  for (int am = 0; am <= cs.mode_cutoff; ++am) {
    const double lambda = static_cast<double>(am) * am;
    double nu = std::numeric_limits<double>::infinity();
    if (lambda > 0.0) nu = std::min(nu, k.nu_k());
    if (!a1L.zero()) nu = std::min(nu, a1L.nu);
    PhaseFunction phase;  // zero phase unless genuinely long-range
    if (std::isfinite(nu) && nu < 1.0) {
      LongRangeInputs in = LongRangeInputs::from_model(k, lambda, a1L);
      phase = build_phase(in, rho_lo, rho_hi, onset_R, nu);
    }
    chans.push_back(build_channel_identifier(phase, cutoffs, window, sign));
  }
  return ModifiedIdentifier(std::move(embed), std::move(chans));
}

TwoSpaceGrids make_two_space_grids(double h, double r_max_half,
                                   double r_half_full) {
  const int n_half = static_cast<int>(std::round(r_max_half / h)) - 1;
  const int n_full = 2 * static_cast<int>(std::round(r_half_full / h));
  TwoSpaceGrids g;
  g.half = Grid1D::half_line((n_half + 1) * h, n_half);
  g.full = Grid1D::full_line(0.5 * n_full * h, n_full);
  return g;
}

// --------------------------------------------------------------------------

namespace {

struct TailFit {
  double exponent = 0.0;
  double tail = std::numeric_limits<double>::infinity();
  bool usable = false;
};

TailFit fit_tail(const std::vector<std::pair<double, double>>& samples,
                 int fit_points) {
  TailFit out;
  const int n = static_cast<int>(samples.size());
  if (n < fit_points) return out;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (int i = n - fit_points; i < n; ++i) {
    const double x = std::log(samples[i].first);
    const double y = std::log(std::max(samples[i].second, 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double m = fit_points;
  out.exponent = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  out.usable = true;
  if (out.exponent < -1.0) {
    const auto& [t_last, g_last] = samples.back();
    out.tail = g_last * t_last / (-1.0 - out.exponent);
  }
  return out;
}

}  // namespace

CookResult cook_wave_operator(const Hamiltonian& H, const Hamiltonian& H0,
                              const Identifier& J, const WaveField& u,
                              Direction dir, const CookOptions& opts) {
  const double sgn = dir == Direction::Plus ? 1.0 : -1.0;
  const double unorm = u.norm();
  if (!(unorm > 0.0)) fail(ErrorCode::NonAdmissible, "zero input state");

  CookResult res;
  auto integrand = [&](const WaveField& v) {
    WaveField a = H.apply(J.forward(v));
    a -= J.forward(H0.apply(v));
    return a.norm();
  };

  WaveField v = u;
  res.integrand_samples.emplace_back(0.0, integrand(v));

  double T = 0.0;
  bool stop = false;
  while (!stop) {
    const double t_next = T + opts.sample_dt;
    if (t_next > opts.T_max * (1.0 + 1e-12)) break;
    v = H0.evolve(v, sgn * opts.sample_dt);
    T = t_next;
    const double g = integrand(v);
    res.integrand_samples.emplace_back(T, g);

    if (g <= 1e-13 * unorm) {
      res.converged = true;
      res.fitted_exponent = -std::numeric_limits<double>::infinity();
      res.tail_estimate = 0.0;
      stop = true;
      break;
    }
    if (T >= opts.t_min_fit) {
      const TailFit fit = fit_tail(res.integrand_samples, opts.fit_points);
      if (fit.usable) {
        res.fitted_exponent = fit.exponent;
        res.tail_estimate = fit.tail;
        if (fit.exponent < -1.0 && fit.tail < opts.tail_tol_rel * unorm) {
          res.converged = true;
          stop = true;
        }
      }
    }
  }

  res.T_used = T;
  // w = e^{+- i T H} J e^{-+ i T H0} u; evolve(x, t) realizes e^{-i t H} x
  res.w = H.evolve(J.forward(v), -sgn * T);
  return res;
}

CookResult modified_wave_operator(const Hamiltonian& L, const Hamiltonian& H0,
                                  const ModifiedIdentifier& JJpm,
                                  const WaveField& u, Direction dir,
                                  const CookOptions& opts) {
  return cook_wave_operator(L, H0, JJpm, u, dir, opts);
}

double isometry_defect(const CookResult& result, const WaveField& u) {
  return std::abs(result.w.norm() - u.norm());
}

double chain_rule_check(const Hamiltonian& L, const Hamiltonian& L0,
                        const Hamiltonian& H0, const Identifier& J,
                        const WaveField& u, const CookOptions& opts) {
  const CookResult two_space = cook_wave_operator(L, H0, J, u, Direction::Plus, opts);
  const CookResult first = cook_wave_operator(L0, H0, J, u, Direction::Plus, opts);
  IdentityIdentifier id;
  const CookResult chained =
      cook_wave_operator(L, L0, id, first.w, Direction::Plus, opts);
  WaveField diff = two_space.w;
  diff -= chained.w;
  return diff.norm();
}

CompletenessReport completeness_probe(const SparseHamiltonian& L,
                                      const Hamiltonian& H0,
                                      const Identifier& J,
                                      const SpectralWindow& window,
                                      int ensemble_size, uint64_t seed,
                                      const CookOptions& opts) {
  if (ensemble_size < 1) fail(ErrorCode::NonAdmissible, "empty ensemble");
  const EigenBasis basis = eigenbasis(L.op());

  // window must avoid localized spectrum (operational sigma_pp)
  const double r_edge = 0.35 * L.grid().r_max;
  for (int i = 0; i < basis.values.size(); ++i) {
    const double lam = basis.values(i);
    if (lam < window.lo || lam > window.hi) continue;
    double wsum = 0.0, rsum = 0.0;
    for (int node = 0; node < L.grid().n; ++node) {
      double w = 0.0;
      for (int c = 0; c < L.modes(); ++c)
        w += std::norm(basis.vectors(node * L.modes() + c, i));
      wsum += w;
      rsum += w * L.grid().r(node);
    }
    if (rsum / wsum < r_edge)
      fail(ErrorCode::NonAdmissible,
           "window contains a localized eigenvalue at " + std::to_string(lam));
  }

  // Orthonormal ensemble of window-filtered random states.  Members are
  // random superpositions of localized packets (not raw noise): extended
  // states straddle the artificial wall and can never drain out of the
  // interaction region inside a finite box.
  // Members straddle the interaction zone (cutoff edge plus decaying k) and
  // draw from the upper-middle momentum band.  Extended random states would
  // straddle the artificial wall, and slow components could not drain out
  // of the interaction region before window states dephase onto the wall
  // (standing-wave components put O(1/n) mass there once phases decohere).
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double r_lo = 15.0;
  const double r_hi = 40.0;
  if (L.grid().r_max < 3.0 * r_hi)
    fail(ErrorCode::GridTooSmall, "completeness probe needs r_max >= 120");
  const double span = std::sqrt(window.hi) - std::sqrt(window.lo);
  const double rho_lo = std::sqrt(window.lo) + 0.5 * span;
  const double rho_hi = std::sqrt(window.hi) - 0.1 * span;
  std::vector<Eigen::VectorXcd> raw;
  for (int i = 0; i < ensemble_size; ++i) {
    WaveField mix(L.grid(), L.modes());
    for (int p = 0; p < 6; ++p) {
      const double r0 = r_lo + (r_hi - r_lo) * unit(rng);
      const double rho = (rho_lo + (rho_hi - rho_lo) * unit(rng)) *
                         (unit(rng) < 0.5 ? -1.0 : 1.0);
      const int col = std::min(static_cast<int>(unit(rng) * L.modes()),
                               L.modes() - 1);
      const cplx coef = std::polar(0.5 + unit(rng), 2.0 * M_PI * unit(rng));
      WaveField pk = make_packet(L.grid(), L.modes(), col, r0, rho, 5.0);
      mix += coef * pk;
    }
    WaveField filt = basis.apply_function(
        mix, [&window](double x) { return bump_inside_window(window, x); });
    raw.push_back(flatten(filt));
  }
  if (gram_schmidt(raw) < ensemble_size)
    fail(ErrorCode::SolverFail, "ensemble collapsed under orthonormalization");

  CompletenessReport rep;
  const AdjointIdentifier Jstar(J);
  for (int i = 0; i < ensemble_size; ++i) {
    WaveField v = unflatten(L.grid(), L.modes(), raw[i]);
    v *= cplx(1.0 / v.norm(), 0.0);
    // adjoint limit e^{+itH0} J* e^{-itL} v via Cook with swapped roles
    const CookResult r = cook_wave_operator(H0, L, Jstar, v, Direction::Plus, opts);
    const double ratio = r.w.norm2() / v.norm2();
    rep.ratios.push_back(ratio);
    rep.member_converged.push_back(r.converged);
  }
  for (double x : rep.ratios) rep.mean_ratio += x;
  rep.mean_ratio /= rep.ratios.size();
  return rep;
}

}  // namespace scatter
