#include "scatter/fourier.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>

namespace scatter {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// One cached FFTW plan pair per transform size.  Plan creation is not
// thread-safe, so it is guarded; execution happens on per-thread buffers.
struct PlanPair {
  fftw_plan fwd = nullptr, bwd = nullptr;
  fftw_complex* in = nullptr;
  fftw_complex* out = nullptr;
  int n = 0;

  ~PlanPair() {
    if (fwd) fftw_destroy_plan(fwd);
    if (bwd) fftw_destroy_plan(bwd);
    if (in) fftw_free(in);
    if (out) fftw_free(out);
  }
};

std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

PlanPair& plans_for(int n) {
  thread_local std::map<int, std::unique_ptr<PlanPair>> cache;
  auto it = cache.find(n);
  if (it == cache.end()) {
    auto p = std::make_unique<PlanPair>();
    p->n = n;
    p->in = fftw_alloc_complex(n);
    p->out = fftw_alloc_complex(n);
    {
      std::lock_guard<std::mutex> lock(plan_mutex());
      p->fwd = fftw_plan_dft_1d(n, p->in, p->out, FFTW_FORWARD, FFTW_ESTIMATE);
      p->bwd = fftw_plan_dft_1d(n, p->in, p->out, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!p->fwd || !p->bwd) fail(ErrorCode::SolverFail, "fftw plan failed");
    it = cache.emplace(n, std::move(p)).first;
  }
  return *it->second;
}

inline int wrap_index(int j_signed, int n) { return j_signed >= 0 ? j_signed : j_signed + n; }

}  // namespace

SpectrumField fourier(const WaveField& u) {
  if (u.grid.kind != DomainKind::FullLinePeriodic)
    fail(ErrorCode::GridMismatch, "fourier needs a full-line field");
  const int n = u.grid.n;
  const double h = u.grid.h;
  const double drho = kTwoPi / (n * h);
  const double scale = h / std::sqrt(kTwoPi);

  SpectrumField s;
  s.source_grid = u.grid;
  s.modes = u.modes;
  s.drho = drho;
  s.rho.resize(n);
  for (int j = 0; j < n; ++j) s.rho[j] = (j - n / 2) * drho;
  s.values.resize(n, u.modes);

  PlanPair& p = plans_for(n);
  for (int col = 0; col < u.modes; ++col) {
    for (int i = 0; i < n; ++i) {
      p.in[i][0] = u.values(i, col).real();
      p.in[i][1] = u.values(i, col).imag();
    }
    fftw_execute_dft(p.fwd, p.in, p.out);
    for (int j = 0; j < n; ++j) {
      const int js = j - n / 2;  // signed frequency
      const int k = wrap_index(js, n);
      const cplx raw(p.out[k][0], p.out[k][1]);
      const double rho_j = js * drho;
      // carry the r_min offset of the grid into the continuum phase
      const cplx phase = std::polar(1.0, -u.grid.r_min * rho_j);
      s.values(j, col) = scale * phase * raw;
    }
  }
  return s;
}

WaveField inverse_fourier(const SpectrumField& s) {
  const int n = s.source_grid.n;
  const double scale = s.drho / std::sqrt(kTwoPi);

  WaveField u(s.source_grid, s.modes);
  PlanPair& p = plans_for(n);
  for (int col = 0; col < s.modes; ++col) {
    for (int j = 0; j < n; ++j) {
      const int js = j - n / 2;
      const int k = wrap_index(js, n);
      const cplx phase = std::polar(1.0, s.source_grid.r_min * s.rho[j]);
      const cplx v = phase * s.values(j, col);
      p.in[k][0] = v.real();
      p.in[k][1] = v.imag();
    }
    fftw_execute_dft(p.bwd, p.in, p.out);
    for (int i = 0; i < n; ++i)
      u.values(i, col) = scale * cplx(p.out[i][0], p.out[i][1]);
  }
  return u;
}

WaveField momentum_multiplier(const WaveField& u,
                              const std::function<double(double)>& g) {
  SpectrumField s = fourier(u);
  for (int j = 0; j < s.source_grid.n; ++j) {
    const double gj = g(s.rho[j]);
    for (int col = 0; col < s.modes; ++col) s.values(j, col) *= gj;
  }
  return inverse_fourier(s);
}

WaveField momentum_multiplier_c(const WaveField& u,
                                const std::function<cplx(double)>& g) {
  SpectrumField s = fourier(u);
  for (int j = 0; j < s.source_grid.n; ++j) {
    const cplx gj = g(s.rho[j]);
    for (int col = 0; col < s.modes; ++col) s.values(j, col) *= gj;
  }
  return inverse_fourier(s);
}

}  // namespace scatter
