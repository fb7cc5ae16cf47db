#include "scatter/propagate.hpp"

#include <Eigen/SparseLU>
#include <cmath>
#include <map>
#include <mutex>

namespace scatter {

double boundary_mass_fraction(const WaveField& u, int cells) {
  const int n = u.grid.n;
  cells = std::min(cells, n / 2);
  double guarded = 0.0;
  for (int c = 0; c < u.modes; ++c) {
    for (int i = n - cells; i < n; ++i) guarded += std::norm(u.values(i, c));
    if (u.grid.kind == DomainKind::FullLinePeriodic)
      for (int i = 0; i < cells; ++i) guarded += std::norm(u.values(i, c));
  }
  const double total = u.values.squaredNorm();
  return total > 0.0 ? guarded / total : 0.0;
}

double default_dt(const DiscreteOperator& H) {
  const double disp = 0.5 * H.grid.h * H.grid.h;
  const double guard = 0.4 / H.gershgorin_bound();
  return std::min(disp, guard);
}

namespace {

using SolverLU = Eigen::SparseLU<Eigen::SparseMatrix<cplx>>;

struct Stepper {
  Eigen::SparseMatrix<cplx> B;  // I - i dt H / 2
  SolverLU lu;                  // factors I + i dt H / 2
};

std::shared_ptr<Stepper> make_stepper(const DiscreteOperator& H, double dt) {
  const int dim = H.dim();
  Eigen::SparseMatrix<cplx> eye(dim, dim);
  eye.setIdentity();
  const cplx half(0.0, 0.5 * dt);
  auto st = std::make_shared<Stepper>();
  st->B = eye - half * H.mat;
  Eigen::SparseMatrix<cplx> A = eye + half * H.mat;
  st->lu.compute(A);
  if (st->lu.info() != Eigen::Success)
    fail(ErrorCode::SolverFail, "Crank-Nicolson factorization failed");
  return st;
}

void check_leak(const WaveField& u, const EvolveOptions& opts) {
  if (!opts.check_boundary) return;
  const double frac = boundary_mass_fraction(u, opts.guard_cells);
  if (frac > opts.boundary_tol)
    fail(ErrorCode::BoundaryLeak,
         "boundary mass fraction " + std::to_string(frac) + " exceeds guard");
}

WaveField run_steps(const Stepper& st, const DiscreteOperator& H,
                    const WaveField& u0, int steps, const EvolveOptions& opts) {
  Eigen::VectorXcd x = flatten(u0);
  WaveField u = u0;
  for (int s = 0; s < steps; ++s) {
    Eigen::VectorXcd rhs = st.B * x;
    x = st.lu.solve(rhs);
    if ((s & 0x1f) == 0x1f || s + 1 == steps) {
      u = unflatten(H.grid, H.modes, x);
      check_leak(u, opts);
    }
  }
  return unflatten(H.grid, H.modes, x);
}

}  // namespace

WaveField evolve(const DiscreteOperator& H, const WaveField& u, double t,
                 double dt, const EvolveOptions& opts) {
  if (t == 0.0) return u;
  if (!(dt > 0.0)) fail(ErrorCode::NonAdmissible, "dt must be positive");
  if (dt * H.gershgorin_bound() > 0.5)
    fail(ErrorCode::NonAdmissible,
         "stability guard: dt * spectral radius bound > 0.5");
  const int steps = static_cast<int>(std::ceil(std::abs(t) / dt));
  const double dt_eff = t / steps;  // signed
  auto st = make_stepper(H, dt_eff);
  return run_steps(*st, H, u, steps, opts);
}

WaveField evolve_free(const WaveField& u, double t) {
  if (t == 0.0) return u;
  return momentum_multiplier_c(
      u, [t](double rho) { return std::polar(1.0, -t * rho * rho); });
}

// --------------------------------------------------------------------------

struct SparseHamiltonian::Impl {
  DiscreteOperator H;
  double dt = 0.0;
  EvolveOptions opts;
  std::mutex mu;
  std::map<double, std::shared_ptr<Stepper>> steppers;

  std::shared_ptr<Stepper> stepper_for(double dt_eff) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = steppers.find(dt_eff);
    if (it == steppers.end())
      it = steppers.emplace(dt_eff, make_stepper(H, dt_eff)).first;
    return it->second;
  }
};

SparseHamiltonian::SparseHamiltonian(DiscreteOperator H, double dt,
                                     EvolveOptions opts)
    : impl_(std::make_shared<Impl>()) {
  impl_->H = std::move(H);
  impl_->dt = dt > 0.0 ? dt : default_dt(impl_->H);
  impl_->opts = opts;
  if (impl_->dt * impl_->H.gershgorin_bound() > 0.5)
    fail(ErrorCode::NonAdmissible,
         "stability guard: dt * spectral radius bound > 0.5");
}

WaveField SparseHamiltonian::apply(const WaveField& u) const {
  return impl_->H.apply(u);
}

WaveField SparseHamiltonian::evolve(const WaveField& u, double t) const {
  if (t == 0.0) return u;
  const int steps = static_cast<int>(std::ceil(std::abs(t) / impl_->dt));
  const double dt_eff = t / steps;
  auto st = impl_->stepper_for(dt_eff);
  return run_steps(*st, impl_->H, u, steps, impl_->opts);
}

const Grid1D& SparseHamiltonian::grid() const { return impl_->H.grid; }
int SparseHamiltonian::modes() const { return impl_->H.modes; }
const DiscreteOperator& SparseHamiltonian::op() const { return impl_->H; }
double SparseHamiltonian::dt() const { return impl_->dt; }

FreeHamiltonian::FreeHamiltonian(const Grid1D& g, int modes)
    : grid_(g), modes_(modes) {
  if (g.kind != DomainKind::FullLinePeriodic)
    fail(ErrorCode::GridMismatch, "FreeHamiltonian lives on the full line");
}

WaveField FreeHamiltonian::apply(const WaveField& u) const {
  return momentum_multiplier(u, [](double rho) { return rho * rho; });
}

WaveField FreeHamiltonian::evolve(const WaveField& u, double t) const {
  return evolve_free(u, t);
}

// --------------------------------------------------------------------------

WaveField make_packet(const Grid1D& g, int modes, int mode_column, double r0,
                      double rho0, double width) {
  if (mode_column < 0 || mode_column >= modes)
    fail(ErrorCode::DimensionMismatch, "mode column out of range");
  WaveField u(g, modes);
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r(i);
    const double x = (r - r0) / (2.0 * width);
    u.values(i, mode_column) = std::polar(std::exp(-x * x), rho0 * r);
  }
  const double nrm = u.norm();
  if (!(nrm > 0.0)) fail(ErrorCode::PacketClipped, "packet has no support on grid");
  u *= cplx(1.0 / nrm, 0.0);
  if (boundary_mass_fraction(u, 5) > 1e-12)
    fail(ErrorCode::PacketClipped, "packet tail reaches the grid boundary");
  return u;
}

WaveField project_sign(const WaveField& u, int sign) {
  if (sign != +1 && sign != -1)
    fail(ErrorCode::NonAdmissible, "sign must be +1 or -1");
  SpectrumField s = fourier(u);
  for (int j = 0; j < u.grid.n; ++j) {
    const bool keep = sign > 0 ? s.rho[j] >= 0.0 : s.rho[j] < 0.0;
    if (!keep) s.values.row(j).setZero();
  }
  return inverse_fourier(s);
}

WaveField filter_window_free(const WaveField& u, const SpectralWindow& window,
                             double pad_frac) {
  return momentum_multiplier(u, [window, pad_frac](double rho) {
    return bump_on_window(window, rho * rho, pad_frac);
  });
}

double energy_expectation(const DiscreteOperator& H, const WaveField& u) {
  return std::real(inner(u, H.apply(u)));
}

}  // namespace scatter
