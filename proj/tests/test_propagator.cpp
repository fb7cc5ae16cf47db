// Time evolution: Crank-Nicolson unitarity/accuracy, exact free evolution,
// packets, and momentum-sign projections.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "scatter/fourier.hpp"
#include "scatter/operators.hpp"
#include "scatter/propagate.hpp"

using namespace scatter;

namespace {
// closed-form free evolution of e^{i rho0 r} e^{-(r-r0)^2/sigma},
// sigma = 4 w^2, under i d_t u = D_r^2 u
cplx free_gaussian(double r, double t, double r0, double rho0, double w) {
  const cplx sigma(4.0 * w * w, 0.0);
  const cplx denom = sigma + cplx(0.0, 4.0 * t);
  const double rc = r - r0 - 2.0 * rho0 * t;
  const cplx gauss = std::sqrt(sigma / denom) * std::exp(-rc * rc / denom);
  return std::polar(1.0, rho0 * (r - rho0 * t)) * gauss;
}
}  // namespace

TEST_CASE("evolve with t = 0 returns the state unchanged") {
  const Grid1D g = Grid1D::half_line(40.0, 160);
  const auto L = assemble_L0(g, ScalingFunction::power(1.0), {0});
  const WaveField u = make_packet(g, 1, 0, 15.0, 1.0, 1.5);
  WaveField v = evolve(L, u, 0.0, default_dt(L));
  v -= u;
  CHECK(v.norm() == 0.0);
}

TEST_CASE("exact free evolution matches the closed-form Gaussian") {
  const Grid1D g = Grid1D::full_line(120.0, 1024);
  const double r0 = -30.0, rho0 = 1.0, w = 4.0, t = 10.0;
  WaveField u(g, 1);
  for (int i = 0; i < g.n; ++i)
    u.values(i, 0) = free_gaussian(g.r(i), 0.0, r0, rho0, w);

  const WaveField ut = evolve_free(u, t);
  WaveField ref(g, 1);
  for (int i = 0; i < g.n; ++i)
    ref.values(i, 0) = free_gaussian(g.r(i), t, r0, rho0, w);
  WaveField diff = ut;
  diff -= ref;
  CHECK(diff.norm() < 1e-8 * ref.norm());
}

TEST_CASE("Crank-Nicolson conserves norm and energy over 1e4 steps") {
  const Grid1D g = Grid1D::half_line(40.0, 128);
  const auto L = assemble_L0(g, ScalingFunction::power(1.0), {0});
  const WaveField u = make_packet(g, 1, 0, 15.0, 0.4, 2.0);
  const double dt = 1e-4;
  REQUIRE(dt * L.gershgorin_bound() <= 0.5);

  SparseHamiltonian H(L, dt, {.check_boundary = false});
  const double e0 = energy_expectation(L, u);
  WaveField v = H.evolve(u, 1e4 * dt);
  CHECK(std::abs(v.norm() - u.norm()) < 1e-10);
  CHECK(std::abs(energy_expectation(L, v) - e0) < 1e-8 * std::abs(e0));
}

TEST_CASE("Crank-Nicolson is second order in dt") {
  const Grid1D g = Grid1D::half_line(40.0, 64);  // coarse so large dt passes the guard
  const auto L = assemble_L0(g, ScalingFunction::power(1.0), {0});
  const WaveField u = make_packet(g, 1, 0, 18.0, 0.8, 2.0);
  const double T = 0.5;
  const EvolveOptions opts{.check_boundary = false};

  const WaveField ref = evolve(L, u, T, T / 512, opts);
  auto err = [&](int steps) {
    WaveField v = evolve(L, u, T, T / steps, opts);
    v -= ref;
    return v.norm();
  };
  const double e1 = err(16);
  const double e2 = err(32);
  CHECK(e1 / e2 > 3.0);
  CHECK(e1 / e2 < 5.0);
}

TEST_CASE("stability guard rejects oversized steps") {
  const Grid1D g = Grid1D::half_line(20.0, 256);
  const auto L = assemble_L0(g, ScalingFunction::power(1.0), {0});
  const double dt_bad = 1.0 / L.gershgorin_bound();  // dt * bound = 1 > 0.5
  CHECK_THROWS_WITH_AS(evolve(L, make_packet(g, 1, 0, 10.0, 0.5, 1.0), 1.0, dt_bad),
                       doctest::Contains("stability guard"), Error);
}

TEST_CASE("boundary guard trips when mass reaches the wall") {
  const Grid1D g = Grid1D::half_line(30.0, 128);
  const auto L = assemble_L0(g, ScalingFunction::power(1.0), {0});
  const WaveField u = make_packet(g, 1, 0, 15.0, 1.5, 1.5);
  SparseHamiltonian H(L, 0.0, {.boundary_tol = 1e-8});
  CHECK_THROWS_WITH_AS(H.evolve(u, 40.0), doctest::Contains("BoundaryLeak"),
                       Error);
}

TEST_CASE("packets: normalization, momentum mean, uncertainty") {
  const Grid1D g = Grid1D::full_line(80.0, 1024);
  const WaveField u = make_packet(g, 1, 0, -10.0, 1.3, 3.0);
  CHECK(std::abs(u.norm() - 1.0) < 1e-12);

  auto momentum_stats = [](const WaveField& f) {
    SpectrumField s = fourier(f);
    double mass = 0, mean = 0, second = 0;
    for (int j = 0; j < s.source_grid.n; ++j) {
      const double w = std::norm(s.values(j, 0)) * s.drho;
      mass += w;
      mean += w * s.rho[j];
      second += w * s.rho[j] * s.rho[j];
    }
    mean /= mass;
    return std::pair{mean, std::sqrt(second / mass - mean * mean)};
  };
  const auto [mean, spread] = momentum_stats(u);
  CHECK(std::abs(mean - 1.3) < 1e-6);

  const WaveField u2 = make_packet(g, 1, 0, -10.0, 1.3, 6.0);
  const auto [mean2, spread2] = momentum_stats(u2);
  CHECK(spread / spread2 == doctest::Approx(2.0).epsilon(0.01));

  CHECK_THROWS_WITH_AS(make_packet(g, 1, 0, 78.0, 1.0, 3.0),
                       doctest::Contains("PacketClipped"), Error);
}

TEST_CASE("sign projections") {
  const Grid1D g = Grid1D::full_line(80.0, 512);

  SUBCASE("positive-momentum packet is P+ invariant") {
    WaveField u = make_packet(g, 1, 0, 0.0, 1.2, 4.0);  // u-hat in rho > 0
    WaveField up = project_sign(u, +1);
    WaveField um = project_sign(u, -1);
    WaveField d = up;
    d -= u;
    CHECK(d.norm() < 1e-10);
    CHECK(um.norm() < 1e-10);
  }

  SUBCASE("real zero-mean packet splits evenly") {
    WaveField u(g, 1);
    for (int i = 0; i < g.n; ++i) {
      const double r = g.r(i);
      u.values(i, 0) = r * std::exp(-r * r / 36.0);  // odd, real, u-hat(0) = 0
    }
    const double uu = u.norm2();
    CHECK(std::abs(project_sign(u, +1).norm2() - 0.5 * uu) < 1e-12 * uu);
    CHECK(std::abs(project_sign(u, -1).norm2() - 0.5 * uu) < 1e-12 * uu);
  }

  SUBCASE("idempotence and resolution of identity") {
    WaveField u = make_packet(g, 1, 0, 5.0, -0.7, 3.0);
    WaveField pp = project_sign(project_sign(u, +1), +1);
    WaveField once = project_sign(u, +1);
    pp -= once;
    CHECK(pp.norm() < 1e-13);
    WaveField sum = project_sign(u, +1) + project_sign(u, -1);
    sum -= u;
    CHECK(sum.norm() < 1e-13);
  }

  SUBCASE("commutes with free evolution") {
    WaveField u = make_packet(g, 1, 0, -8.0, 0.9, 3.0);
    WaveField a = project_sign(evolve_free(u, 3.0), +1);
    WaveField b = evolve_free(project_sign(u, +1), 3.0);
    a -= b;
    CHECK(a.norm() < 1e-12);
  }
}

TEST_CASE("free Hamiltonian wrapper is exact") {
  const Grid1D g = Grid1D::full_line(60.0, 256);
  FreeHamiltonian H0(g, 1);
  WaveField u = make_packet(g, 1, 0, 0.0, 1.0, 3.0);
  // apply: exact momentum multiplier rho^2
  SpectrumField s = fourier(H0.apply(u));
  SpectrumField su = fourier(u);
  for (int j = 0; j < g.n; ++j) {
    const cplx expect = su.values(j, 0) * s.rho[j] * s.rho[j];
    CHECK(std::abs(s.values(j, 0) - expect) < 1e-12);
  }
}
