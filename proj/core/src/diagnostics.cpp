#include "scatter/diagnostics.hpp"

#include <Eigen/SparseLU>
#include <cmath>

namespace scatter {

WaveField EigenBasis::apply_function(
    const WaveField& u, const std::function<double(double)>& f) const {
  if (!u.grid.same_as(grid) || u.modes != modes)
    fail(ErrorCode::DimensionMismatch, "basis/field mismatch");
  const Eigen::VectorXcd x = flatten(u);
  Eigen::VectorXcd coef = vectors.adjoint() * x;
  for (int i = 0; i < coef.size(); ++i) coef(i) *= f(values(i));
  return unflatten(grid, modes, vectors * coef);
}

WaveField EigenBasis::eigenvector(int idx) const {
  WaveField u = unflatten(grid, modes, vectors.col(idx));
  u *= cplx(1.0 / u.norm(), 0.0);
  return u;
}

EigenBasis eigenbasis(const DiscreteOperator& L) {
  EigenBasis b;
  b.grid = L.grid;
  b.modes = L.modes;
  EigResult e = hermitian_eig(L.dense());
  b.values = std::move(e.values);
  b.vectors = std::move(e.vectors);
  return b;
}

std::vector<ScanHit> embedded_eigen_scan(const DiscreteOperator& L, double lo,
                                         double hi) {
  const EigenBasis b = eigenbasis(L);
  std::vector<ScanHit> hits;
  for (int i = 0; i < b.values.size(); ++i) {
    const double lam = b.values(i);
    if (lam < lo || lam > hi) continue;
    double wsum = 0.0, rsum = 0.0;
    for (int node = 0; node < L.grid.n; ++node) {
      double w = 0.0;
      for (int c = 0; c < L.modes; ++c)
        w += std::norm(b.vectors(node * L.modes + c, i));
      wsum += w;
      rsum += w * L.grid.r(node);
    }
    hits.push_back({lam, rsum / wsum});
  }
  return hits;
}

MourreReport mourre_form_check(const DiscreteOperator& L,
                               const DiscreteOperator& A,
                               const SpectralWindow& window, double epsilon,
                               int compact_dim_budget) {
  if (!(window.lo > 0.0))
    fail(ErrorCode::WindowTouchesThreshold, "window must sit inside (0, inf)");
  const double lam0 = window.center();
  if (!(lam0 - epsilon > 0.0))
    fail(ErrorCode::WindowTouchesThreshold, "f support reaches the threshold");
  const SpectralWindow fwin(lam0 - epsilon, lam0 + epsilon);

  const DiscreteOperator C = commutator_iLA(L, A);
  const EigenBasis b = eigenbasis(L);

  // ran f(L): eigendirections with non-negligible filter weight.  In the
  // pencil f C f >= alpha f^2 + K the weights cancel, so the check reduces
  // to the compression of i[L,A] onto that span.
  std::vector<int> keep;
  for (int i = 0; i < b.values.size(); ++i)
    if (bump_inside_window(fwin, b.values(i)) > 1e-8) keep.push_back(i);

  MourreReport rep;
  rep.subspace_dim = static_cast<int>(keep.size());
  if (keep.empty()) return rep;

  Eigen::MatrixXcd V(b.vectors.rows(), keep.size());
  for (size_t j = 0; j < keep.size(); ++j) V.col(j) = b.vectors.col(keep[j]);
  const Eigen::MatrixXcd CV = C.mat * V;
  Eigen::MatrixXcd comp = V.adjoint() * CV;
  comp = 0.5 * (comp + comp.adjoint().eval());  // symmetrize solver noise

  const EigResult ce = hermitian_eig(comp);
  rep.betas.assign(ce.values.data(), ce.values.data() + ce.values.size());

  const int d = static_cast<int>(rep.betas.size());
  const int pick = std::min(compact_dim_budget, d - 1);
  rep.alpha_hat = rep.betas[pick];
  const double floor_val = rep.alpha_hat - 0.1 * std::abs(rep.alpha_hat);
  rep.violated_dim = 0;
  for (double beta : rep.betas)
    if (beta < floor_val) ++rep.violated_dim;
  return rep;
}

LapReport lap_resolvent_sup(const DiscreteOperator& L, double lambda, double s,
                            std::vector<double> eta_list, int probes) {
  if (!(s > 0.0)) fail(ErrorCode::NonAdmissible, "weight exponent must be > 0");
  if (eta_list.empty()) fail(ErrorCode::NonAdmissible, "empty eta list");
  std::sort(eta_list.rbegin(), eta_list.rend());

  if (lambda > 0.0) {
    const double spacing =
        2.0 * M_PI * std::sqrt(lambda) / (L.grid.length() * L.modes);
    if (eta_list.back() < 3.0 * spacing)
      fail(ErrorCode::ResolutionFloor,
           "eta below 3x level spacing " + std::to_string(spacing));
  }

  const int dim = L.dim();
  Eigen::VectorXd w(dim);
  for (int i = 0; i < L.grid.n; ++i) {
    const double r = L.grid.r(i);
    const double wi = std::pow(1.0 + r * r, -0.5 * s);
    for (int c = 0; c < L.modes; ++c) w(i * L.modes + c) = wi;
  }

  Eigen::SparseMatrix<cplx> eye(dim, dim);
  eye.setIdentity();

  LapReport rep;
  int eta_idx = 0;
  for (double eta : eta_list) {
    const cplx z(lambda, eta);
    Eigen::SparseMatrix<cplx> Az = L.mat - z * eye;
    Eigen::SparseMatrix<cplx> Azb = L.mat - std::conj(z) * eye;
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>> lu, lub;
    lu.compute(Az);
    lub.compute(Azb);
    if (lu.info() != Eigen::Success || lub.info() != Eigen::Success)
      fail(ErrorCode::SolverFail, "resolvent factorization failed");

    auto apply = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
      Eigen::VectorXcd y = w.asDiagonal() * x;
      y = lu.solve(y);
      return w.asDiagonal() * y;
    };
    auto apply_adj = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
      Eigen::VectorXcd y = w.asDiagonal() * x;
      y = lub.solve(y);
      return w.asDiagonal() * y;
    };
    const double nrm = operator_norm_power(apply, apply_adj, dim, probes, 1e-4,
                                           101 + 13 * eta_idx);
    rep.curve.emplace_back(eta, nrm);
    ++eta_idx;
  }

  for (const auto& [eta, v] : rep.curve) rep.bound_hat = std::max(rep.bound_hat, v);
  if (rep.curve.size() >= 2) {
    const double a = rep.curve[rep.curve.size() - 2].second;
    const double b = rep.curve.back().second;
    rep.plateau = std::abs(b - a) <= 0.10 * std::max(a, b);
  }
  return rep;
}

DiscreteOperator make_weight_G0(const Grid1D& g, int modes, double s) {
  DiscreteOperator op;
  op.grid = g;
  op.modes = modes;
  op.hermitian = true;
  const int dim = g.n * modes;
  op.mat.resize(dim, dim);
  std::vector<Eigen::Triplet<cplx>> trips;
  trips.reserve(dim);
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r(i);
    const double wi = std::pow(1.0 + r * r, -0.5 * s);
    for (int c = 0; c < modes; ++c)
      trips.emplace_back(i * modes + c, i * modes + c, wi);
  }
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

DiscreteOperator make_weight_G1(const Grid1D& g, int modes, double s,
                                const CutoffSpec& cutoff) {
  const DiscreteOperator dr = assemble_Dr(g, modes);
  DiscreteOperator op;
  op.grid = g;
  op.modes = modes;
  op.hermitian = false;  // weight and derivative do not commute
  Eigen::VectorXcd w(g.n * modes);
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r(i);
    const double wi = cutoff.chi_R(r) * std::pow(1.0 + r * r, -0.5 * s);
    for (int c = 0; c < modes; ++c) w(i * modes + c) = wi;
  }
  op.mat = w.asDiagonal() * dr.mat;
  return op;
}

DiscreteOperator make_weight_G2(const Grid1D& g, const CrossSection& cs,
                                const CutoffSpec& cutoff,
                                const ScalingFunction& k) {
  DiscreteOperator op;
  op.grid = g;
  op.modes = cs.n_modes();
  op.hermitian = true;
  const int dim = g.n * op.modes;
  op.mat.resize(dim, dim);
  std::vector<Eigen::Triplet<cplx>> trips;
  for (int i = 0; i < g.n; ++i) {
    const double r = g.r(i);
    const double base = cutoff.chi_R(r) * std::pow(1.0 + r * r, -0.25) *
                        std::sqrt(k.value(r));
    for (int c = 0; c < op.modes; ++c) {
      const int m = cs.mode_of_column(c);
      if (m != 0)
        trips.emplace_back(i * op.modes + c, i * op.modes + c,
                           base * std::abs(double(m)));
    }
  }
  op.mat.setFromTriplets(trips.begin(), trips.end());
  return op;
}

SmoothnessReport kato_smoothness_integral(const SparseHamiltonian& L,
                                          const DiscreteOperator& G,
                                          const std::string& g_kind,
                                          const WaveField& u, double T_max,
                                          double sample_dt) {
  SmoothnessReport rep;
  rep.g_kind = g_kind;
  const double u2 = u.norm2();
  if (!(u2 > 0.0)) fail(ErrorCode::NonAdmissible, "zero initial state");

  WaveField state = u;
  double t = 0.0;
  double integral = 0.0;
  double g_prev = G.apply(state).norm2();
  rep.integral_curve.emplace_back(0.0, 0.0);
  double at_half = 0.0;

  const int nsteps = static_cast<int>(std::ceil(T_max / sample_dt));
  for (int s = 1; s <= nsteps; ++s) {
    const double t_next = std::min(T_max, s * sample_dt);
    state = L.evolve(state, t_next - t);
    t = t_next;
    const double g_cur = G.apply(state).norm2();
    integral += 0.5 * (g_prev + g_cur) * (t_next - (s - 1) * sample_dt);
    g_prev = g_cur;
    rep.integral_curve.emplace_back(t, integral);
    if (t <= 0.5 * T_max) at_half = integral;
  }

  rep.plateau_ratio = integral > 0.0 ? (integral - at_half) / integral : 0.0;
  rep.bound_hat = integral / u2;
  rep.pass = rep.plateau_ratio < 0.01;
  return rep;
}

RadiationReport radiation_inequality_check(
    const DiscreteOperator& L, const DiscreteOperator& M_op,
    const DiscreteOperator& G0, const DiscreteOperator& G1,
    const DiscreteOperator& G2, double c0, double epsilon, int probes,
    double C_max, double tol_rel, int wall_buffer) {
  const DiscreteOperator comm = commutator_iLA(L, M_op);
  const Eigen::SparseMatrix<cplx> GG0 = G0.mat.adjoint() * G0.mat;
  const Eigen::SparseMatrix<cplx> GG1 = G1.mat.adjoint() * G1.mat;
  const Eigen::SparseMatrix<cplx> GG2 = G2.mat.adjoint() * G2.mat;
  const int dim = L.dim();

  const int first_wall_node = L.grid.n - wall_buffer;
  auto project_interior = [&](Eigen::VectorXcd& x) {
    for (int i = std::max(0, first_wall_node); i < L.grid.n; ++i)
      for (int c = 0; c < L.modes; ++c) x(i * L.modes + c) = 0.0;
  };

  RadiationReport rep;
  double C = 0.0;
  while (true) {
    Eigen::SparseMatrix<cplx> T =
        (c0 - epsilon) * GG2 - comm.mat - C * (GG0 + GG1);
    auto apply = [&](const Eigen::VectorXcd& x) -> Eigen::VectorXcd {
      Eigen::VectorXcd y = x;
      project_interior(y);
      y = T * y;
      project_interior(y);
      return y;
    };
    double lam = lanczos_max_eig(apply, dim, 160, 17);
    // random probes cross-check the Lanczos extreme direction
    std::mt19937_64 rng(33);
    for (int p = 0; p < probes; ++p) {
      Eigen::VectorXcd v = random_gaussian(dim, rng);
      project_interior(v);
      v /= v.norm();
      lam = std::max(lam, std::real(v.dot(apply(v))));
    }
    double scale = 0.0;
    for (int kcol = 0; kcol < T.outerSize(); ++kcol) {
      double acc = 0.0;
      for (Eigen::SparseMatrix<cplx>::InnerIterator it(T, kcol); it; ++it)
        acc += std::abs(it.value());
      scale = std::max(scale, acc);
    }
    const double margin = scale > 0.0 ? lam / scale : 0.0;
    rep.search.emplace_back(C, margin);
    if (margin <= tol_rel) {
      rep.C_found = C;
      rep.worst_margin = margin;
      return rep;
    }
    if (C >= C_max)
      fail(ErrorCode::NoFiniteC, "no C <= C_max certifies the inequality");
    C = C == 0.0 ? 1.0 : 2.0 * C;
    if (C > C_max) C = C_max;
  }
}

}  // namespace scatter
