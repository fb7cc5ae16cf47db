#include "scatter/operators.hpp"

#include <cmath>
#include <map>

namespace scatter {

namespace {

using Sink = std::function<void(int, int, cplx)>;

// Both assembly paths accumulate entries in the identical emission order:
// an ordered map keyed by (row, col) for the sparse path, direct += for the
// dense path.  Per entry the floating-point sum sequence is the same, so
// sparse and dense results agree exactly.
struct SparseAccum {
  std::map<std::pair<int, int>, cplx> entries;
  Sink sink() {
    return [this](int r, int c, cplx v) { entries[{r, c}] += v; };
  }
  Eigen::SparseMatrix<cplx> matrix(int dim) const {
    std::vector<Eigen::Triplet<cplx>> trips;
    trips.reserve(entries.size());
    for (const auto& [rc, v] : entries) trips.emplace_back(rc.first, rc.second, v);
    Eigen::SparseMatrix<cplx> m(dim, dim);
    m.setFromTriplets(trips.begin(), trips.end());
    return m;
  }
};

struct DenseAccum {
  Eigen::MatrixXcd m;
  explicit DenseAccum(int dim) : m(Eigen::MatrixXcd::Zero(dim, dim)) {}
  Sink sink() {
    return [this](int r, int c, cplx v) { m(r, c) += v; };
  }
};

struct Stencil {
  const Grid1D& g;
  int modes;

  int idx(int i, int col) const { return i * modes + col; }

  // neighbor index with Dirichlet truncation / periodic wrap; -1 = dropped
  int nb(int i, int step) const {
    int j = i + step;
    if (g.kind == DomainKind::FullLinePeriodic) {
      j %= g.n;
      if (j < 0) j += g.n;
      return j;
    }
    return (j < 0 || j >= g.n) ? -1 : j;
  }
};

// D_r^2 three-point stencil rows into one mode column.
void emit_Dr2(const Stencil& st, int col, const Sink& add) {
  const double h2 = st.g.h * st.g.h;
  for (int i = 0; i < st.g.n; ++i) {
    add(st.idx(i, col), st.idx(i, col), 2.0 / h2);
    for (int s : {-1, +1}) {
      const int j = st.nb(i, s);
      if (j >= 0) add(st.idx(i, col), st.idx(j, col), -1.0 / h2);
    }
  }
}

// first-derivative factor of D_r = -i d/dr (centered)
cplx dr_entry(double h, int step) { return cplx(0.0, step > 0 ? -1.0 : 1.0) / (2.0 * h); }

void emit_Dr(const Stencil& st, int col, const Sink& add) {
  for (int i = 0; i < st.g.n; ++i)
    for (int s : {-1, +1}) {
      const int j = st.nb(i, s);
      if (j >= 0) add(st.idx(i, col), st.idx(j, col), dr_entry(st.g.h, s));
    }
}

// (w D_r + D_r w)/2 with w given at nodes
void emit_symmetrized_drift(const Stencil& st, int col,
                            const std::function<double(double)>& w,
                            const Sink& add) {
  for (int i = 0; i < st.g.n; ++i)
    for (int s : {-1, +1}) {
      const int j = st.nb(i, s);
      if (j < 0) continue;
      const double wij = 0.5 * (w(st.g.r(i)) + w(st.g.r(j)));
      add(st.idx(i, col), st.idx(j, col), dr_entry(st.g.h, s) * wij);
    }
}

// conservative D_r w D_r with midpoint fluxes (3-point form)
void emit_flux_form(const Stencil& st, int col,
                    const std::function<double(double)>& w, const Sink& add) {
  const double h2 = st.g.h * st.g.h;
  for (int i = 0; i < st.g.n; ++i) {
    const double wp = w(st.g.r(i) + 0.5 * st.g.h);
    const double wm = w(st.g.r(i) - 0.5 * st.g.h);
    add(st.idx(i, col), st.idx(i, col), (wp + wm) / h2);
    const int jp = st.nb(i, +1);
    const int jm = st.nb(i, -1);
    if (jp >= 0) add(st.idx(i, col), st.idx(jp, col), -wp / h2);
    if (jm >= 0) add(st.idx(i, col), st.idx(jm, col), -wm / h2);
  }
}

double abs_r(const Grid1D& g, int i) { return std::abs(g.r(i)); }

void check_half_line(const Grid1D& g, const char* who) {
  if (g.kind != DomainKind::HalfLineDirichlet)
    fail(ErrorCode::GridMismatch, std::string(who) + " needs a half-line grid");
}

void emit_L0(const Grid1D& g, const ScalingFunction& k, const CrossSection& cs,
             const Sink& add) {
  const Stencil st{g, cs.n_modes()};
  for (int col = 0; col < cs.n_modes(); ++col) {
    const int m = cs.mode_of_column(col);
    emit_Dr2(st, col, add);
    if (m != 0)
      for (int i = 0; i < g.n; ++i)
        add(st.idx(i, col), st.idx(i, col), k.value(g.r(i)) * double(m) * m);
  }
}

void guard_L0(const Grid1D& g, const ScalingFunction& k, const CrossSection& cs) {
  check_half_line(g, "assemble_L0");
  if (cs.mode_cutoff == 0) return;
  // resolution guard on the angular channel scale over the end r >= 1
  // (below r = 1 the clipped k sits behind the cutoff-dead zone)
  double kmax = 0.0;
  for (int i = 0; i < g.n; ++i)
    if (g.r(i) >= 1.0) kmax = std::max(kmax, k.value(g.r(i)));
  const double scale = kmax * cs.mode_cutoff * cs.mode_cutoff;
  if (g.h * g.h * scale > 0.1)
    fail(ErrorCode::GridTooCoarse,
         "h^2 * k_max * M^2 = " + std::to_string(g.h * g.h * scale) + " > 0.1");
}

void emit_E(const Grid1D& g, const PerturbationCoeffs& co, const CrossSection& cs,
            const ScalingFunction& k, const Sink& add) {
  const Stencil st{g, cs.n_modes()};
  const int n = g.n;

  auto sqrtk = [&k](double r) { return std::sqrt(k.value(r)); };

  // combined a1 = a1L(r) + a1S(r,theta) Fourier data
  auto a1_mode = [&](int p, double r) -> cplx {
    cplx v = co.a1S.zero() ? cplx(0.0) : co.a1S.fourier_mode(p) * co.a1S.profile.value(r);
    if (p == 0) v += co.a1L.value(r);
    return v;
  };
  auto coeff_mode = [](const Coefficient& c, int p, double r) -> cplx {
    return c.zero() ? cplx(0.0) : c.fourier_mode(p) * c.profile.value(r);
  };

  for (int col = 0; col < st.modes; ++col) {
    const int m = cs.mode_of_column(col);
    for (int colp = 0; colp < st.modes; ++colp) {
      const int mp = cs.mode_of_column(colp);
      const int p = m - mp;

      // V
      if (!co.V.zero() && std::abs(p) <= co.V.max_theta_mode()) {
        const cplx w = co.V.fourier_mode(p);
        if (w != cplx(0.0))
          for (int i = 0; i < n; ++i)
            add(st.idx(i, col), st.idx(i, colp), w * co.V.profile.value(g.r(i)));
      }

      // b1 D_r + D_r b1
      if (!co.b1.zero() && std::abs(p) <= co.b1.max_theta_mode()) {
        const cplx w = co.b1.fourier_mode(p);
        if (w != cplx(0.0))
          for (int i = 0; i < n; ++i)
            for (int s : {-1, +1}) {
              const int j = st.nb(i, s);
              if (j < 0) continue;
              const cplx b = w * (co.b1.profile.value(g.r(i)) +
                                  co.b1.profile.value(g.r(j)));
              add(st.idx(i, col), st.idx(j, colp), dr_entry(g.h, s) * b);
            }
      }

      // b2 sqrt(k) Dth + Dth sqrt(k) b2   (diagonal in r)
      if (!co.b2.zero() && std::abs(p) <= co.b2.max_theta_mode()) {
        const cplx w = co.b2.fourier_mode(p);
        if (w != cplx(0.0) && (m + mp) != 0)
          for (int i = 0; i < n; ++i) {
            const double r = g.r(i);
            add(st.idx(i, col), st.idx(i, colp),
                w * co.b2.profile.value(r) * sqrtk(r) * double(m + mp));
          }
      }

      // D_r a1 D_r  (node sandwich: quadratic form sums a1(r_j)|D_r u(r_j)|^2)
      {
        const int a1_maxmode = co.a1S.zero() ? 0 : co.a1S.max_theta_mode();
        const bool a1_active = !co.a1S.zero() || !co.a1L.zero();
        if (a1_active && std::abs(p) <= a1_maxmode) {
          for (int i = 0; i < n; ++i)
            for (int s1 : {-1, +1}) {
              const int j = st.nb(i, s1);
              if (j < 0) continue;
              const cplx aj = a1_mode(p, g.r(j));
              if (aj == cplx(0.0)) continue;
              for (int s2 : {-1, +1}) {
                const int l = st.nb(j, s2);
                if (l < 0) continue;
                add(st.idx(i, col), st.idx(l, colp),
                    dr_entry(g.h, s1) * aj * dr_entry(g.h, s2));
              }
            }
        }
      }

      // D_r a2 sqrt(k) Dth + Dth sqrt(k) a2 D_r
      if (!co.a2.zero() && std::abs(p) <= co.a2.max_theta_mode()) {
        const cplx w = co.a2.fourier_mode(p);
        if (w != cplx(0.0))
          for (int i = 0; i < n; ++i)
            for (int s : {-1, +1}) {
              const int j = st.nb(i, s);
              if (j < 0) continue;
              const double ri = g.r(i), rj = g.r(j);
              const cplx val =
                  w * (co.a2.profile.value(rj) * sqrtk(rj) * double(mp) +
                       co.a2.profile.value(ri) * sqrtk(ri) * double(m));
              add(st.idx(i, col), st.idx(j, colp), dr_entry(g.h, s) * val);
            }
      }

      // sqrt(k) Dth a3 sqrt(k) Dth   (diagonal in r)
      if (!co.a3.zero() && std::abs(p) <= co.a3.max_theta_mode()) {
        const cplx w = co.a3.fourier_mode(p);
        if (w != cplx(0.0) && m != 0 && mp != 0)
          for (int i = 0; i < n; ++i) {
            const double r = g.r(i);
            add(st.idx(i, col), st.idx(i, colp),
                w * co.a3.profile.value(r) * k.value(r) * double(m) * double(mp));
          }
      }
    }
  }
}

void guard_E(const Grid1D& g, const PerturbationCoeffs& co, const CrossSection& cs) {
  check_half_line(g, "assemble_E");
  const int M = cs.mode_cutoff;
  auto check = [&](const Coefficient& c, const char* name) {
    if (c.zero()) return;
    if (c.max_theta_mode() > M)
      fail(ErrorCode::DimensionMismatch,
           std::string(name) + " theta modes exceed cross-section cutoff");
    if (!c.hermitian_symmetric())
      fail(ErrorCode::NonHermitianCoeffs,
           std::string(name) + " Fourier data is not Hermitian-symmetric");
  };
  check(co.V, "V");
  check(co.a1S, "a1S");
  check(co.a2, "a2");
  check(co.a3, "a3");
  check(co.b1, "b1");
  check(co.b2, "b2");
}

void emit_A(const Grid1D& g, const CutoffSpec& cut, int modes, const Sink& add) {
  const Stencil st{g, modes};
  auto w = [&cut](double r) {
    const double c = cut.chi_R(r);
    return c * c * r;
  };
  for (int col = 0; col < modes; ++col) emit_symmetrized_drift(st, col, w, add);
}

void emit_M(const Grid1D& g, const CutoffSpec& cut, int modes, const Sink& add) {
  const Stencil st{g, modes};
  auto w = [&cut](double r) { return cut.chi_R(r); };
  for (int col = 0; col < modes; ++col) emit_symmetrized_drift(st, col, w, add);
}

void emit_reference(const Grid1D& g, const ScalingFunction& k,
                    const CrossSection& cs, ReferenceKind kind,
                    const RadialProfile& a1L, const Sink& add) {
  const Stencil st{g, cs.n_modes()};
  for (int col = 0; col < cs.n_modes(); ++col) {
    const int m = cs.mode_of_column(col);
    if (kind == ReferenceKind::HL) {
      auto w = [&a1L](double r) { return 1.0 + a1L.value(std::abs(r)); };
      emit_flux_form(st, col, w, add);
    } else {
      emit_Dr2(st, col, add);
    }
    if (kind != ReferenceKind::H0 && m != 0)
      for (int i = 0; i < g.n; ++i)
        add(st.idx(i, col), st.idx(i, col),
            k.value(abs_r(g, i)) * double(m) * m);
  }
}

void guard_reference(const Grid1D& g, const ScalingFunction& k,
                     ReferenceKind kind) {
  if (g.kind != DomainKind::FullLinePeriodic)
    fail(ErrorCode::GridMismatch, "assemble_reference needs a full-line grid");
  if (kind == ReferenceKind::H0) return;
  const double edge = std::max(std::abs(g.r_min), std::abs(g.r_max));
  if (k.value(edge) > 1e-10)
    fail(ErrorCode::GridTooSmall,
         "k tail at the fold is " + std::to_string(k.value(edge)) + " > 1e-10");
}

DiscreteOperator finish(const Grid1D& g, int modes, SparseAccum& acc,
                        bool hermitian) {
  DiscreteOperator op;
  op.grid = g;
  op.modes = modes;
  op.mat = acc.matrix(g.n * modes);
  op.hermitian = hermitian;
  return op;
}

}  // namespace

WaveField DiscreteOperator::apply(const WaveField& u) const {
  if (!u.grid.same_as(grid) || u.modes != modes)
    fail(ErrorCode::DimensionMismatch, "operator/field shape mismatch");
  return unflatten(grid, modes, mat * flatten(u));
}

double DiscreteOperator::hermiticity_defect() const {
  Eigen::SparseMatrix<cplx> adj = mat.adjoint();
  Eigen::SparseMatrix<cplx> diff = mat - adj;
  double d = 0.0;
  for (int k = 0; k < diff.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(diff, k); it; ++it)
      d = std::max(d, std::abs(it.value()));
  return d;
}

double DiscreteOperator::gershgorin_bound() const {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(mat.rows());
  for (int k = 0; k < mat.outerSize(); ++k)
    for (Eigen::SparseMatrix<cplx>::InnerIterator it(mat, k); it; ++it)
      row_sums(it.row()) += std::abs(it.value());
  return row_sums.maxCoeff();
}

Eigen::VectorXcd flatten(const WaveField& u) {
  Eigen::VectorXcd x(u.grid.n * u.modes);
  for (int i = 0; i < u.grid.n; ++i)
    for (int c = 0; c < u.modes; ++c) x(i * u.modes + c) = u.values(i, c);
  return x;
}

WaveField unflatten(const Grid1D& g, int modes, const Eigen::VectorXcd& x) {
  WaveField u(g, modes);
  for (int i = 0; i < g.n; ++i)
    for (int c = 0; c < modes; ++c) u.values(i, c) = x(i * modes + c);
  return u;
}

DiscreteOperator assemble_L0(const Grid1D& g, const ScalingFunction& k,
                             const CrossSection& cs) {
  guard_L0(g, k, cs);
  SparseAccum acc;
  auto sink = acc.sink();
  emit_L0(g, k, cs, sink);
  return finish(g, cs.n_modes(), acc, true);
}

Eigen::MatrixXcd assemble_L0_dense(const Grid1D& g, const ScalingFunction& k,
                                   const CrossSection& cs) {
  guard_L0(g, k, cs);
  DenseAccum acc(g.n * cs.n_modes());
  auto sink = acc.sink();
  emit_L0(g, k, cs, sink);
  return acc.m;
}

DiscreteOperator assemble_E(const Grid1D& g, const PerturbationCoeffs& co,
                            const CrossSection& cs, const ScalingFunction& k) {
  guard_E(g, co, cs);
  SparseAccum acc;
  auto sink = acc.sink();
  emit_E(g, co, cs, k, sink);
  return finish(g, cs.n_modes(), acc, true);
}

Eigen::MatrixXcd assemble_E_dense(const Grid1D& g, const PerturbationCoeffs& co,
                                  const CrossSection& cs,
                                  const ScalingFunction& k) {
  guard_E(g, co, cs);
  DenseAccum acc(g.n * cs.n_modes());
  auto sink = acc.sink();
  emit_E(g, co, cs, k, sink);
  return acc.m;
}

DiscreteOperator assemble_A(const Grid1D& g, const CutoffSpec& cut, int modes) {
  check_half_line(g, "assemble_A");
  if (cut.R < 2.0 * g.h) fail(ErrorCode::GridTooCoarse, "need R >= 2h");
  SparseAccum acc;
  auto sink = acc.sink();
  emit_A(g, cut, modes, sink);
  return finish(g, modes, acc, true);
}

Eigen::MatrixXcd assemble_A_dense(const Grid1D& g, const CutoffSpec& cut,
                                  int modes) {
  DenseAccum acc(g.n * modes);
  auto sink = acc.sink();
  emit_A(g, cut, modes, sink);
  return acc.m;
}

DiscreteOperator assemble_M(const Grid1D& g, const CutoffSpec& cut, int modes) {
  check_half_line(g, "assemble_M");
  SparseAccum acc;
  auto sink = acc.sink();
  emit_M(g, cut, modes, sink);
  return finish(g, modes, acc, true);
}

Eigen::MatrixXcd assemble_M_dense(const Grid1D& g, const CutoffSpec& cut,
                                  int modes) {
  DenseAccum acc(g.n * modes);
  auto sink = acc.sink();
  emit_M(g, cut, modes, sink);
  return acc.m;
}

DiscreteOperator assemble_Dr(const Grid1D& g, int modes) {
  SparseAccum acc;
  auto sink = acc.sink();
  const Stencil st{g, modes};
  for (int col = 0; col < modes; ++col) emit_Dr(st, col, sink);
  return finish(g, modes, acc, true);
}

DiscreteOperator commutator_iLA(const DiscreteOperator& L,
                                const DiscreteOperator& A) {
  if (L.dim() != A.dim() || !L.grid.same_as(A.grid) || L.modes != A.modes)
    fail(ErrorCode::DimensionMismatch, "commutator operands disagree");
  DiscreteOperator op;
  op.grid = L.grid;
  op.modes = L.modes;
  const cplx i_unit(0.0, 1.0);
  Eigen::SparseMatrix<cplx> la = L.mat * A.mat;
  Eigen::SparseMatrix<cplx> al = A.mat * L.mat;
  op.mat = i_unit * (la - al);
  op.hermitian = L.hermitian && A.hermitian;
  return op;
}

DiscreteOperator assemble_reference(const Grid1D& g, const ScalingFunction& k,
                                    const CrossSection& cs, ReferenceKind kind,
                                    const RadialProfile& a1L) {
  guard_reference(g, k, kind);
  SparseAccum acc;
  auto sink = acc.sink();
  emit_reference(g, k, cs, kind, a1L, sink);
  return finish(g, cs.n_modes(), acc, true);
}

Eigen::MatrixXcd assemble_reference_dense(const Grid1D& g,
                                          const ScalingFunction& k,
                                          const CrossSection& cs,
                                          ReferenceKind kind,
                                          const RadialProfile& a1L) {
  guard_reference(g, k, kind);
  DenseAccum acc(g.n * cs.n_modes());
  auto sink = acc.sink();
  emit_reference(g, k, cs, kind, a1L, sink);
  return acc.m;
}

}  // namespace scatter
