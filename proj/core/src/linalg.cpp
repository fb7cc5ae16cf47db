#include "scatter/linalg.hpp"

#ifdef SCATTERLAB_USE_LAPACKE
#define LAPACK_COMPLEX_CPP
#include <lapacke.h>
#endif

#include <Eigen/Eigenvalues>
#include <cmath>

namespace scatter {

EigResult hermitian_eig(const Eigen::MatrixXcd& H) {
  const int n = static_cast<int>(H.rows());
  if (H.cols() != n) fail(ErrorCode::DimensionMismatch, "square matrix required");
  if (n > 8192)
    fail(ErrorCode::SolverFail,
         "dense eigendecomposition limited to desk scale (dim <= 8192)");

  EigResult out;
#ifdef SCATTERLAB_USE_LAPACKE
  out.vectors = H;
  out.values.resize(n);
  const lapack_int info = LAPACKE_zheevd(
      LAPACK_COL_MAJOR, 'V', 'L', n,
      reinterpret_cast<lapack_complex_double*>(out.vectors.data()), n,
      out.values.data());
  if (info != 0) fail(ErrorCode::SolverFail, "zheevd failed");
#else
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H);
  if (es.info() != Eigen::Success) fail(ErrorCode::SolverFail, "eigensolver failed");
  out.values = es.eigenvalues();
  out.vectors = es.eigenvectors();
#endif
  return out;
}

Eigen::VectorXcd random_gaussian(int dim, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Eigen::VectorXcd v(dim);
  for (int i = 0; i < dim; ++i) {
    const double re = g(rng);
    const double im = g(rng);
    v(i) = cplx(re, im);
  }
  return v;
}

namespace {
std::pair<double, Eigen::VectorXcd> lanczos_impl(const MatVec& apply, int dim,
                                                 int iters, uint64_t seed,
                                                 bool want_vec) {
  std::mt19937_64 rng(seed);
  const int m = std::min(iters, dim);

  std::vector<Eigen::VectorXcd> basis;
  basis.reserve(m);
  Eigen::VectorXd alpha(m), beta(m);

  Eigen::VectorXcd v = random_gaussian(dim, rng);
  v /= v.norm();
  basis.push_back(v);

  int steps = 0;
  for (int j = 0; j < m; ++j) {
    Eigen::VectorXcd w = apply(basis[j]);
    const double a = std::real(basis[j].dot(w));
    alpha(j) = a;
    w -= a * basis[j];
    if (j > 0) w -= beta(j - 1) * basis[j - 1];
    // full reorthogonalization keeps the Ritz values clean at small m
    for (const auto& q : basis) w -= q.dot(w) * q;
    const double b = w.norm();
    steps = j + 1;
    if (b < 1e-13) break;
    beta(j) = b;
    if (j + 1 < m) basis.push_back(w / b);
  }

  Eigen::MatrixXd T = Eigen::MatrixXd::Zero(steps, steps);
  for (int j = 0; j < steps; ++j) {
    T(j, j) = alpha(j);
    if (j + 1 < steps) {
      T(j, j + 1) = beta(j);
      T(j + 1, j) = beta(j);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
  const int top = steps - 1;
  const double lam = es.eigenvalues()(top);

  Eigen::VectorXcd ritz;
  if (want_vec) {
    ritz = Eigen::VectorXcd::Zero(dim);
    for (int j = 0; j < static_cast<int>(basis.size()) && j < steps; ++j)
      ritz += es.eigenvectors()(j, top) * basis[j];
    ritz /= ritz.norm();
  }
  return {lam, ritz};
}
}  // namespace

double lanczos_max_eig(const MatVec& apply, int dim, int iters, uint64_t seed) {
  return lanczos_impl(apply, dim, iters, seed, false).first;
}

std::pair<double, Eigen::VectorXcd> lanczos_max_eig_vec(const MatVec& apply,
                                                        int dim, int iters,
                                                        uint64_t seed) {
  return lanczos_impl(apply, dim, iters, seed, true);
}

double operator_norm_power(const MatVec& apply, const MatVec& apply_adj, int dim,
                           int iters, double rel_tol, uint64_t seed) {
  std::mt19937_64 rng(seed);
  Eigen::VectorXcd v = random_gaussian(dim, rng);
  v /= v.norm();
  double sigma = 0.0;
  for (int it = 0; it < iters; ++it) {
    Eigen::VectorXcd w = apply(v);
    const double s = w.norm();
    if (s == 0.0) return 0.0;
    Eigen::VectorXcd u = apply_adj(w);
    const double un = u.norm();
    if (un == 0.0) return s;
    v = u / un;
    const double new_sigma = std::sqrt(un);
    if (it > 2 && std::abs(new_sigma - sigma) <= rel_tol * new_sigma) {
      sigma = new_sigma;
      break;
    }
    sigma = new_sigma;
  }
  return sigma;
}

int gram_schmidt(std::vector<Eigen::VectorXcd>& vs, double drop_tol) {
  int kept = 0;
  for (size_t i = 0; i < vs.size(); ++i) {
    Eigen::VectorXcd v = vs[i];
    for (int j = 0; j < kept; ++j) v -= vs[j].dot(v) * vs[j];
    // second pass for numerical safety
    for (int j = 0; j < kept; ++j) v -= vs[j].dot(v) * vs[j];
    const double n = v.norm();
    if (n > drop_tol) {
      vs[kept] = v / n;
      ++kept;
    }
  }
  vs.resize(kept);
  return kept;
}

}  // namespace scatter
