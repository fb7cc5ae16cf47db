#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>

#include "scatter/errors.hpp"

namespace scatter {

using cplx = std::complex<double>;

struct EigResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXcd vectors; // columns
};

// Dense Hermitian eigendecomposition (LAPACK zheevd when available).
// Desk-scale only; guarded at dim <= 8192.
EigResult hermitian_eig(const Eigen::MatrixXcd& H);

using MatVec = std::function<Eigen::VectorXcd(const Eigen::VectorXcd&)>;

// Largest eigenvalue of a Hermitian operator by Lanczos with full
// reorthogonalization; deterministic for a fixed seed.
double lanczos_max_eig(const MatVec& apply, int dim, int iters = 120,
                       uint64_t seed = 7);
// Largest eigenvalue together with a Ritz vector.
std::pair<double, Eigen::VectorXcd> lanczos_max_eig_vec(const MatVec& apply,
                                                        int dim, int iters = 120,
                                                        uint64_t seed = 7);

// ||M||_2 via power iteration on M* M given the two applications.
double operator_norm_power(const MatVec& apply, const MatVec& apply_adj, int dim,
                           int iters = 60, double rel_tol = 1e-4,
                           uint64_t seed = 11);

// Standard complex Gaussian vector (deterministic per seed sequence).
Eigen::VectorXcd random_gaussian(int dim, std::mt19937_64& rng);

// In-place modified Gram-Schmidt; drops columns below drop_tol and returns
// the retained count.
int gram_schmidt(std::vector<Eigen::VectorXcd>& vs, double drop_tol = 1e-10);

}  // namespace scatter
