#pragma once

#include <Eigen/Dense>
#include <functional>
#include <vector>

#include "scatter/grid.hpp"

namespace scatter {

// Momentum-space companion of a full-line WaveField.  Convention
//   u_hat(rho) = (2 pi)^{-1/2} integral e^{-i r rho} u(r) dr,
// discretized on rho_j = 2 pi j / (n h), j = -n/2 .. n/2-1 (ascending),
// so that Parseval h sum|u|^2 = drho sum|u_hat|^2 holds exactly.
struct SpectrumField {
  Grid1D source_grid;
  int modes = 1;
  double drho = 0.0;
  std::vector<double> rho;  // ascending
  Eigen::MatrixXcd values;  // n x modes

  double norm() const { return std::sqrt(drho) * values.norm(); }
  double norm2() const { return drho * values.squaredNorm(); }
};

// Unitary DFT pair; full-line grids only.
SpectrumField fourier(const WaveField& u);
WaveField inverse_fourier(const SpectrumField& s);

// Multiply u_hat by g(rho) and transform back: g(D_r) u.
WaveField momentum_multiplier(const WaveField& u,
                              const std::function<double(double)>& g);
WaveField momentum_multiplier_c(const WaveField& u,
                                const std::function<cplx(double)>& g);

}  // namespace scatter
