#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "scatter/errors.hpp"

namespace scatter {

using cplx = std::complex<double>;

enum class DomainKind : uint8_t {
  HalfLineDirichlet = 0,  // scattering space (0, r_max), field -> 0 at r = 0
  FullLinePeriodic = 1,   // reference space (-r_half, r_half), periodic wrap
};

// Uniform 1D grid.
//   half line: n interior nodes r_i = (i+1) h, h = r_max/(n+1); the Dirichlet
//     condition at r = 0 (and at the artificial far wall r_max) lives in the
//     3-point stencil, so the stored vector has no constrained entries.
//   full line: n nodes r_i = -r_half + i h, h = 2 r_half / n, period 2 r_half;
//     symmetric about 0 for even n.
struct Grid1D {
  DomainKind kind = DomainKind::HalfLineDirichlet;
  double r_min = 0.0;
  double r_max = 0.0;
  int n = 0;
  double h = 0.0;

  static Grid1D half_line(double r_max, int n);
  static Grid1D full_line(double r_half, int n);

  double r(int i) const {
    return kind == DomainKind::HalfLineDirichlet ? (i + 1) * h : r_min + i * h;
  }
  double length() const { return r_max - r_min; }
  bool same_as(const Grid1D& o) const {
    return kind == o.kind && n == o.n && r_min == o.r_min && r_max == o.r_max;
  }
};

// Complex state on grid x angular modes; column j holds mode m = j - M.
// Inner product carries the grid weight h (the circle modes e^{im theta}
// are orthonormal, so the mode sum needs no extra weight).
struct WaveField {
  Grid1D grid;
  int modes = 1;
  Eigen::MatrixXcd values;  // n x modes

  WaveField() = default;
  WaveField(const Grid1D& g, int modes_)
      : grid(g), modes(modes_), values(Eigen::MatrixXcd::Zero(g.n, modes_)) {}

  double norm() const { return std::sqrt(grid.h) * values.norm(); }
  double norm2() const { return grid.h * values.squaredNorm(); }

  WaveField& operator+=(const WaveField& o);
  WaveField& operator-=(const WaveField& o);
  WaveField& operator*=(cplx s);
};

cplx inner(const WaveField& a, const WaveField& b);
WaveField operator+(WaveField a, const WaveField& b);
WaveField operator-(WaveField a, const WaveField& b);
WaveField operator*(cplx s, WaveField a);

// Binary persistence: 16-byte header (8-byte magic "SCWF0001", u32 version,
// u8 domain kind, 3 reserved), then little-endian u64 n, u64 modes,
// f64 r_min, f64 r_max, then n x modes complex128 values row-major.
// Round-trips bit-exactly.
void save_field(const WaveField& u, const std::string& path);
WaveField load_field(const std::string& path);

}  // namespace scatter
