#pragma once

#include <memory>
#include <vector>

#include "scatter/diagnostics.hpp"
#include "scatter/oscpdo.hpp"
#include "scatter/propagate.hpp"

namespace scatter {

// Identification operator between the reference space and the target space.
class Identifier {
 public:
  virtual ~Identifier() = default;
  virtual WaveField forward(const WaveField& u) const = 0;
  virtual WaveField adjoint(const WaveField& v) const = 0;
};

// Identity on a shared space (one-space scattering).
class IdentityIdentifier : public Identifier {
 public:
  WaveField forward(const WaveField& u) const override { return u; }
  WaveField adjoint(const WaveField& v) const override { return v; }
};

// (J u)(r) = chi(r) u(r) transplanted from the full-line grid onto the
// half-line grid (shared spacing, nodes aligned); J* goes back.
class CutoffIdentifier : public Identifier {
 public:
  CutoffIdentifier(Grid1D full, Grid1D half, int modes, CutoffSpec cutoff);

  WaveField forward(const WaveField& u) const override;
  WaveField adjoint(const WaveField& v) const override;

  const Grid1D& full_grid() const { return full_; }
  const Grid1D& half_grid() const { return half_; }

 private:
  Grid1D full_, half_;
  int modes_ = 1;
  CutoffSpec cutoff_;
};

// Swaps forward and adjoint (drives the adjoint wave operator limits).
class AdjointIdentifier : public Identifier {
 public:
  explicit AdjointIdentifier(const Identifier& base) : base_(base) {}
  WaveField forward(const WaveField& u) const override { return base_.adjoint(u); }
  WaveField adjoint(const WaveField& v) const override { return base_.forward(v); }

 private:
  const Identifier& base_;
};

// J composed with the long-range modifier J^pm: per angular mode m the
// channel operator for eigenvalue lambda = m^2 acts on that mode column.
class ModifiedIdentifier : public Identifier {
 public:
  ModifiedIdentifier(std::shared_ptr<const CutoffIdentifier> embed,
                     std::vector<ChannelIdentifier> per_abs_mode);

  WaveField forward(const WaveField& u) const override;
  WaveField adjoint(const WaveField& v) const override;

  const ChannelIdentifier& channel(int abs_m) const {
    return per_abs_mode_.at(abs_m);
  }

 private:
  std::shared_ptr<const CutoffIdentifier> embed_;
  std::vector<ChannelIdentifier> per_abs_mode_;  // index |m|
};

// Channel modifiers J_lambda^pm for lambda = m^2, m = 0..M, with the phase
// built from (k -> lambda k, a1L); iteration depth from
// nu = min(nu_k, nu_a1L) over the active long-range parts.  Channels whose
// long-range data vanishes (or decays integrably) get a zero phase.
ModifiedIdentifier make_modified_identifier(
    std::shared_ptr<const CutoffIdentifier> embed, const ScalingFunction& k,
    const RadialProfile& a1L, const CrossSection& cs, const CutoffSpec& cutoffs,
    const SpectralWindow& window, int sign, double onset_R);

// Aligned half/full grid pair sharing the spacing h, so the transplant is a
// node-to-node map.
struct TwoSpaceGrids {
  Grid1D half;
  Grid1D full;
};
TwoSpaceGrids make_two_space_grids(double h, double r_max_half,
                                   double r_half_full);

// --------------------------------------------------------------------------

enum class Direction { Plus = +1, Minus = -1 };

struct CookOptions {
  double T_max = 200.0;
  double sample_dt = 1.0;
  double tail_tol_rel = 1e-3;  // stop when fitted tail < tol * ||u||
  int fit_points = 12;
  double t_min_fit = 8.0;
};

struct CookResult {
  WaveField w;
  double T_used = 0.0;
  std::vector<std::pair<double, double>> integrand_samples;  // (t, value)
  double tail_estimate = 0.0;
  double fitted_exponent = 0.0;
  bool converged = false;
};

// Cook evaluation of W^pm(H, H0; J) u: samples the integrand
// ||(H J - J H0) e^{-+ i t H0} u|| until its fitted power-law tail certifies
// the stopping rule, then returns w = e^{+- i T H} J e^{-+ i T H0} u.
// A fitted exponent >= -1 is reported as converged = false (long-range
// obstruction), not as an exception.
CookResult cook_wave_operator(const Hamiltonian& H, const Hamiltonian& H0,
                              const Identifier& J, const WaveField& u,
                              Direction dir, const CookOptions& opts = {});

// Same contract with the modified identifier J J^pm.
CookResult modified_wave_operator(const Hamiltonian& L, const Hamiltonian& H0,
                                  const ModifiedIdentifier& JJpm,
                                  const WaveField& u, Direction dir,
                                  const CookOptions& opts = {});

double isometry_defect(const CookResult& result, const WaveField& u);

// || W(L,H0;J) u - W(L,L0) W(L0,H0;J) u ||
double chain_rule_check(const Hamiltonian& L, const Hamiltonian& L0,
                        const Hamiltonian& H0, const Identifier& J,
                        const WaveField& u, const CookOptions& opts = {});

struct CompletenessReport {
  double mean_ratio = 0.0;
  std::vector<double> ratios;
  std::vector<bool> member_converged;
};

// Adjoint wave-operator probe of completeness: for an orthonormal ensemble
// of window-filtered random states v in E_Lambda(L)H, the limits
// e^{+- i t H0} J^* e^{-+ i t L} v should preserve the squared norm.
// Throws NonAdmissible when the window contains a localized eigenvalue.
CompletenessReport completeness_probe(const SparseHamiltonian& L,
                                      const Hamiltonian& H0,
                                      const Identifier& J,
                                      const SpectralWindow& window,
                                      int ensemble_size, uint64_t seed,
                                      const CookOptions& opts = {});

}  // namespace scatter
