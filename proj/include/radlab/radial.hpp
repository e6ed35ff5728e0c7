#pragma once

#include <complex>
#include <span>
#include <utility>
#include <vector>

#include "radlab/geometry.hpp"
#include "radlab/grid.hpp"
#include "radlab/model.hpp"

namespace radlab {

struct Mode {
  double mu = 0.0;
  int multiplicity = 1;
};

struct ModeSpectrum {
  std::vector<Mode> modes;
  double cap = 0.0;
};

// Laplace eigenvalues of the cross-section up to cap. d is the manifold
// dimension, so the sphere is S^{d-1}.
ModeSpectrum mode_spectrum(const CrossSection& cs, int d, double cap);

enum class OuterPolicy { dirichlet, outgoing };

struct AssemblyOptions {
  double ppw_min = 10.0;
  // Throw ResolutionError below ppw_min; otherwise only record it.
  bool strict_resolution = true;
};

// h_mu - z on the unknown nodes. Node 0 of the grid is the Dirichlet wall;
// unknowns are nodes 1..M-1 (outer Dirichlet) or 1..M (outgoing). The
// outgoing row imposes u' = i c u at the last node through a ghost value and
// is scaled by 1/2 so the matrix stays complex symmetric.
class RadialOperator {
 public:
  double mu = 0.0;
  cplx z{0.0, 0.0};
  OuterPolicy policy = OuterPolicy::dirichlet;
  cplx outgoing_coeff{0.0, 0.0};
  double h = 0.0;
  double points_per_wavelength = 0.0;
  std::size_t first = 1;
  std::vector<cplx> lower, diag, upper;
  std::vector<double> potential;  // W + mu/(2f) at the unknown nodes

  std::size_t size() const noexcept { return diag.size(); }
  bool symmetric() const;
  // Right-hand side for a grid function psi (last row scaled for outgoing).
  std::vector<cplx> rhs(const GridFunction& psi) const;
  // (h_mu - z) applied to grid values, returned on the grid (zero at walls);
  // the outgoing row is reported unscaled.
  GridFunction apply(const GridFunction& phi) const;
};

RadialOperator assemble_radial_operator(const Model& model, const RadialGrid& grid, double mu,
                                        cplx z, OuterPolicy policy, cplx outgoing_coeff = {},
                                        const AssemblyOptions& options = {});
RadialOperator assemble_radial_operator(std::span<const NodeSample> samples,
                                        const RadialGrid& grid, double mu, cplx z,
                                        OuterPolicy policy, cplx outgoing_coeff = {},
                                        const AssemblyOptions& options = {});

struct BesovProfile {
  std::vector<double> annulus_norms;  // ||F_nu phi||
  std::vector<double> measure;        // quadrature measure of each annulus
  bool outer_partial = false;

  double b_norm() const;
  double b_star_norm() const;
  // R_nu^{-1/2} ||F_nu phi||
  std::vector<double> decay_profile() const;
  double l2_norm() const;

  // Annulus norms of a multi-mode function: per-mode norms added in
  // quadrature, each mode counted with its multiplicity.
  static BesovProfile combine(const std::vector<std::pair<BesovProfile, int>>& parts);
};

BesovProfile besov_norms(const RadialGrid& grid, const GridFunction& phi);

struct DecayVerdict {
  double slope = 0.0;       // fitted d log p / d log R over the last annuli
  double tail_ratio = 0.0;  // last profile value over the profile maximum
  bool decays = false;
};

// B*_0 decay test on the last `last` annuli that are at least half covered.
// Decays when the profile falls at least like R^{-1/4} or has dropped below
// tail_floor relative to its maximum.
DecayVerdict profile_decay(const BesovProfile& profile, int last = 3, double tail_floor = 1e-2);

// ||r^s phi|| by quadrature, accumulated in log space.
double weighted_norm(const RadialGrid& grid, const GridFunction& phi, double s);
double weighted_log_norm(const RadialGrid& grid, const GridFunction& phi, double s);

// Samples of the model at every grid node (parallel kernel).
std::vector<NodeSample> sample_grid(const Model& model, const RadialGrid& grid);

// Reduced-representation operators used by the sweeps.
GridFunction apply_pr(const RadialGrid& grid, std::span<const NodeSample> samples,
                      const GridFunction& u);
GridFunction apply_H0(const RadialGrid& grid, std::span<const NodeSample> samples, double mu,
                      const GridFunction& u);

// <p_i^* h^{ij} p_j>_phi for one mode with h = nabla^2 r + 2 C r^{-1-tau} g
// (minus the |dr| correction on line models), optionally weighted by
// r^{2 beta} and a per-node factor. C is raised to h_form_constant when the
// requested value would leave h indefinite.
struct HFormSpec {
  double C = 1.0;
  double tau = 1.0;
  double beta = 0.0;
};
double h_form(const RadialGrid& grid, std::span<const NodeSample> samples, double mu,
              const GridFunction& u, const HFormSpec& spec, std::span<const double> extra = {});

// Smallest C making the h-tensor nonnegative on the grid (at least spec.C).
double h_form_constant(std::span<const NodeSample> samples, const HFormSpec& spec);

}  // namespace radlab
