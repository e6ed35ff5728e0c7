#pragma once

#include <string>
#include <variant>
#include <vector>

#include "radlab/geometry.hpp"
#include "radlab/grid.hpp"

namespace radlab {

// One warped-product end over [1, inf) with Dirichlet wall at r = 1.
struct WarpedModel {
  WarpProfile profile;
  PotentialSplit split;
  CutoffSpec cutoffs;
  std::string potential_name = "zero";

  static WarpedModel make(WarpProfile profile, const Potential& V, CutoffSpec cutoffs = {});
};

// The real line with V = lambda1 on x <= -1 and V = lambda0 on x >= 1, cut to
// [-left, R_max] with Dirichlet walls. The escape function is r = x for
// x >= 2 and r = 1 for x <= 1; with two_sided it is r(|x|) so that both ends
// escape.
struct TwoEndLine {
  double lambda0 = 0.0;
  double lambda1 = 2.0;
  double left = 40.0;
  double r0 = 4.0;
  bool two_sided = false;

  double potential(double x) const;
  double potential_d1(double x) const;
  double escape(double x) const;
  double escape_d1(double x) const;
  double escape_d2(double x) const;
};

using Model = std::variant<WarpedModel, TwoEndLine>;

// Everything the discrete operators need at one node, in the reduced (flat
// measure) representation.
struct NodeSample {
  double x = 0.0;
  double r = 1.0;          // escape function
  double dr = 1.0;         // r'(x)
  double ddr = 0.0;        // r''(x)
  double V = 0.0;
  double geom = 0.0;       // exact (uncut) geometric term of the reduced operator
  double W = 0.0;          // V + geom
  double mode_coeff = 0.0; // 1/(2f); multiplies mu
  double half_lap = 0.0;   // (1/2) Delta r picked up by p^r in the reduced frame
  double lap_r = 0.0;
  double hess_ell = 0.0;   // f'/(2f): nabla^2 r on the sphere block
  double h_radial = 0.0;   // radial entry of nabla^2 r minus the |dr| correction
  double q1 = 0.0;
  double q11_d1 = 0.0;
};

NodeSample sample(const Model& model, double x);

int dimension(const Model& model);
double x_min(const Model& model);
double cutoff_r0(const Model& model);
std::string describe(const Model& model);

// Uniform grid on [x_min, r_max] carrying the model's escape function.
RadialGrid make_grid(const Model& model, double r_max, double h);
RadialGrid::Radius escape_function(const Model& model);

// q1 and its radial derivative as functions of r on the escaping end.
Jet q1_on_end(const Model& model, double r);
Jet q11_on_end(const Model& model, double r);

CriticalEnergy model_critical_energy(const Model& model, double horizon = 16384.0,
                                     double tol = 1e-6);

// Energies where the scan and the sweeps are not trusted (other critical
// energies of multi-end models).
std::vector<double> thresholds(const Model& model);

// lambda > lambda0 and outside a window around each threshold.
bool in_certified_window(const Model& model, double lambda, double lambda0,
                         double threshold_window = 0.05);

}  // namespace radlab
