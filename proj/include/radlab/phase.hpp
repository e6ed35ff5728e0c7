#pragma once

#include <complex>
#include <optional>
#include <span>
#include <vector>

#include "radlab/fit.hpp"
#include "radlab/grid.hpp"
#include "radlab/model.hpp"

namespace radlab {

// Smallest R in {r0} u {2^n > r0} with lambda + lambda0 - 2 q1 >= 0 for all
// sampled r >= R/2 (up to the horizon). Throws HorizonError if none.
double r_lambda(const Model& model, double lambda, double lambda0, double horizon = 16384.0);

struct PhaseSpec {
  cplx z{0.0, 0.0};
  int sign = 1;
  double r_lambda = 2.0;
  bool corrected = true;
  std::vector<double> x;
  std::vector<double> eta;
  std::vector<cplx> a;
};

// a = eta_lambda [ |dr| sqrt(2(z - q1 - extra)) +- (1/4) (p^r q11) / (z - q1 - extra) ]
// at one node; `extra` adds a mode term to q1. Principal square root
// (Re >= 0). Throws BranchError when z - q1 lies on (-inf, 0] where
// eta_lambda > 0.
cplx phase_value(const Model& model, cplx z, int sign, double r_lam, double x,
                 bool corrected = true, double extra = 0.0);

PhaseSpec phase_a(const Model& model, cplx z, int sign, const RadialGrid& grid, double lambda0,
                  bool corrected = true);

struct RiccatiResidual {
  std::vector<double> r;
  std::vector<double> residual;
  LinearFit fit;
  double exponent = 0.0;
  bool reliable = false;
};

// |+-p^r a + a^2 - 2|dr|^2 (z - q1)| at interior nodes; power-law fit over
// [fit_lo, fit_hi].
RiccatiResidual riccati_residual(const PhaseSpec& phase, const Model& model,
                                 const RadialGrid& grid, double fit_lo, double fit_hi);
RiccatiResidual riccati_residual(std::span<const double> x, std::span<const cplx> a, cplx z,
                                 int sign, const Model& model, double fit_lo, double fit_hi);

struct RiccatiOptions {
  bool adaptive = true;
  double rtol = 1e-10;
  double atol = 1e-14;
  double step = 0.01;  // fixed-step mode
};

struct RiccatiSolution {
  cplx z{0.0, 0.0};
  int sign = 1;
  std::vector<double> x;
  std::vector<cplx> b, db, a;
};

// Integrates b'' = -2|dr|^2 (z - q1) b inward from the last grid node with
// b = 1, b' = +-i a, and returns a = -+i b'/b at every node.
RiccatiSolution riccati_exact(const Model& model, cplx z, int sign, const RadialGrid& grid,
                              double lambda0, const RiccatiOptions& options = {});

// A = p^r - (i/2) Delta r. On reduced functions this is the symmetrized
// -i (r' d/dx + r''/2); on unreduced ones -i r' d/dx - (i/2) Delta r.
GridFunction apply_A(const RadialGrid& grid, std::span<const NodeSample> samples,
                     const GridFunction& phi,
                     std::optional<Representation> expected = std::nullopt);
GridFunction apply_A(const Model& model, const RadialGrid& grid, const GridFunction& phi,
                     std::optional<Representation> expected = std::nullopt);

}  // namespace radlab
