#pragma once

#include <complex>
#include <span>
#include <vector>

#include "radlab/radial.hpp"

namespace radlab {

// Complex tridiagonal LU with partial pivoting (LAPACK gttrf/gttrs) plus a
// 1-norm condition estimate and the observed pivot growth.
class TridiagonalLU {
 public:
  TridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag,
                std::span<const cplx> upper);

  std::vector<cplx> solve(std::span<const cplx> b) const;
  double rcond() const noexcept { return rcond_; }
  double pivot_growth() const noexcept { return growth_; }
  double norm1() const noexcept { return anorm_; }

 private:
  std::vector<cplx> dl_, d_, du_, du2_;
  std::vector<int> ipiv_;
  double rcond_ = 0.0;
  double growth_ = 1.0;
  double anorm_ = 0.0;
};

enum class Method { shift, outgoing };

struct SolverOptions {
  double residual_tol = 1e-10;  // normwise backward error
  double rcond_min = 1e-12;
  double shift_guard = 8.0;     // Gamma (R_max - x_min) for the shift method
  bool enforce_shift_guard = true;
};

struct SolveReport {
  double backward_error = 0.0;
  double rcond = 0.0;
  double pivot_growth = 1.0;
  int refinements = 0;
};

struct ResolventSolution {
  double mu = 0.0;
  cplx z{0.0, 0.0};
  Method method = Method::shift;
  GridFunction phi;
  double residual = 0.0;  // ||(h_mu - z) phi - psi|| on the unknown rows
  SolveReport report;
};

ResolventSolution resolve(const RadialOperator& op, const RadialGrid& grid,
                          const GridFunction& psi, const SolverOptions& options = {});

// Outgoing (sign = +1) or incoming (sign = -1) boundary row at the outer edge
// with the phase a evaluated there. lambda is real unless gamma > 0 is given,
// in which case z = lambda + sign i gamma and the row uses a at that z.
ResolventSolution resolve_outgoing(const Model& model, const RadialGrid& grid, double mu,
                                   double lambda, int sign, const GridFunction& psi,
                                   double gamma = 0.0, const SolverOptions& options = {},
                                   const AssemblyOptions& assembly = {});

struct EigenEntry {
  double value = 0.0;
  int index = 0;          // position in the full discrete spectrum
  double refined = 0.0;   // Richardson value over h, h/2, h/4 (genuine states)
  double drift = 0.0;     // |E_index(R) - E_index(2R)|
  DecayVerdict decay;
  bool artifact = false;
  bool near_threshold = false;
  BesovProfile profile;
};

struct EigenScanResult {
  double lo = 0.0, hi = 0.0;
  double lambda0 = 0.0;
  std::vector<EigenEntry> entries;
};

struct EigenScanOptions {
  double tol = 1e-6;
  bool refine = true;
  double threshold_window = 0.05;
  double lambda0 = 0.0;
};

// Dirichlet-truncated eigenvalues in (lo, hi] with their B*_0 verdicts.
EigenScanResult eigen_scan(const Model& model, double mu, const RadialGrid& grid, double lo,
                           double hi, const EigenScanOptions& options = {});

// Number of eigenvalues below x of the symmetric tridiagonal (d, e).
int sturm_count(std::span<const double> d, std::span<const double> e, double x);

// Eigenvalues with 0-based indices [il, iu] of the Dirichlet problem.
std::vector<double> dirichlet_eigenvalues(const Model& model, double mu, const RadialGrid& grid,
                                          int il, int iu);

}  // namespace radlab
