#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "radlab/grid.hpp"

namespace radlab {

// Quintic smoothstep transition: chi = 1 for t <= 1, 0 for t >= 2.
double chi(double t);
double chi_d1(double t);
double chi_d2(double t);

struct CutoffSpec {
  double r0 = 2.0;

  double eta(double r) const { return 1.0 - chi(2.0 * r / r0); }
  double eta_d1(double r) const { return -chi_d1(2.0 * r / r0) * 2.0 / r0; }
  double eta_d2(double r) const { return -chi_d2(2.0 * r / r0) * 4.0 / (r0 * r0); }
  double chi_n(double r, int n) const;
  double chi_bar_n(double r, int n) const { return 1.0 - chi_n(r, n); }
  double chi_mn(double r, int m, int n) const { return chi_bar_n(r, m) * chi_n(r, n); }
};

// Value with two derivatives. The s* fields carry the magnitude of the terms
// that were summed to form each entry, so a caller can tell an exact
// cancellation (|v| ~ eps * s0) from a genuinely small value.
struct Jet {
  double v = 0.0, d1 = 0.0, d2 = 0.0;
  double s0 = 0.0, s1 = 0.0, s2 = 0.0;

  static Jet exact(double v, double d1 = 0.0, double d2 = 0.0) {
    return {v, d1, d2, std::abs(v), std::abs(d1), std::abs(d2)};
  }
};

Jet operator+(const Jet& a, const Jet& b);
Jet operator*(double c, const Jet& a);

// Zero when |v| is below the roundoff level of its own summands.
double denoise(double v, double scale);

using JetFn = std::function<Jet(double)>;

// ln f and its first four derivatives; working with ln f keeps exponential
// warps finite far out on the end.
struct LogWarp {
  double l0 = 0.0, l1 = 0.0, l2 = 0.0, l3 = 0.0, l4 = 0.0;
};

enum class CrossSectionKind { point, circle, sphere, abstract };

struct CrossSection {
  CrossSectionKind kind = CrossSectionKind::point;
  // Only used for the abstract kind: (eigenvalue, multiplicity).
  std::vector<std::pair<double, int>> eigenvalues;
};

class WarpProfile {
 public:
  using LogFn = std::function<LogWarp(double)>;

  WarpProfile(int d, std::string name, LogFn fn);
  WarpProfile(int d, std::string name, LogFn fn, CrossSection cs);

  // f = r^theta
  static WarpProfile power(int d, double theta);
  // f = exp(delta r^theta), 0 < theta < 1
  static WarpProfile stretched_exp(int d, double delta, double theta);
  // f = C exp(kappa r + amp r^order); the amp term is the lower-order part.
  static WarpProfile exponential(int d, double C, double kappa, double amp = 0.0, double order = 0.0);
  // f = sinh(r)^2
  static WarpProfile sinh_squared(int d);
  static WarpProfile constant(int d, double c = 1.0);
  // ln f interpolated from (r, f) samples; derivatives by centered differences.
  static WarpProfile tabulated(int d, std::vector<double> r, std::vector<double> f);

  int dimension() const noexcept { return d_; }
  const std::string& name() const noexcept { return name_; }
  const CrossSection& cross_section() const noexcept { return cs_; }

  // Throws EvaluationError when any entry is non-finite.
  LogWarp log_warp(double r) const;
  double f(double r) const;

 private:
  int d_;
  std::string name_;
  LogFn fn_;
  CrossSection cs_;
};

struct GeometryPoint {
  double r = 0.0;
  double log_f = 0.0;
  double df_over_f = 0.0;   // f'/f
  double d2f_over_f = 0.0;  // f''/f
  double dr2 = 1.0;         // |dr|^2
  double lap_r = 0.0;       // Delta r
  double grad_lap_r = 0.0;  // nabla^r Delta r
  double hess_coeff = 0.0;  // nabla^2 r = hess_coeff * ell
  double eta = 0.0;
  double eta_tilde = 0.0;
  double q_geom = 0.0;      // (1/8) eta~ [(Delta r)^2 + 2 nabla^r Delta r]

  double f() const;
};

GeometryPoint geometry_at(const WarpProfile& profile, const CutoffSpec& cutoffs, double r);

// (1/8)[(Delta r)^2 + 2 (Delta r)'] with two derivatives. With cut = true the
// term is multiplied by eta, as in the effective potential; with cut = false
// it is the exact term produced by flattening the volume measure.
Jet geometric_term(const WarpProfile& profile, const CutoffSpec& cutoffs, double r, bool cut);

struct Potential {
  std::string name = "zero";
  JetFn fn;
  // Short-range potentials go into q22 of the standard split.
  bool short_range = false;

  static Potential zero();
  static Potential constant(double c);
  // c r^{-p}
  static Potential power(double c, double p);
  static Potential coulomb(double c) { return power(c, 1.0); }
  // -depth on [a, b], zero elsewhere; the value at a jump is the average.
  static Potential well(double depth, double a, double b);

  Jet operator()(double r) const { return fn ? fn(r) : Jet{}; }
};

struct PotentialSplit {
  JetFn V, q11, q12, q21, q22;

  Jet q1(double r) const;
  Jet q2(double r) const;

  // q11 = eta * geometric term + long-range V, q22 = short-range V.
  static PotentialSplit standard(const WarpProfile& profile, const CutoffSpec& cutoffs,
                                 const Potential& V);
};

// q = V + q_geom. Throws SplitMismatchError when q1 + q2 differs from q by
// more than tol * max(1, |q|).
double effective_potential(const WarpProfile& profile, const CutoffSpec& cutoffs,
                           const PotentialSplit& split, double r, double tol = 1e-10);

struct CriticalEnergy {
  double lambda0 = 0.0;
  double residual = 0.0;
  bool conclusive = true;
  std::vector<double> block_sups;  // sup{q1 : r >= 2^n} for n = 0, 1, ...
};

CriticalEnergy critical_energy(const PotentialSplit& split, double horizon = 16384.0,
                               double tol = 1e-6, int samples_per_block = 64);

enum class Direction { forward, backward };

// T(+t) psi (r) = (f(r+t)/f(r))^{(d-1)/4} psi(r+t); T(-t) is the adjoint,
// vanishing where r - t < 1. psi is an unreduced grid function.
GridFunction radial_translation(const WarpProfile& profile, const RadialGrid& grid,
                                const GridFunction& psi, double t, Direction direction);

// Norm in L^2(f^{(d-1)/2} dr) of an unreduced grid function.
double measure_norm(const WarpProfile& profile, const RadialGrid& grid, const GridFunction& phi);
cplx measure_inner(const WarpProfile& profile, const RadialGrid& grid, const GridFunction& phi,
                   const GridFunction& psi);

// Cubic interpolation through the four nearest nodes; zero outside [x_min, x_max].
cplx interpolate(const RadialGrid& grid, std::span<const cplx> values, double x);

}  // namespace radlab
