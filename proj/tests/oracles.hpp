#pragma once

// Independent reference solutions used by the tests and the acceptance run.

#include <algorithm>
#include <cmath>
#include <functional>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "radlab/grid.hpp"

namespace radlab::oracle {

// (h - z)^{-1} psi for h = -(1/2) d^2/dr^2 on [1, inf), Dirichlet at 1, with
// G(r, r') = (2/k) sin(k(r_< - 1)) e^{ik(r_> - 1)}, k = sqrt(2z), Im k > 0.
// psi is supported in [a, b]; the integrals are constant outside it.
inline GridFunction free_half_line(const RadialGrid& grid, cplx z,
                                   const std::function<double(double)>& psi, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const cplx k = std::sqrt(2.0 * z);
  const cplx I{0.0, 1.0};
  // one 61-point rule per call; callers keep intervals at most a grid cell wide
  auto integrate = [&](auto f, double lo, double hi) {
    if (hi <= lo) return cplx{0.0, 0.0};
    const double re = GK::integrate([&](double t) { return f(t).real(); }, lo, hi, 0);
    const double im = GK::integrate([&](double t) { return f(t).imag(); }, lo, hi, 0);
    return cplx{re, im};
  };
  auto s = [&](double t) { return std::sin(k * (t - 1.0)) * psi(t); };
  auto e = [&](double t) { return std::exp(I * k * (t - 1.0)) * psi(t); };
  cplx S{0.0, 0.0}, E{0.0, 0.0};
  const int pieces = 256;
  for (int i = 0; i < pieces; ++i) {
    const double lo = a + (b - a) * i / pieces, hi = a + (b - a) * (i + 1) / pieces;
    S += integrate(s, lo, hi);
    E += integrate(e, lo, hi);
  }
  // running integrals over [a, r], accumulated cell by cell
  cplx As{0.0, 0.0}, Ae{0.0, 0.0};
  double last = a;
  GridFunction out(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.x(j);
    cplx A, B;
    if (r <= a) {
      A = 0.0;
      B = E;
    } else if (r >= b) {
      A = S;
      B = 0.0;
    } else {
      As += integrate(s, last, r);
      Ae += integrate(e, last, r);
      last = r;
      A = As;
      B = E - Ae;
    }
    out[j] = (2.0 / k) * (std::exp(I * k * (r - 1.0)) * A + std::sin(k * (r - 1.0)) * B);
  }
  return out;
}

inline double relative_l2(const RadialGrid& grid, const GridFunction& u, const GridFunction& ref) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    num += std::norm(u[j] - ref[j]) * grid.weight(j);
    den += std::norm(ref[j]) * grid.weight(j);
  }
  return std::sqrt(num / den);
}

// Bound state of -(1/2) u'' - depth 1_[1,2] u = E u on [1, inf), Dirichlet at
// 1: the root of k_in cos k_in + kappa sin k_in = 0 with k_in = sqrt(2(E +
// depth)), kappa = sqrt(-2E), found by bisection; lowest root in (-depth, 0).
inline double square_well_ground_state(double depth) {
  auto F = [&](double E) {
    const double ki = std::sqrt(2.0 * (E + depth)), ka = std::sqrt(-2.0 * E);
    return ki * std::cos(ki) + ka * std::sin(ki);
  };
  const double step = depth * 1e-4;
  for (double lo = -depth + step; lo < -step; lo += step) {
    double hi = lo + step;
    if (F(lo) * F(hi) > 0.0) continue;
    double l = lo;
    for (int i = 0; i < 200; ++i) {
      const double m = 0.5 * (l + hi);
      (F(l) * F(m) <= 0.0 ? hi : l) = m;
    }
    return 0.5 * (l + hi);
  }
  return std::nan("");
}

}  // namespace radlab::oracle
