#include <doctest.h>

#include <cmath>

#include "radlab/error.hpp"
#include "radlab/geometry.hpp"
#include "radlab/model.hpp"

using namespace radlab;

TEST_CASE("chi is a smooth step from 1 to 0 on [1, 2]") {
  CHECK(chi(0.5) == 1.0);
  CHECK(chi(1.0) == 1.0);
  CHECK(chi(2.0) == 0.0);
  CHECK(chi(3.0) == 0.0);
  double prev = 1.0;
  for (double t = 1.0; t <= 2.0; t += 0.01) {
    CHECK(chi(t) <= prev + 1e-15);
    prev = chi(t);
  }
  CHECK(chi_d1(1.0) == doctest::Approx(0.0));
  CHECK(chi_d1(2.0) == doctest::Approx(0.0));
  const double t = 1.37, e = 1e-6;
  CHECK(chi_d1(t) == doctest::Approx((chi(t + e) - chi(t - e)) / (2 * e)).epsilon(1e-6));
  CHECK(chi_d2(t) == doctest::Approx((chi_d1(t + e) - chi_d1(t - e)) / (2 * e)).epsilon(1e-5));
}

TEST_CASE("cutoffs: eta vanishes near the wall, chi_n localizes") {
  const CutoffSpec c{2.0};
  CHECK(c.eta(1.0) == 0.0);
  CHECK(c.eta(2.0) == 1.0);
  CHECK(c.eta(10.0) == 1.0);
  CHECK(c.chi_n(1.0, 3) == 1.0);
  CHECK(c.chi_n(1000.0, 3) == 0.0);
  CHECK(c.chi_mn(1.0, 2, 5) == 0.0);
  CHECK(c.chi_mn(1000.0, 2, 5) == 0.0);
}

TEST_CASE("warped-product formulas on Euclidean space") {
  for (int d : {2, 3, 4}) {
    const auto prof = WarpProfile::power(d, 2.0);
    for (double r : {3.0, 10.0, 100.0}) {
      const GeometryPoint g = geometry_at(prof, CutoffSpec{}, r);
      CHECK(g.f() == doctest::Approx(r * r));
      CHECK(g.dr2 == 1.0);
      CHECK(g.lap_r == doctest::Approx((d - 1) / r));
      // nabla^2 r = (f'/2f) ell with ell = f h the induced block metric
      CHECK(g.hess_coeff == doctest::Approx(1.0 / r));
    }
  }
}

TEST_CASE("geometric term: zero in d = 3, -1/(8 r^2) in d = 2") {
  const CutoffSpec c{};
  for (double r : {4.0, 16.0, 300.0}) {
    CHECK(geometric_term(WarpProfile::power(3, 2.0), c, r, true).v == doctest::Approx(0.0));
    CHECK(geometric_term(WarpProfile::power(2, 2.0), c, r, true).v ==
          doctest::Approx(-1.0 / (8 * r * r)));
  }
}

TEST_CASE("hyperbolic-type warp: critical energy (d-1)^2 kappa^2 / 32") {
  for (int d : {2, 3})
    for (double k : {1.0, 2.0}) {
      const auto split =
          PotentialSplit::standard(WarpProfile::exponential(d, 1.0, k), CutoffSpec{}, Potential::zero());
      const CriticalEnergy ce = critical_energy(split);
      CHECK(ce.lambda0 == doctest::Approx((d - 1) * (d - 1) * k * k / 32.0).epsilon(1e-8));
      CHECK(ce.conclusive);
    }
}

TEST_CASE("critical energy of power warps is zero") {
  for (double theta : {1.0, 2.0}) {
    const auto split =
        PotentialSplit::standard(WarpProfile::power(2, theta), CutoffSpec{}, Potential::zero());
    CHECK(std::abs(critical_energy(split).lambda0) < 1e-6);
  }
}

TEST_CASE("potential split reproduces q") {
  const auto prof = WarpProfile::power(3, 1.0);
  const CutoffSpec c{};
  const auto split = PotentialSplit::standard(prof, c, Potential::coulomb(-1.0));
  for (double r : {1.5, 3.0, 40.0}) {
    const double q = effective_potential(prof, c, split, r);
    CHECK(q == doctest::Approx(split.q1(r).v + split.q2(r).v));
  }
}

TEST_CASE("square well takes the average at its jumps") {
  const Potential w = Potential::well(5.0, 1.0, 2.0);
  CHECK(w(1.5).v == -5.0);
  CHECK(w(1.0).v == -2.5);
  CHECK(w(2.0).v == -2.5);
  CHECK(w(3.0).v == 0.0);
}

TEST_CASE("tabulated warp reproduces the closed form") {
  std::vector<double> r, f;
  for (double x = 1.0; x <= 60.0; x += 0.05) {
    r.push_back(x);
    f.push_back(x * x);
  }
  const auto tab = WarpProfile::tabulated(3, r, f);
  const auto exact = WarpProfile::power(3, 2.0);
  for (double x : {5.0, 20.0, 50.0}) {
    const LogWarp a = tab.log_warp(x), b = exact.log_warp(x);
    CHECK(a.l0 == doctest::Approx(b.l0).epsilon(1e-8));
    CHECK(a.l1 == doctest::Approx(b.l1).epsilon(1e-4));
  }
}

TEST_CASE("non-finite geometry raises EvaluationError") {
  const auto prof = WarpProfile::power(2, 1.0);
  CHECK_THROWS_AS(prof.log_warp(0.0), EvaluationError);
}

TEST_CASE("radial translation is unitary and T(-t) is its adjoint") {
  const auto prof = WarpProfile::power(3, 2.0);
  const RadialGrid grid = RadialGrid::uniform(1.0, 40.0, 0.01);
  auto bumpf = [](double c) {
    return [c](double x) {
      const double t = (x - c) / 2.0;
      return cplx{std::abs(t) < 1 ? std::exp(1 - 1 / (1 - t * t)) : 0.0, 0.0};
    };
  };
  const GridFunction psi = sample_function(grid, bumpf(15.0), Representation::unreduced);
  const GridFunction phi = sample_function(grid, bumpf(18.0), Representation::unreduced);
  const double t = 3.0;
  const GridFunction Tpsi = radial_translation(prof, grid, psi, t, Direction::forward);
  CHECK(measure_norm(prof, grid, Tpsi) == doctest::Approx(measure_norm(prof, grid, psi)).epsilon(1e-6));
  const cplx lhs = measure_inner(prof, grid, Tpsi, phi);
  const cplx rhs = measure_inner(prof, grid, psi, radial_translation(prof, grid, phi, t, Direction::backward));
  CHECK(std::abs(lhs - rhs) <= 1e-6 * std::abs(lhs));
}
