#include <doctest.h>

#include <cmath>

#include "radlab/error.hpp"
#include "radlab/phase.hpp"

using namespace radlab;

namespace {

Model euclid2() { return WarpedModel::make(WarpProfile::power(2, 2.0), Potential::zero()); }
Model free_line() { return WarpedModel::make(WarpProfile::constant(1), Potential::zero()); }

}  // namespace

TEST_CASE("free model: a = sqrt(2z) exactly") {
  const Model m = free_line();
  for (cplx z : {cplx{1.0, 0.1}, cplx{2.0, 0.0}, cplx{0.3, 0.5}}) {
    for (double x : {3.0, 10.0, 50.0}) {
      const cplx a = phase_value(m, z, 1, 2.0, x);
      CHECK(std::abs(a - std::sqrt(2.0 * z)) < 1e-12);
    }
  }
}

TEST_CASE("d = 2 Euclidean: phase against the closed form in long double") {
  const Model m = euclid2();
  const double z = 2.0;
  for (double r : {8.0, 30.0, 200.0}) {
    const long double q = -1.0L / (8.0L * r * r), dq = 1.0L / (4.0L * r * r * r);
    const long double re = std::sqrt(2.0L * (z - q));
    const long double im = -0.25L * dq / (z - q);
    const cplx a = phase_value(m, {z, 0.0}, 1, 2.0, r);
    CHECK(a.real() == doctest::Approx(static_cast<double>(re)).epsilon(1e-12));
    CHECK(a.imag() == doctest::Approx(static_cast<double>(im)).epsilon(1e-9));
  }
}

TEST_CASE("branch conjugation: a(conj z, -) = conj a(z, +)") {
  const Model m = euclid2();
  for (cplx z : {cplx{1.0, 0.2}, cplx{3.0, 0.01}}) {
    for (double r : {4.0, 17.0}) {
      const cplx up = phase_value(m, z, 1, 2.0, r);
      const cplx down = phase_value(m, std::conj(z), -1, 2.0, r);
      CHECK(std::abs(down - std::conj(up)) < 1e-13 * std::abs(up));
    }
  }
}

TEST_CASE("principal branch: Re a >= 0 and BranchError on the cut") {
  const Model m = free_line();
  CHECK(phase_value(m, {1.0, -0.3}, 1, 2.0, 5.0).real() >= 0.0);
  CHECK_THROWS_AS(phase_value(m, {-1.0, 0.0}, 1, 2.0, 5.0), BranchError);
}

TEST_CASE("r_lambda sits at r0 for the free model and grows as lambda -> lambda0") {
  const Model m = euclid2();
  CHECK(r_lambda(free_line(), 1.0, 0.0) == doctest::Approx(2.0));
  CHECK(r_lambda(m, 0.001, 0.0) >= r_lambda(m, 1.0, 0.0));
}

TEST_CASE("Riccati residual: corrected phase decays faster than the plain root") {
  const Model m = euclid2();
  const RadialGrid grid = make_grid(m, 2048.0, 0.05);
  const PhaseSpec with = phase_a(m, {2.0, 0.0}, 1, grid, 0.0, true);
  const PhaseSpec without = phase_a(m, {2.0, 0.0}, 1, grid, 0.0, false);
  const auto rw = riccati_residual(with, m, grid, 20.48, 2048.0);
  const auto rn = riccati_residual(without, m, grid, 20.48, 2048.0);
  REQUIRE(rw.reliable);
  REQUIRE(rn.reliable);
  CHECK(rw.exponent <= -3.8);
  CHECK(rn.exponent == doctest::Approx(-3.0).epsilon(0.05));
  CHECK(rn.exponent > rw.exponent);
}

TEST_CASE("exact Riccati solution satisfies the equation and is outgoing") {
  const Model m = euclid2();
  const RadialGrid grid = make_grid(m, 200.0, 0.05);
  const cplx z{2.0, 0.05};
  const RiccatiSolution sol = riccati_exact(m, z, 1, grid, 0.0);
  REQUIRE(sol.a.size() == grid.size());
  // residual of the exact a is limited by the finite-difference derivative only
  const auto res = riccati_residual(sol.x, sol.a, z, 1, m, 20.0, 150.0);
  double worst = 0.0;
  for (double v : res.residual) worst = std::max(worst, v);
  CHECK(worst < 1e-3);
  const cplx approx = phase_value(m, z, 1, 2.0, 150.0);
  const std::size_t j = static_cast<std::size_t>((150.0 - grid.x_min()) / 0.05 + 0.5);
  CHECK(std::abs(sol.a[j] - approx) < 1e-3);
}

TEST_CASE("apply_A on the outgoing plane wave gives a phi") {
  const Model m = free_line();
  const RadialGrid grid = make_grid(m, 100.0, 0.005);
  const double k = 1.5;
  const GridFunction u = sample_function(grid, [&](double x) { return std::exp(cplx{0.0, k * x}); });
  const GridFunction Au = apply_A(m, grid, u, Representation::reduced);
  for (std::size_t j = 10; j + 10 < grid.size(); j += 997) {
    CHECK(std::abs(Au[j] - k * u[j]) < 1e-4);
  }
}

TEST_CASE("apply_A checks the representation tag") {
  const Model m = free_line();
  const RadialGrid grid = make_grid(m, 10.0, 0.1);
  const GridFunction u(grid.size(), Representation::unreduced);
  CHECK_THROWS_AS(apply_A(m, grid, u, Representation::reduced), ContractError);
}
