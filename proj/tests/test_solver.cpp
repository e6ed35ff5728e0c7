#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "radlab/error.hpp"
#include "radlab/experiments.hpp"
#include "radlab/solver.hpp"

using namespace radlab;

namespace {

Model free_line() { return WarpedModel::make(WarpProfile::constant(1), Potential::zero()); }

}  // namespace

TEST_CASE("outgoing solve matches the analytic Green's function, second order in h") {
  const Model m = free_line();
  const cplx z{1.0, 0.1};
  const auto psi = bump(2.0, 3.0);
  double prev = 0.0;
  for (double h : {0.02, 0.01}) {
    const RadialGrid g = make_grid(m, 64.0, h);
    const GridFunction src = sample_function(g, [&](double x) { return cplx{psi(x), 0.0}; });
    const auto sol = resolve_outgoing(m, g, 0.0, z.real(), 1, src, z.imag());
    const double err = oracle::relative_l2(g, sol.phi, oracle::free_half_line(g, z, psi, 2.0, 3.0));
    CHECK(err < 1e-3);
    if (prev > 0.0) CHECK(std::log2(prev / err) == doctest::Approx(2.0).epsilon(0.15));
    prev = err;
  }
}

TEST_CASE("Dirichlet shift solve: small residual and report") {
  const Model m = WarpedModel::make(WarpProfile::power(3, 2.0), Potential::zero());
  const RadialGrid g = make_grid(m, 100.0, 0.02);
  const GridFunction src = sample_function(g, [](double x) { return cplx{bump(2.0, 5.0)(x), 0.0}; });
  const RadialOperator op = assemble_radial_operator(m, g, 0.0, {1.0, 0.5}, OuterPolicy::dirichlet);
  const auto sol = resolve(op, g, src);
  CHECK(sol.report.backward_error < 1e-12);
  CHECK(sol.report.rcond > 0.0);
  CHECK(sol.residual < 1e-9);
  CHECK(sol.phi[0] == cplx{0.0, 0.0});
}

TEST_CASE("shift guard: too small Gamma on a short box is refused") {
  const Model m = free_line();
  const RadialGrid g = make_grid(m, 20.0, 0.02);
  const GridFunction src(g.size());
  const RadialOperator op = assemble_radial_operator(m, g, 0.0, {1.0, 1e-4}, OuterPolicy::dirichlet);
  CHECK_THROWS_AS(resolve(op, g, src), ContractError);
}

TEST_CASE("resolve_outgoing below lambda0 is a contract violation") {
  const Model m = WarpedModel::make(WarpProfile::exponential(2, 1.0, 2.0), Potential::zero());
  const RadialGrid g = make_grid(m, 40.0, 0.01);
  const GridFunction src(g.size());
  CHECK_THROWS_AS(resolve_outgoing(m, g, 0.0, 0.05, 1, src), ContractError);
}

TEST_CASE("sturm count agrees with the computed eigenvalues") {
  const Model m = WarpedModel::make(WarpProfile::constant(1), Potential::well(5.0, 1.0, 2.0));
  const RadialGrid g = make_grid(m, 32.0, 0.02);
  const auto ev = dirichlet_eigenvalues(m, 0.0, g, 0, 4);
  REQUIRE(ev.size() == 5);
  const RadialOperator op = assemble_radial_operator(m, g, 0.0, {0.0, 0.0}, OuterPolicy::dirichlet);
  std::vector<double> d, e;
  for (std::size_t i = 0; i < op.size(); ++i) d.push_back(op.diag[i].real());
  for (std::size_t i = 0; i + 1 < op.size(); ++i) e.push_back(op.upper[i].real());
  for (std::size_t i = 0; i < ev.size(); ++i) {
    CHECK(sturm_count(d, e, ev[i] - 1e-9) == static_cast<int>(i));
    CHECK(sturm_count(d, e, ev[i] + 1e-9) == static_cast<int>(i) + 1);
  }
}

TEST_CASE("eigen_scan: square-well bound state matches the transcendental root") {
  const Model m = WarpedModel::make(WarpProfile::constant(1), Potential::well(5.0, 1.0, 2.0));
  const RadialGrid g = make_grid(m, 64.0, 0.01);
  const EigenScanResult res = eigen_scan(m, 0.0, g, -5.0, 0.0);
  REQUIRE(res.entries.size() >= 1);
  const auto& e = res.entries.front();
  CHECK_FALSE(e.artifact);
  CHECK(e.decay.decays);
  CHECK(std::abs(e.refined - oracle::square_well_ground_state(5.0)) < 1e-6);
}

TEST_CASE("eigen_scan: every state above zero is a truncation artifact") {
  const Model m = WarpedModel::make(WarpProfile::constant(1), Potential::well(5.0, 1.0, 2.0));
  const RadialGrid g = make_grid(m, 64.0, 0.01);
  const EigenScanResult res = eigen_scan(m, 0.0, g, 0.0, 2.0);
  REQUIRE(!res.entries.empty());
  for (const auto& e : res.entries) CHECK(e.artifact);
}
