#include <doctest.h>

#include <cmath>

#include "radlab/error.hpp"
#include "radlab/experiments.hpp"

using namespace radlab;

namespace {

Model free_line() { return WarpedModel::make(WarpProfile::constant(1), Potential::zero()); }

const std::vector<double> kDecade{0.1, 0.01, 0.001};

}  // namespace

TEST_CASE("bump: smooth, compact, peak 1 at the midpoint") {
  const auto b = bump(2.0, 4.0);
  CHECK(b(3.0) == doctest::Approx(1.0));
  CHECK(b(2.0) == 0.0);
  CHECK(b(4.0) == 0.0);
  CHECK(b(1.0) == 0.0);
  CHECK(std::abs(modulated_bump(2.0, 4.0, 3.0)(2.7)) == doctest::Approx(b(2.7)));
}

TEST_CASE("lap sweep on the free half-line is bounded across the decade") {
  SweepOptions o;
  o.r_max = 128.0;
  o.h = 0.02;
  const SweepTable t = lap_sweep(free_line(), 1.0, kDecade, bump(2.0, 3.0), o);
  CHECK(t.verdict == Verdict::pass);
  CHECK(t.summary.at("max_ratio") <= 2.0);
  REQUIRE(t.rows.size() == 3);
  for (const auto& r : t.rows) {
    for (double v : r.values) CHECK(v >= 0.0);
    CHECK(r.reference > 0.0);
  }
}

TEST_CASE("lap sweep below the critical energy is refused") {
  const Model m = WarpedModel::make(WarpProfile::exponential(2, 1.0, 2.0), Potential::zero());
  CHECK_THROWS_AS(lap_sweep(m, 0.05, kDecade, bump(2.0, 3.0)), ContractError);
  const Model well = WarpedModel::make(WarpProfile::constant(1), Potential::well(5.0, 1.0, 2.0));
  CHECK_THROWS_AS(lap_sweep(well, -2.3120970432, kDecade, bump(2.0, 3.0)), ContractError);
}

TEST_CASE("radiation sweep at beta = 0 agrees with the lap sweep on the h-form") {
  SweepOptions o;
  o.r_max = 128.0;
  const auto psi = bump(2.0, 3.0);
  const SweepTable lap = lap_sweep(free_line(), 2.0, {0.1, 0.01}, psi, o);
  const SweepTable rad = radiation_sweep(free_line(), 2.0, {0.1, 0.01}, {0.0}, psi, 1.0, o);
  const int hl = lap.value_index("h_form"), hr = rad.value_index("h_form");
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(rad.rows[i].values[static_cast<std::size_t>(hr)] ==
          doctest::Approx(lap.rows[i].values[static_cast<std::size_t>(hl)]).epsilon(1e-10));
  }
}

TEST_CASE("radiation sweep separates the outgoing from the incoming sign") {
  SweepOptions o;
  o.r_max = 256.0;
  o.complex_source = modulated_bump(2.0, 10.0, 2.0);
  const SweepTable t = radiation_sweep(free_line(), 2.0, kDecade, {0.0, 0.5}, bump(2.0, 10.0), 4.0, o);
  CHECK(t.verdict == Verdict::pass);
  const int right = t.value_index("radiation_bstar"), wrong = t.value_index("wrong_sign_bstar");
  for (const auto& r : t.rows) {
    CHECK(r.values[static_cast<std::size_t>(wrong)] > 10.0 * r.values[static_cast<std::size_t>(right)]);
  }
}

TEST_CASE("radiation rows at or above beta_c are flagged and do not vote") {
  SweepOptions o;
  o.r_max = 128.0;
  const SweepTable t = radiation_sweep(free_line(), 1.0, {0.1, 0.01}, {0.0, 0.7}, bump(2.0, 3.0), 0.5, o);
  for (const auto& r : t.rows) CHECK((r.params[2] >= 0.5) == (r.flag == "outside-theorem"));
}

TEST_CASE("gamma below the shift floor marks rows unreliable") {
  SweepOptions o;
  o.r_max = 64.0;
  o.method = Method::shift;
  o.solver.enforce_shift_guard = false;
  const SweepTable t = lap_sweep(free_line(), 1.0, {0.5, 0.01}, bump(2.0, 3.0), o);
  CHECK(t.rows[0].reliable);
  CHECK_FALSE(t.rows[1].reliable);
  CHECK(t.rows[1].flag == "unreliable");
}

TEST_CASE("verdicts are a function of the rows") {
  SweepTable t;
  t.param_names = {"lambda", "gamma"};
  t.value_names = {"a", "b"};
  t.rows = {{{1.0, 0.1}, {1.0, 0.0}}, {{1.0, 0.01}, {1.5, 0.0}}, {{1.0, 0.001}, {1.9, 0.0}}};
  apply_verdicts(t);
  CHECK(t.verdict == Verdict::pass);
  CHECK(t.summary["max_ratio"] == doctest::Approx(1.9));
  t.rows[2].values[0] = 2.5;
  apply_verdicts(t);
  CHECK(t.verdict == Verdict::fail);
  t.rows[2].reliable = false;
  apply_verdicts(t);
  CHECK(t.verdict == Verdict::pass);
  CHECK(t.rows[2].verdict == Verdict::inconclusive);
  // a column that is zero only in some rows cannot be bounded
  t.rows[1].values[1] = 1.0;
  apply_verdicts(t);
  CHECK(t.verdict == Verdict::fail);
}

TEST_CASE("hoelder fit: exact power law recovered, poor fit inconclusive") {
  SweepTable t;
  t.rule = VerdictRule::hoelder_fit;
  t.param_names = {"lambda", "gap"};
  t.value_names = {"diff"};
  t.settings = {{"predicted", 1.0 / 3.0}, {"slack", 0.1}};
  for (double g : {0.2, 0.1, 0.05, 0.025}) t.rows.push_back({{1.0, g}, {3.0 * std::pow(g, 0.5)}});
  apply_verdicts(t);
  CHECK(t.summary["epsilon_emp"] == doctest::Approx(0.5));
  CHECK(t.verdict == Verdict::pass);
  t.rows[1].values[0] = 10.0;
  t.rows[2].values[0] = 0.01;
  apply_verdicts(t);
  CHECK(t.verdict == Verdict::inconclusive);
}

TEST_CASE("probe sources: deterministic, one per annulus") {
  const auto a = probe_sources(8, 42, 1024.0);
  const auto b = probe_sources(8, 42, 1024.0);
  const auto c = probe_sources(8, 43, 1024.0);
  REQUIRE(a.size() == 8);
  bool differs = false;
  for (int nu = 0; nu < 8; ++nu) {
    const double lo = std::ldexp(1.0, nu), hi = 2 * lo;
    for (double x = lo; x < hi; x += lo / 64) {
      CHECK(a[static_cast<std::size_t>(nu)](x) == b[static_cast<std::size_t>(nu)](x));
      differs = differs || a[static_cast<std::size_t>(nu)](x) != c[static_cast<std::size_t>(nu)](x);
    }
    CHECK(a[static_cast<std::size_t>(nu)](hi + 0.5) == 0.0);
  }
  CHECK(differs);
  CHECK_THROWS_AS(probe_sources(8, 1, 100.0), ContractError);
}

TEST_CASE("hoelder estimate on the free model") {
  HoelderOptions ho;
  ho.sweep.r_max = 2048.0;
  ho.sweep.h = 0.05;
  const SweepTable t = hoelder_estimate(free_line(), 1.0, 1.0, {0.2, 0.1, 0.05, 0.025, 0.0125}, ho);
  CHECK(t.verdict == Verdict::pass);
  CHECK(t.summary.at("epsilon_emp") >= 1.0 / 3.0 - 0.1);
  CHECK_THROWS_AS(hoelder_estimate(free_line(), 1.0, 0.5, {0.1, 0.05, 0.025}, ho), ContractError);
}

TEST_CASE("same spectral point twice gives a zero difference") {
  const Model m = free_line();
  SweepOptions o;
  o.r_max = 64.0;
  const RadialGrid grid = make_grid(m, 64.0, o.h);
  const auto samples = sample_grid(m, grid);
  const auto psi = [](double x) { return cplx{bump(2.0, 3.0)(x), 0.0}; };
  const ModalState a = solve_modes(m, grid, samples, {1.0, 0.01}, psi, o);
  const ModalState b = solve_modes(m, grid, samples, {1.0, 0.01}, psi, o);
  GridFunction d(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) d[j] = a.u[0][j] - b.u[0][j];
  CHECK(weighted_norm(grid, d, -1.0) == 0.0);
}

TEST_CASE("comparison is symmetric and zero on equal inputs") {
  const RadialGrid g = RadialGrid::uniform(1.0, 30.0, 0.05);
  const GridFunction u = sample_function(g, [](double x) { return std::exp(cplx{0.0, x}); });
  const GridFunction v = sample_function(g, [](double x) { return cplx{1.0 / x, 0.0}; });
  const auto ab = compare_functions(g, u, v, 1.0), ba = compare_functions(g, v, u, 1.0);
  CHECK(ab.discrepancy_hs == ba.discrepancy_hs);
  CHECK(ab.discrepancy_bstar == ba.discrepancy_bstar);
  CHECK(ab.relative_hs == ba.relative_hs);
  CHECK(compare_functions(g, u, u, 1.0).discrepancy_hs == 0.0);
}

TEST_CASE("Sommerfeld: psi = 0 gives zero discrepancy") {
  const ComparisonReport rep = sommerfeld_compare(free_line(), 2.0, [](double) { return 0.0; });
  CHECK(rep.discrepancy_hs == 0.0);
  CHECK(rep.discrepancy_bstar == 0.0);
  CHECK(rep.verdict == Verdict::pass);
}

TEST_CASE("energy check: psi = 0 gives zero on both sides") {
  EnergyOptions eo;
  eo.sweep.r_max = 64.0;
  const SweepTable t =
      besov_energy_check(free_line(), 1.0, [](double) { return 0.0; }, 0.5, {0, 1}, {0.1, 0.01}, eo);
  for (const auto& r : t.rows) {
    CHECK(r.values[0] == 0.0);
    CHECK(r.values[1] == 0.0);
  }
}

TEST_CASE("energy check: uniform constant on the free model") {
  EnergyOptions eo;
  eo.sweep.r_max = 256.0;
  const SweepTable t =
      besov_energy_check(free_line(), 1.0, bump(2.0, 3.0), 0.5, {0, 2, 4, 6}, kDecade, eo);
  CHECK(t.verdict == Verdict::pass);
  CHECK(t.summary.at("n") >= 0.0);
  CHECK(t.summary.at("spread") <= 2.0);
}
