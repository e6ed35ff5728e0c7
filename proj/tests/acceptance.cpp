// One pass/fail line per acceptance criterion; exit status 0 iff all pass.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>

#include "invariants.hpp"
#include "oracles.hpp"
#include "radlab/conditions.hpp"
#include "radlab/experiments.hpp"
#include "radlab/phase.hpp"
#include "radlab/solver.hpp"

using namespace radlab;

namespace {

struct Result {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

Model free_line() { return WarpedModel::make(WarpProfile::constant(1), Potential::zero()); }

Result resolvent_oracle() {
  const Model m = free_line();
  const cplx z{1.0, 0.1};
  const auto psi = bump(2.0, 3.0);
  double err[2] = {0.0, 0.0};
  const double hs[2] = {0.02, 0.01};
  for (int i = 0; i < 2; ++i) {
    const RadialGrid g = make_grid(m, 64.0, hs[i]);
    const GridFunction src = sample_function(g, [&](double x) { return cplx{psi(x), 0.0}; });
    const auto sol = resolve_outgoing(m, g, 0.0, z.real(), 1, src, z.imag());
    err[i] = oracle::relative_l2(g, sol.phi, oracle::free_half_line(g, z, psi, 2.0, 3.0));
  }
  const double order = std::log2(err[0] / err[1]);
  return {err[1] < 1e-3 && std::abs(order - 2.0) <= 0.3,
          "relative L2 error " + fmt("%.3e", err[1]) + " at h=0.01, order " + fmt("%.3f", order)};
}

Result critical_energies() {
  double worst = 0.0;
  for (double theta : {1.0, 2.0})
    for (int d : {2, 3})
      worst = std::max(worst, std::abs(model_critical_energy(
                                  WarpedModel::make(WarpProfile::power(d, theta), Potential::zero()))
                                  .lambda0));
  for (int d : {2, 3})
    for (double k : {1.0, 2.0}) {
      const double l0 = model_critical_energy(
                            WarpedModel::make(WarpProfile::exponential(d, 1.0, k), Potential::zero()))
                            .lambda0;
      worst = std::max(worst, std::abs(l0 - (d - 1) * (d - 1) * k * k / 32.0));
    }
  return {worst <= 1e-6, "max |lambda0 - exact| = " + fmt("%.2e", worst) + " over 8 warps"};
}

Result condition_constants() {
  bool ok = true;
  std::string detail;
  for (auto [d, theta] : {std::pair{2, 1.0}, std::pair{3, 1.0}, std::pair{2, 2.0}, std::pair{3, 2.0}}) {
    const ConditionReport rep =
        check_conditions(WarpedModel::make(WarpProfile::power(d, theta), Potential::zero()));
    bool rows = true;
    for (const auto& r : rep.rows) rows = rows && r.verdict == Verdict::pass;
    ok = ok && rows && rep.sigma >= theta - 0.05 && rep.sigma <= theta;
    detail += "d=" + std::to_string(d) + " theta=" + fmt("%g", theta) + ": sigma " + fmt("%.4f", rep.sigma) +
              (rows ? "" : " (row failed)") + "; ";
  }
  const ConditionReport cyl =
      check_conditions(WarpedModel::make(WarpProfile::constant(2), Potential::zero()));
  const CheckRow* conv = nullptr;
  for (const auto& r : cyl.rows)
    if (r.verdict == Verdict::fail && !conv) conv = &r;
  ok = ok && conv && conv->name.find("convex") != std::string::npos;
  detail += "f=1: " + (conv ? conv->name + " fails at r=" + fmt("%.4g", conv->witness.r) : std::string("no failure"));
  return {ok, detail};
}

Result rellich_surrogate() {
  const Model m = WarpedModel::make(WarpProfile::constant(1), Potential::well(5.0, 1.0, 2.0));
  const RadialGrid g = make_grid(m, 64.0, 0.01);
  const EigenScanResult low = eigen_scan(m, 0.0, g, -5.0, 0.0);
  const double exact = oracle::square_well_ground_state(5.0);
  const double err = low.entries.empty() ? INFINITY : std::abs(low.entries.front().refined - exact);
  const EigenScanResult high = eigen_scan(m, 0.0, g, 0.0, 10.0);
  int artifacts = 0;
  for (const auto& e : high.entries) artifacts += e.artifact ? 1 : 0;
  const bool all = artifacts == static_cast<int>(high.entries.size()) && !high.entries.empty();
  return {err <= 1e-6 && all, "bound state error " + fmt("%.2e", err) + "; " + std::to_string(artifacts) +
                                  "/" + std::to_string(high.entries.size()) + " states in (0,10] are artifacts"};
}

Result lap_boundedness() {
  const std::vector<double> gammas{0.1, 0.03, 0.01, 0.003, 0.001};
  double worst = 0.0;
  bool ok = true;
  auto sweep = [&](const Model& m, std::initializer_list<double> lambdas) {
    for (double l : lambdas) {
      const SweepTable t = lap_sweep(m, l, gammas, bump(2.0, 3.0));
      ok = ok && t.verdict == Verdict::pass;
      worst = std::max(worst, t.summary.at("max_ratio"));
    }
  };
  sweep(free_line(), {0.5, 1.0, 2.0});
  sweep(Model{TwoEndLine{}}, {0.5, 1.0, 1.5});
  return {ok && worst <= 2.0, "max/min over Gamma in [1e-3, 1e-1]: " + fmt("%.3f", worst) +
                                  " (free and step models, 3 energies each)"};
}

Result radiation_condition() {
  const Model m = WarpedModel::make(WarpProfile::power(3, 2.0), Potential::zero());
  const ConditionReport rep = check_conditions(m);
  SweepOptions o;
  o.r_max = 512.0;
  o.h = 0.02;
  o.mode_cap = 2.0;
  o.hform.tau = rep.tau;
  o.complex_source = modulated_bump(2.0, 10.0, 2.0);
  const SweepTable t = radiation_sweep(m, 2.0, {0.1, 0.01, 0.001}, {0.0, 0.5, 0.9}, bump(2.0, 10.0),
                                       rep.beta_c, o);
  double separation = INFINITY;
  const auto right = static_cast<std::size_t>(t.value_index("radiation_bstar"));
  const auto wrong = static_cast<std::size_t>(t.value_index("wrong_sign_bstar"));
  for (const auto& r : t.rows) {
    if (r.params[1] == 0.001 && r.params[2] == 0.0) separation = r.values[wrong] / r.values[right];
  }
  return {t.verdict == Verdict::pass && t.summary.at("max_ratio") <= 2.0 && separation >= 10.0,
          "beta_c " + fmt("%.3g", rep.beta_c) + ", max/min " + fmt("%.3f", t.summary.at("max_ratio")) +
              ", wrong/right sign at Gamma=1e-3: " + fmt("%.1f", separation)};
}

Result hoelder_exponent() {
  HoelderOptions ho;
  ho.sweep.r_max = 2048.0;
  ho.sweep.h = 0.05;
  const SweepTable t = hoelder_estimate(free_line(), 1.0, 1.0, {0.2, 0.1, 0.05, 0.025, 0.0125}, ho);
  const double eps = t.summary.at("epsilon_emp");
  return {t.verdict == Verdict::pass && eps >= 0.23,
          "epsilon_emp " + fmt("%.3f", eps) + " (R^2 " + fmt("%.3f", t.summary.at("r2")) +
              ") against floor " + fmt("%.3f", t.summary.at("predicted") - 0.1)};
}

Result sommerfeld_uniqueness() {
  const ComparisonReport out = sommerfeld_compare(free_line(), 2.0, bump(2.0, 3.0));
  SommerfeldOptions in;
  in.sign = -1;
  const ComparisonReport inc = sommerfeld_compare(free_line(), 2.0, bump(2.0, 3.0), in);
  return {out.verdict == Verdict::pass && out.relative_hs <= 1e-4 && out.discrepancy_hs <= 1e-4 &&
              inc.relative_hs >= 0.1,
          "outgoing H_-1 discrepancy " + fmt("%.2e", out.discrepancy_hs) + " (relative " +
              fmt("%.2e", out.relative_hs) + "), incoming relative " + fmt("%.3f", inc.relative_hs)};
}

Result riccati_quality() {
  const Model m = WarpedModel::make(WarpProfile::power(2, 2.0), Potential::zero());
  const ConditionReport rep = check_conditions(m);
  const RadialGrid g = make_grid(m, 2048.0, 0.05);
  const auto with = riccati_residual(phase_a(m, {2.0, 0.0}, 1, g, 0.0, true), m, g, 20.48, 2048.0);
  const auto without = riccati_residual(phase_a(m, {2.0, 0.0}, 1, g, 0.0, false), m, g, 20.48, 2048.0);
  const double theory = -(1.0 + std::min(rep.rho / 2.0, rep.tau / 2.0));
  return {with.reliable && with.exponent <= -1.3 && with.exponent <= theory + 0.2 &&
              without.exponent > with.exponent,
          "exponent " + fmt("%.3f", with.exponent) + " (theory " + fmt("%.2f", theory) +
              "), without the correction " + fmt("%.3f", without.exponent)};
}

Result invariant_suite() {
  bool ok = true;
  std::string detail;
  for (const auto& o : invariants::all(120)) {
    ok = ok && o.failures == 0 && o.instances >= 100;
    detail += o.name + " " + std::to_string(o.instances - o.failures) + "/" + std::to_string(o.instances) + "; ";
  }
  return {ok, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double limit_s;
    std::function<Result()> run;
  };
  const Criterion criteria[] = {
      {1, "resolvent oracle", 5, resolvent_oracle},
      {2, "critical energies", 1, critical_energies},
      {3, "condition constants", 10, condition_constants},
      {4, "Rellich surrogate", 30, rellich_surrogate},
      {5, "LAP boundedness", 60, lap_boundedness},
      {6, "radiation condition", 60, radiation_condition},
      {7, "Hoelder exponent", 120, hoelder_exponent},
      {8, "Sommerfeld uniqueness", 60, sommerfeld_uniqueness},
      {9, "Riccati quality", 10, riccati_quality},
      {10, "invariant suite", 120, invariant_suite},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Result r;
    try {
      r = c.run();
    } catch (const std::exception& e) {
      r = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.limit_s;
    const bool pass = r.pass && in_time;
    failed += pass ? 0 : 1;
    std::printf("criterion %2d %s  %-22s %s [%.2f s, limit %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL",
                c.name, r.detail.c_str(), secs, c.limit_s, in_time ? "" : ", too slow");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
