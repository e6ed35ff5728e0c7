#include "radlab/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "radlab/error.hpp"
#include "radlab/fit.hpp"
#include "radlab/kernels.hpp"
#include "radlab/phase.hpp"

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr cplx I{0.0, 1.0};

double smooth_bump(double t) {
  // exp(-1/(1 - t^2)) scaled to peak 1 on (-1, 1)
  if (!(t > -1.0 && t < 1.0)) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - t * t));
}

double require_window(const Model& model, double lambda) {
  const double lambda0 = model_critical_energy(model).lambda0;
  if (!in_certified_window(model, lambda, lambda0)) {
    throw ContractError("lambda = " + std::to_string(lambda) +
                        " is not in a certified window above lambda0 = " + std::to_string(lambda0));
  }
  return lambda0;
}

using Parts = std::vector<std::pair<BesovProfile, int>>;

// B-type norms of a multi-mode function given per mode.
BesovProfile combined(const RadialGrid& grid, const std::vector<Mode>& modes,
                      const std::vector<GridFunction>& f) {
  Parts parts;
  for (std::size_t m = 0; m < modes.size(); ++m) {
    parts.emplace_back(besov_norms(grid, f[m]), modes[m].multiplicity);
  }
  return BesovProfile::combine(parts);
}

GridFunction scaled(const RadialGrid& grid, const GridFunction& f, double beta) {
  GridFunction out = f;
  if (beta == 0.0) return out;
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] *= std::pow(grid.radius(j), beta);
  return out;
}

double gamma_floor(const SweepOptions& o, const RadialGrid& grid) {
  if (o.method == Method::shift) return o.solver.shift_guard / (grid.x_max() - grid.x_min());
  // Smallest shift that still changes the diagonal entries ~ 1/h^2.
  return 64.0 * std::numeric_limits<double>::epsilon() / (o.h * o.h);
}

double rounded_max(const Model& model, double r_max, double h) {
  const double lo = x_min(model);
  return lo + h * std::round((r_max - lo) / h);
}

std::function<cplx(double)> as_complex(const SourceFn& psi, const SweepOptions& o) {
  if (o.complex_source) return o.complex_source;
  return [psi](double x) { return cplx{psi(x), 0.0}; };
}

}  // namespace

double WeightSpec::scale() const { return std::ldexp(1.0, nu); }

double WeightSpec::theta(double r) const {
  return (1.0 - std::pow(1.0 + r / scale(), -delta)) / delta;
}

double WeightSpec::theta_d1(double r) const {
  return std::pow(1.0 + r / scale(), -1.0 - delta) / scale();
}

double WeightSpec::theta_d2(double r) const {
  const double R = scale();
  return -(1.0 + delta) * std::pow(1.0 + r / R, -2.0 - delta) / (R * R);
}

int SweepTable::param_index(const std::string& name) const {
  const auto it = std::find(param_names.begin(), param_names.end(), name);
  return it == param_names.end() ? -1 : static_cast<int>(it - param_names.begin());
}

int SweepTable::value_index(const std::string& name) const {
  const auto it = std::find(value_names.begin(), value_names.end(), name);
  return it == value_names.end() ? -1 : static_cast<int>(it - value_names.begin());
}

namespace {

bool counts(const SweepRow& row) { return row.reliable && row.flag != "outside-theorem"; }

void bounded_rule(SweepTable& t) {
  const int g = t.param_index("gamma");
  std::vector<int> cols;
  if (t.checked.empty()) {
    for (std::size_t c = 0; c < t.value_names.size(); ++c) cols.push_back(static_cast<int>(c));
  } else {
    for (const auto& name : t.checked) {
      const int c = t.value_index(name);
      if (c < 0) throw ContractError("unknown checked column " + name);
      cols.push_back(c);
    }
  }
  // Group key: every parameter except gamma.
  auto key = [&](const SweepRow& r) {
    std::vector<double> k;
    for (std::size_t p = 0; p < r.params.size(); ++p) {
      if (static_cast<int>(p) != g) k.push_back(r.params[p]);
    }
    return k;
  };
  std::set<std::vector<double>> groups;
  for (const auto& r : t.rows) groups.insert(key(r));
  double worst = 1.0;
  t.verdict = Verdict::pass;
  for (const auto& k : groups) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      if (key(t.rows[i]) == k) members.push_back(i);
    }
    double group_ratio = 1.0;
    bool any_zero_mismatch = false;
    for (int c : cols) {
      double lo = kInf, hi = 0.0;
      for (std::size_t i : members) {
        if (!t.rows[i].reliable) continue;
        lo = std::min(lo, t.rows[i].values[c]);
        hi = std::max(hi, t.rows[i].values[c]);
      }
      if (hi == 0.0) continue;  // identically zero column
      if (lo == 0.0) {
        any_zero_mismatch = true;
        continue;
      }
      group_ratio = std::max(group_ratio, hi / lo);
    }
    const bool ok = !any_zero_mismatch && group_ratio <= t.factor;
    for (std::size_t i : members) {
      auto& r = t.rows[i];
      r.verdict = !r.reliable ? Verdict::inconclusive : (ok ? Verdict::pass : Verdict::fail);
      if (!counts(r)) continue;
      if (r.verdict == Verdict::fail) t.verdict = Verdict::fail;
    }
    bool counted = false;
    for (std::size_t i : members) counted = counted || counts(t.rows[i]);
    if (counted) worst = std::max(worst, any_zero_mismatch ? kInf : group_ratio);
  }
  bool any_counted = false;
  for (const auto& r : t.rows) any_counted = any_counted || counts(r);
  if (!any_counted && t.verdict == Verdict::pass) t.verdict = Verdict::inconclusive;
  t.summary["max_ratio"] = worst;
}

void hoelder_rule(SweepTable& t) {
  const int g = t.param_index("gap");
  if (g < 0) throw ContractError("hoelder table needs a gap column");
  const double floor = t.settings.count("predicted") ? t.settings.at("predicted") : 0.0;
  const double slack = t.settings.count("slack") ? t.settings.at("slack") : 0.1;
  double eps = kInf, r2 = 1.0;
  for (std::size_t c = 0; c < t.value_names.size(); ++c) {
    std::vector<double> x, y;
    for (const auto& r : t.rows) {
      if (!r.reliable) continue;
      x.push_back(r.params[g]);
      y.push_back(r.values[c]);
    }
    const LinearFit fit = fit_power_law(x, y);
    t.summary["epsilon_" + t.value_names[c]] = fit.slope;
    t.summary["r2_" + t.value_names[c]] = fit.r2;
    if (fit.count < 3) {
      r2 = 0.0;
      continue;
    }
    eps = std::min(eps, fit.slope);
    r2 = std::min(r2, fit.r2);
  }
  t.summary["epsilon_emp"] = eps;
  t.summary["r2"] = r2;
  t.summary["predicted"] = floor;
  if (r2 < 0.9 || !std::isfinite(eps)) {
    t.verdict = Verdict::inconclusive;
  } else {
    t.verdict = eps >= floor - slack ? Verdict::pass : Verdict::fail;
  }
  for (auto& r : t.rows) r.verdict = r.reliable ? t.verdict : Verdict::inconclusive;
}

void energy_rule(SweepTable& t) {
  const int g = t.param_index("gamma");
  const int c = t.value_index("ratio");
  if (g < 0 || c < 0) throw ContractError("energy table needs gamma and ratio columns");
  std::map<double, double> per_gamma;
  for (const auto& r : t.rows) {
    if (!r.reliable) continue;
    auto& v = per_gamma[r.params[g]];
    v = std::max(v, r.values[c]);
  }
  double lo = kInf, hi = 0.0;
  for (const auto& [gamma, C] : per_gamma) {
    lo = std::min(lo, C);
    hi = std::max(hi, C);
  }
  t.summary["C"] = hi;
  const double spread = per_gamma.empty() ? kInf : (hi == 0.0 ? 1.0 : hi / lo);
  t.summary["spread"] = spread;
  t.verdict = per_gamma.empty() ? Verdict::inconclusive
                                : (spread <= t.factor ? Verdict::pass : Verdict::fail);
  for (auto& r : t.rows) r.verdict = r.reliable ? t.verdict : Verdict::inconclusive;
}

}  // namespace

void apply_verdicts(SweepTable& table) {
  switch (table.rule) {
    case VerdictRule::bounded_in_gamma:
      bounded_rule(table);
      break;
    case VerdictRule::hoelder_fit:
      hoelder_rule(table);
      break;
    case VerdictRule::energy_uniform:
      energy_rule(table);
      break;
  }
}

SourceFn bump(double a, double b) {
  if (!(b > a)) throw ContractError("bump needs a < b");
  const double c = 0.5 * (a + b), w = 0.5 * (b - a);
  return [c, w](double x) { return smooth_bump((x - c) / w); };
}

std::function<cplx(double)> modulated_bump(double a, double b, double k) {
  const SourceFn env = bump(a, b);
  return [env, k](double x) { return env(x) * std::exp(I * k * x); };
}

std::vector<Mode> model_modes(const Model& model, double cap) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) {
    return mode_spectrum(w->profile.cross_section(), w->profile.dimension(), cap).modes;
  }
  return {Mode{0.0, 1}};
}

ModalState solve_modes(const Model& model, const RadialGrid& grid,
                       std::span<const NodeSample> samples, cplx z,
                       const std::function<cplx(double)>& psi, const SweepOptions& o) {
  ModalState st;
  st.z = z;
  st.modes = model_modes(model, o.mode_cap);
  const GridFunction src = sample_function(grid, psi);
  st.u.resize(st.modes.size());
  st.psi.assign(st.modes.size(), src);
  for (std::size_t m = 0; m < st.modes.size(); ++m) {
    const double mu = st.modes[m].mu;
    if (o.method == Method::outgoing) {
      const int sign = z.imag() < 0 ? -1 : 1;
      st.u[m] = resolve_outgoing(model, grid, mu, z.real(), sign, src, std::abs(z.imag()),
                                 o.solver, o.assembly)
                    .phi;
    } else {
      SolverOptions so = o.solver;
      so.enforce_shift_guard = false;
      const RadialOperator op =
          assemble_radial_operator(samples, grid, mu, z, OuterPolicy::dirichlet, {}, o.assembly);
      st.u[m] = resolve(op, grid, src, so).phi;
    }
  }
  return st;
}

SweepTable lap_sweep(const Model& model, double lambda, const std::vector<double>& gammas,
                     const SourceFn& psi, const SweepOptions& o) {
  require_window(model, lambda);
  const RadialGrid grid = make_grid(model, rounded_max(model, o.r_max, o.h), o.h);
  const auto samples = sample_grid(model, grid);
  const auto source = as_complex(psi, o);
  const double floor = gamma_floor(o, grid);

  SweepTable t;
  t.experiment = "lap";
  t.param_names = {"lambda", "gamma"};
  t.value_names = {"phi_bstar", "pr_phi_bstar", "h_form", "H0_phi_bstar"};
  t.factor = o.factor;
  t.rule = VerdictRule::bounded_in_gamma;
  t.rows.resize(gammas.size());
  kernels::parallel_for(gammas.size(), [&](std::size_t i) {
    const double gamma = gammas[i];
    if (!(gamma > 0.0 && gamma < 1.0)) throw ContractError("gamma must lie in (0, 1)");
    const ModalState st = solve_modes(model, grid, samples, {lambda, gamma}, source, o);
    std::vector<GridFunction> pr, h0;
    double hf = 0.0;
    for (std::size_t m = 0; m < st.modes.size(); ++m) {
      pr.push_back(apply_pr(grid, samples, st.u[m]));
      h0.push_back(apply_H0(grid, samples, st.modes[m].mu, st.u[m]));
      hf += st.modes[m].multiplicity * h_form(grid, samples, st.modes[m].mu, st.u[m], o.hform);
    }
    SweepRow row;
    row.params = {lambda, gamma};
    row.values = {combined(grid, st.modes, st.u).b_star_norm(),
                  combined(grid, st.modes, pr).b_star_norm(), std::sqrt(std::max(0.0, hf)),
                  combined(grid, st.modes, h0).b_star_norm()};
    row.reference = combined(grid, st.modes, st.psi).b_norm();
    if (gamma < floor) {
      row.reliable = false;
      row.flag = "unreliable";
    }
    t.rows[i] = row;
  });
  apply_verdicts(t);
  return t;
}

SweepTable radiation_sweep(const Model& model, double lambda, const std::vector<double>& gammas,
                           const std::vector<double>& betas, const SourceFn& psi, double beta_c,
                           const SweepOptions& o) {
  const double lambda0 = require_window(model, lambda);
  const RadialGrid grid = make_grid(model, rounded_max(model, o.r_max, o.h), o.h);
  const auto samples = sample_grid(model, grid);
  const auto source = as_complex(psi, o);
  const double floor = gamma_floor(o, grid);
  const double rl = r_lambda(model, lambda, lambda0);

  SweepTable t;
  t.experiment = "radiation";
  t.param_names = {"lambda", "gamma", "beta"};
  // The theorem bounds the sum of the two terms; the form alone converges
  // slowly in Gamma for beta near beta_c, so it is reported but not checked.
  t.value_names = {"radiation_bstar", "h_form", "lhs", "wrong_sign_bstar"};
  t.checked = {"radiation_bstar", "lhs"};
  t.factor = o.factor;
  t.rule = VerdictRule::bounded_in_gamma;
  t.settings["beta_c"] = beta_c;
  t.rows.resize(gammas.size() * betas.size());
  kernels::parallel_for(gammas.size(), [&](std::size_t i) {
    const double gamma = gammas[i];
    if (!(gamma > 0.0 && gamma < 1.0)) throw ContractError("gamma must lie in (0, 1)");
    const cplx z{lambda, gamma};
    const ModalState st = solve_modes(model, grid, samples, z, source, o);
    std::vector<cplx> a(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) a[j] = phase_value(model, z, 1, rl, grid.x(j));
    std::vector<GridFunction> minus, plus;
    for (std::size_t m = 0; m < st.modes.size(); ++m) {
      const GridFunction Au = apply_A(grid, samples, st.u[m], Representation::reduced);
      GridFunction dm(grid.size()), dp(grid.size());
      for (std::size_t j = 0; j < grid.size(); ++j) {
        dm[j] = Au[j] - a[j] * st.u[m][j];
        dp[j] = Au[j] + a[j] * st.u[m][j];
      }
      minus.push_back(std::move(dm));
      plus.push_back(std::move(dp));
    }
    for (std::size_t b = 0; b < betas.size(); ++b) {
      const double beta = betas[b];
      if (beta < 0.0) throw ContractError("beta must be nonnegative");
      std::vector<GridFunction> wm, wp, wpsi;
      double hf = 0.0;
      HFormSpec spec = o.hform;
      spec.beta = beta;
      for (std::size_t m = 0; m < st.modes.size(); ++m) {
        wm.push_back(scaled(grid, minus[m], beta));
        wp.push_back(scaled(grid, plus[m], beta));
        wpsi.push_back(scaled(grid, st.psi[m], beta));
        hf += st.modes[m].multiplicity * h_form(grid, samples, st.modes[m].mu, st.u[m], spec);
      }
      SweepRow row;
      row.params = {lambda, gamma, beta};
      const double rad = combined(grid, st.modes, wm).b_star_norm();
      const double form = std::sqrt(std::max(0.0, hf));
      row.values = {rad, form, rad + form, combined(grid, st.modes, wp).b_star_norm()};
      row.reference = combined(grid, st.modes, wpsi).b_norm();
      if (gamma < floor) {
        row.reliable = false;
        row.flag = "unreliable";
      } else if (beta >= beta_c) {
        row.flag = "outside-theorem";
      }
      t.rows[i * betas.size() + b] = row;
    }
  });
  apply_verdicts(t);
  return t;
}

std::vector<SourceFn> probe_sources(int count, std::uint64_t seed, double r_max) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::vector<SourceFn> out;
  for (int nu = 0; static_cast<int>(out.size()) < count; ++nu) {
    const double lo = std::ldexp(1.0, nu), hi = std::ldexp(1.0, nu + 1);
    if (hi > r_max) throw ContractError("grid too short for the requested probe count");
    const double width = (0.2 + 0.3 * unit(rng)) * (hi - lo);
    const double a = lo + unit(rng) * (hi - lo - width);
    out.push_back(bump(std::max(a, 1.0 + 1e-3), a + width));
  }
  return out;
}

SweepTable hoelder_estimate(const Model& model, double lambda, double s,
                            const std::vector<double>& gaps, const HoelderOptions& ho) {
  if (!(s > 0.5)) throw ContractError("hoelder_estimate needs s > 1/2");
  require_window(model, lambda);
  const SweepOptions& o = ho.sweep;
  const RadialGrid grid = make_grid(model, rounded_max(model, o.r_max, o.h), o.h);
  const auto samples = sample_grid(model, grid);
  const auto probes = probe_sources(ho.probes, ho.seed, grid.x_max());

  // Unit probes in the r^{-s} L^2 sense.
  std::vector<std::function<cplx(double)>> sources;
  for (const auto& p : probes) {
    const GridFunction g = sample_function(grid, [&](double x) { return cplx{p(x), 0.0}; });
    const double n = weighted_norm(grid, g, s);
    sources.push_back([p, n](double x) { return cplx{p(x) / n, 0.0}; });
  }
  const cplx z{lambda, ho.gamma0};
  std::vector<ModalState> base(sources.size());
  kernels::parallel_for(sources.size(), [&](std::size_t k) {
    base[k] = solve_modes(model, grid, samples, z, sources[k], o);
  });

  SweepTable t;
  t.experiment = "hoelder";
  t.param_names = {"lambda", "gap"};
  t.value_names = {"diff_alpha0", "diff_alpha1"};
  t.rule = VerdictRule::hoelder_fit;
  const double predicted =
      std::min((2.0 * s - 1.0) / (2.0 * s + 1.0), ho.beta_c / (ho.beta_c + 1.0));
  t.settings["predicted"] = predicted;
  t.settings["slack"] = ho.slack;
  t.settings["s"] = s;
  t.settings["gamma0"] = ho.gamma0;
  t.rows.resize(gaps.size());
  kernels::parallel_for(gaps.size(), [&](std::size_t i) {
    const double gap = gaps[i];
    if (!(gap > 0.0)) throw ContractError("hoelder gaps must be positive");
    require_window(model, lambda + gap);
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t k = 0; k < sources.size(); ++k) {
      const ModalState other = solve_modes(model, grid, samples, z + gap, sources[k], o);
      double s0 = 0.0, s1 = 0.0;
      for (std::size_t m = 0; m < other.modes.size(); ++m) {
        GridFunction diff(grid.size());
        for (std::size_t j = 0; j < grid.size(); ++j) diff[j] = base[k].u[m][j] - other.u[m][j];
        const double n0 = weighted_norm(grid, diff, -s);
        const double n1 = weighted_norm(grid, apply_pr(grid, samples, diff), -s);
        s0 += other.modes[m].multiplicity * n0 * n0;
        s1 += other.modes[m].multiplicity * n1 * n1;
      }
      d0 = std::max(d0, std::sqrt(s0));
      d1 = std::max(d1, std::sqrt(s1));
    }
    SweepRow row;
    row.params = {lambda, gap};
    row.values = {d0, d1};
    row.reference = 1.0;
    t.rows[i] = row;
  });
  apply_verdicts(t);
  return t;
}

ComparisonReport compare_functions(const RadialGrid& grid, const GridFunction& first,
                                   const GridFunction& second, double s) {
  if (first.size() != grid.size() || second.size() != grid.size()) {
    throw ContractError("compared functions do not match the grid");
  }
  ComparisonReport rep;
  rep.x.assign(grid.nodes().begin(), grid.nodes().end());
  rep.first = first;
  rep.second = second;
  rep.s = s;
  GridFunction diff(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) diff[j] = first[j] - second[j];
  rep.discrepancy_hs = weighted_norm(grid, diff, -s);
  rep.discrepancy_bstar = besov_norms(grid, diff).b_star_norm();
  const double nh = std::max(weighted_norm(grid, first, -s), weighted_norm(grid, second, -s));
  const double nb =
      std::max(besov_norms(grid, first).b_star_norm(), besov_norms(grid, second).b_star_norm());
  rep.relative_hs = nh > 0.0 ? rep.discrepancy_hs / nh : 0.0;
  rep.relative_bstar = nb > 0.0 ? rep.discrepancy_bstar / nb : 0.0;
  return rep;
}

ComparisonReport sommerfeld_compare(const Model& model, double lambda, const SourceFn& psi,
                                    const SommerfeldOptions& o) {
  const double lambda0 = require_window(model, lambda);
  const double r_max = rounded_max(model, o.r_max, o.h);
  const RadialGrid grid = make_grid(model, r_max, o.h);
  const auto samples = sample_grid(model, grid);
  const GridFunction src = sample_function(grid, [&](double x) { return cplx{psi(x), 0.0}; });

  // phi_2: boundary row at Gamma = 0.
  const GridFunction phi2 =
      resolve_outgoing(model, grid, o.mu, lambda, o.sign, src, 0.0).phi;

  // phi_1: shift solves on an absorbing extension, extrapolated to Gamma = 0.
  const std::vector<double> ladder{o.gamma0, 0.5 * o.gamma0, 0.25 * o.gamma0};
  const double k = std::sqrt(2.0 * (lambda - lambda0));
  const double r_big = rounded_max(model, r_max + o.absorb * k / ladder.back(), o.h);
  std::vector<GridFunction> shift(ladder.size(), GridFunction(grid.size()));
  {
    const RadialGrid big = make_grid(model, r_big, o.h);
    const GridFunction big_src =
        sample_function(big, [&](double x) { return cplx{psi(x), 0.0}; });
    std::vector<NodeSample> big_samples = sample_grid(model, big);
    for (std::size_t i = 0; i < ladder.size(); ++i) {
      const RadialOperator op = assemble_radial_operator(
          big_samples, big, o.mu, {lambda, ladder[i]}, OuterPolicy::dirichlet);
      const GridFunction phi = resolve(op, big, big_src).phi;
      for (std::size_t j = 0; j < grid.size(); ++j) shift[i][j] = phi[j];
    }
  }
  GridFunction r1(grid.size()), r1f(grid.size()), phi1(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    r1[j] = 2.0 * shift[1][j] - shift[0][j];
    r1f[j] = 2.0 * shift[2][j] - shift[1][j];
    phi1[j] = (4.0 * r1f[j] - r1[j]) / 3.0;
  }
  ComparisonReport rep = compare_functions(grid, phi1, phi2, o.s);
  rep.gammas = ladder;
  {
    GridFunction d01(grid.size()), d12(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      d01[j] = shift[1][j] - shift[0][j];
      d12[j] = shift[2][j] - shift[1][j];
    }
    const double a = weighted_norm(grid, d01, -o.s), b = weighted_norm(grid, d12, -o.s);
    rep.monotone = a == 0.0 || b < a;
  }
  // Radiation condition of phi_2 with the sign it was solved for.
  {
    const double rl = r_lambda(model, lambda, lambda0);
    const GridFunction Au = apply_A(grid, samples, phi2, Representation::reduced);
    GridFunction res(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
      res[j] = Au[j] - static_cast<double>(o.sign) *
                           phase_value(model, cplx{lambda, 0.0}, o.sign, rl, grid.x(j)) * phi2[j];
    }
    rep.radiation_decay = profile_decay(besov_norms(grid, res));
  }
  if (!rep.monotone) {
    rep.verdict = Verdict::inconclusive;
    rep.note = "shift solves do not approach their limit monotonically";
  } else if (rep.relative_hs <= o.tol && rep.radiation_decay.decays) {
    rep.verdict = Verdict::pass;
  } else {
    rep.verdict = Verdict::fail;
    rep.note = rep.relative_hs > o.tol ? "discrepancy above tolerance"
                                       : "(A - a) phi does not decay";
  }
  return rep;
}

SweepTable besov_energy_check(const Model& model, double lambda, const SourceFn& psi,
                              double delta, const std::vector<int>& nus,
                              const std::vector<double>& gammas, const EnergyOptions& eo) {
  if (!(delta > 0.0 && delta < 1.0)) throw ContractError("delta must lie in (0, 1)");
  require_window(model, lambda);
  const SweepOptions& o = eo.sweep;
  const RadialGrid grid = make_grid(model, rounded_max(model, o.r_max, o.h), o.h);
  const auto samples = sample_grid(model, grid);
  const auto source = as_complex(psi, o);
  const std::size_t n = grid.size();

  struct EnergyParts {
    std::vector<double> lhs;      // per nu
    std::vector<double> rhs_base; // per nu, without the chi_n term
    std::vector<std::vector<double>> local;  // [nu][n] ||chi_n Theta^{1/2} phi||^2
    bool zero = false;
  };
  std::vector<EnergyParts> parts(gammas.size());
  kernels::parallel_for(gammas.size(), [&](std::size_t g) {
    const double gamma = gammas[g];
    if (!(gamma > 0.0 && gamma < 1.0)) throw ContractError("gamma must lie in (0, 1)");
    const ModalState st = solve_modes(model, grid, samples, {lambda, gamma}, source, o);
    std::vector<GridFunction> Au;
    for (const auto& u : st.u) Au.push_back(apply_A(grid, samples, u, Representation::reduced));
    const double psi_b = combined(grid, st.modes, st.psi).b_norm();
    const double base = combined(grid, st.modes, st.u).b_star_norm() * psi_b +
                        combined(grid, st.modes, Au).b_star_norm() * psi_b;
    EnergyParts& P = parts[g];
    P.zero = psi_b == 0.0;
    for (int nu : nus) {
      const WeightSpec w{delta, nu};
      std::vector<double> th(n);
      for (std::size_t j = 0; j < n; ++j) th[j] = w.theta(grid.radius(j));
      double lhs = 0.0;
      std::vector<double> local(static_cast<std::size_t>(eo.n_max) + 1, 0.0);
      for (std::size_t m = 0; m < st.modes.size(); ++m) {
        const int mult = st.modes[m].multiplicity;
        double a = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
          const double d1 = w.theta_d1(grid.radius(j));
          a += grid.weight(j) * d1 * (std::norm(st.u[m][j]) + std::norm(Au[m][j]));
        }
        lhs += mult * (a + h_form(grid, samples, st.modes[m].mu, st.u[m], o.hform, th));
        for (int k = 0; k <= eo.n_max; ++k) {
          double b = 0.0;
          const double Rk = std::ldexp(1.0, k);
          for (std::size_t j = 0; j < n; ++j) {
            const double c = chi(grid.radius(j) / Rk);
            if (c == 0.0) continue;
            b += grid.weight(j) * c * c * th[j] * std::norm(st.u[m][j]);
          }
          local[static_cast<std::size_t>(k)] += mult * b;
        }
      }
      P.lhs.push_back(lhs);
      P.rhs_base.push_back(base);
      P.local.push_back(std::move(local));
    }
  });

  auto build = [&](int nsel) {
    SweepTable t;
    t.experiment = "energy";
    t.param_names = {"lambda", "gamma", "nu"};
    t.value_names = {"lhs", "rhs", "ratio"};
    t.rule = VerdictRule::energy_uniform;
    t.factor = eo.factor;
    t.settings["delta"] = delta;
    t.settings["n"] = nsel;
    for (std::size_t g = 0; g < gammas.size(); ++g) {
      for (std::size_t v = 0; v < nus.size(); ++v) {
        const EnergyParts& P = parts[g];
        const double rhs = P.rhs_base[v] + P.local[v][static_cast<std::size_t>(nsel)];
        SweepRow row;
        row.params = {lambda, gammas[g], static_cast<double>(nus[v])};
        const double ratio = rhs > 0.0 ? P.lhs[v] / rhs : (P.lhs[v] == 0.0 ? 0.0 : kInf);
        row.values = {P.lhs[v], rhs, ratio};
        row.reference = rhs;
        t.rows.push_back(row);
      }
    }
    apply_verdicts(t);
    return t;
  };
  SweepTable best = build(0);
  for (int k = 0; k <= eo.n_max; ++k) {
    SweepTable t = build(k);
    if (t.verdict == Verdict::pass) {
      t.summary["n"] = k;
      return t;
    }
    if (k == 0) best = t;
  }
  best.summary["n"] = -1;
  best.note = "no n up to n_max gives a uniform constant";
  return best;
}

}  // namespace radlab
