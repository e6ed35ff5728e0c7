#include "radlab/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>

#include "radlab/error.hpp"
#include "radlab/experiments.hpp"
#include "radlab/kernels.hpp"
#include "radlab/phase.hpp"
#include "radlab/report.hpp"

namespace radlab {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

// Shared, lazily computed model data; the condition report is the expensive part.
class Context {
 public:
  Context(const RunConfig& config, const RunOptions& options)
      : config_(config), options_(options) {
    if (!is_escape_field(config.model)) model_ = build_model(config.model);
  }

  const RunConfig& config() const { return config_; }
  const RunOptions& options() const { return options_; }
  const Model& model() const {
    if (!model_) throw ConfigError({"[model] profile = escape2d only supports the check command"});
    return *model_;
  }

  const ConditionReport& report() const {
    std::call_once(report_once_, [&] {
      report_ = is_escape_field(config_.model) ? check_escape_2d(build_field(config_.model))
                                                : check_conditions(*model_);
    });
    return report_;
  }

  double lambda0() const {
    std::call_once(lambda0_once_, [&] { lambda0_ = model_critical_energy(model()).lambda0; });
    return lambda0_;
  }

  std::string describe_model() const {
    if (model_) return describe(*model_);
    const auto& m = config_.model;
    return "escape2d field=" + m.field + " K=" + num(m.K);
  }

 private:
  const RunConfig& config_;
  const RunOptions& options_;
  std::optional<Model> model_;
  mutable std::once_flag report_once_, lambda0_once_;
  mutable ConditionReport report_;
  mutable double lambda0_ = 0.0;
};

struct Job {
  const Context& ctx;
  const ExperimentConfig& x;
  ExperimentOutcome& out;

  double r_max() const { return x.given.count("r_max") ? x.r_max : ctx.config().grid.r_max; }
  double h() const { return x.given.count("h") ? x.h : ctx.config().grid.h; }

  std::string out_path(const std::string& suffix) const {
    const std::string dir =
        ctx.options().out_dir.empty() ? ctx.config().out_dir : ctx.options().out_dir;
    return (std::filesystem::path(dir) / (x.name + suffix)).string();
  }

  HeaderBlock header(const std::string& tolerances) const {
    std::ostringstream grid;
    grid << "r_max=" << format_number(r_max()) << " h=" << format_number(h())
         << " mode_cap=" << format_number(ctx.config().grid.mode_cap);
    return {{"tool", kToolVersion},
            {"config_hash", config_hash(ctx.config().text)},
            {"seed", std::to_string(ctx.options().seed)},
            {"model", ctx.describe_model()},
            {"grid", grid.str()},
            {"experiment", x.name + " (" + x.type + ")"},
            {"tolerances", tolerances}};
  }

  void write(const std::string& suffix, const std::string& content) {
    const std::string path = out_path(suffix);
    write_atomic(path, content);
    out.files.push_back(path);
  }

  void plot(const std::string& title, const std::string& xl, const std::string& yl,
            const std::vector<PlotSeries>& series) {
    if (!ctx.config().svg) return;
    const std::string svg = "<!-- " + std::string(kToolVersion) + " config_hash " +
                            config_hash(ctx.config().text) + " -->\n" +
                            loglog_svg(title, xl, yl, series);
    write(".svg", svg);
  }

  SourceFn source() const {
    if (x.source == "zero") return [](double) { return 0.0; };
    return bump(x.source_a, x.source_b);
  }

  HFormSpec hform() const {
    HFormSpec spec;
    if (!x.given.count("hform_C") || !x.given.count("hform_tau")) {
      const auto& rep = ctx.report();
      if (rep.tau > 0.0 && std::isfinite(rep.C)) spec = HFormSpec{std::max(rep.C, 1e-3), rep.tau};
    }
    if (x.given.count("hform_C")) spec.C = x.hform_C;
    if (x.given.count("hform_tau")) spec.tau = x.hform_tau;
    return spec;
  }

  SweepOptions sweep_options() const {
    SweepOptions o;
    o.r_max = r_max();
    o.h = h();
    o.mode_cap = ctx.config().grid.mode_cap;
    o.factor = x.factor;
    o.method = x.method == "shift" ? Method::shift : Method::outgoing;
    if (x.type != "hoelder") o.hform = hform();
    if (x.source == "modulated") {
      const double k = x.source_k >= 0.0
                           ? x.source_k
                           : std::sqrt(2.0 * std::max(0.0, x.lambda - ctx.lambda0()));
      o.complex_source = modulated_bump(x.source_a, x.source_b, k);
    } else if (x.source == "zero") {
      o.complex_source = [](double) { return cplx{0.0, 0.0}; };
    }
    return o;
  }

  double beta_c() const { return x.beta_c >= 0.0 ? x.beta_c : ctx.report().beta_c; }

  void finish_table(const SweepTable& t, const std::string& tolerances) {
    write(".csv", sweep_csv(t, header(tolerances)));
    out.verdict = t.verdict;
    std::string s;
    for (const auto& [k, v] : t.summary) s += (s.empty() ? "" : " ") + k + "=" + num(v);
    if (!t.note.empty()) s += (s.empty() ? "" : "; ") + t.note;
    out.summary = s;
  }

  std::vector<PlotSeries> column_series(const SweepTable& t, const std::string& xname,
                                        const std::vector<std::string>& columns,
                                        const std::string& group = "") {
    const int xi = t.param_index(xname);
    const int gi = group.empty() ? -1 : t.param_index(group);
    std::vector<PlotSeries> series;
    for (const auto& c : columns) {
      const int vi = t.value_index(c);
      if (vi < 0) continue;
      std::map<double, PlotSeries> by_group;
      for (const auto& r : t.rows) {
        const double g = gi >= 0 ? r.params[static_cast<std::size_t>(gi)] : 0.0;
        auto& s = by_group[g];
        if (s.name.empty()) s.name = gi >= 0 ? c + " " + group + "=" + num(g) : c;
        s.x.push_back(r.params[static_cast<std::size_t>(xi)]);
        s.y.push_back(r.values[static_cast<std::size_t>(vi)]);
      }
      for (auto& [g, s] : by_group) series.push_back(std::move(s));
    }
    return series;
  }

  void run_check() {
    const ConditionReport& rep = ctx.report();
    std::ostringstream tol;
    tol << "horizon=" << format_number(ConditionOptions{}.horizon)
        << " inflation=" << format_number(ConditionOptions{}.inflation);
    write(".csv", condition_csv(rep, header(tol.str())));
    out.verdict = rep.overall();
    out.summary = "sigma=" + num(rep.sigma) + " tau=" + num(rep.tau) + " rho'=" +
                  num(rep.rho_prime) + " rho=" + num(rep.rho) + " C=" + num(rep.C) +
                  " lambda0=" + num(rep.lambda0) + " beta_c=" + num(rep.beta_c);
    for (const auto& row : rep.rows) {
      if (row.verdict != Verdict::pass) {
        out.summary += "; " + row.name + " " + to_string(row.verdict) + " at r=" + num(row.witness.r);
        break;
      }
    }
  }

  void run_solve() {
    const Model& model = ctx.model();
    const double r = std::round((r_max() - x_min(model)) / h()) * h() + x_min(model);
    const RadialGrid grid = make_grid(model, r, h());
    SweepOptions o = sweep_options();
    const auto real_src = source();
    const std::function<cplx(double)> fn =
        o.complex_source ? o.complex_source
                         : std::function<cplx(double)>([&](double t) { return cplx{real_src(t), 0.0}; });
    const GridFunction psi = sample_function(grid, fn);
    SolverOptions so;
    so.residual_tol = x.given.count("tol") ? x.tol : so.residual_tol;
    ResolventSolution sol;
    if (x.method == "shift") {
      const RadialOperator op = assemble_radial_operator(model, grid, x.mu, {x.lambda, x.gamma},
                                                         OuterPolicy::dirichlet);
      sol = resolve(op, grid, psi, so);
    } else {
      sol = resolve_outgoing(model, grid, x.mu, x.lambda, x.sign, psi, x.gamma, so);
    }
    const std::string tol = "residual_tol=" + format_number(so.residual_tol);
    write(".csv", solution_csv(grid, sol.phi, header(tol)));
    const BesovProfile prof = besov_norms(grid, sol.phi);
    write("_besov.csv", besov_csv(prof, header(tol)));
    PlotSeries s{"annulus norm", {}, {}};
    for (std::size_t nu = 0; nu < prof.annulus_norms.size(); ++nu) {
      s.x.push_back(std::ldexp(1.0, static_cast<int>(nu)));
      s.y.push_back(prof.annulus_norms[nu]);
    }
    plot(x.name + ": dyadic annulus norms", "R_nu", "||F_nu phi||", {s});
    const bool finite = std::all_of(sol.phi.values.begin(), sol.phi.values.end(), [](cplx v) {
      return std::isfinite(v.real()) && std::isfinite(v.imag());
    });
    out.verdict = finite && sol.report.backward_error <= so.residual_tol ? Verdict::pass : Verdict::fail;
    out.summary = "residual=" + num(sol.residual) + " backward_error=" +
                  num(sol.report.backward_error) + " b_star=" + num(prof.b_star_norm()) +
                  " rcond=" + num(sol.report.rcond);
  }

  void run_lap() {
    const SweepOptions o = sweep_options();
    const SweepTable t = lap_sweep(ctx.model(), x.lambda, x.gammas, source(), o);
    finish_table(t, "factor=" + format_number(x.factor) + " hform_C=" + format_number(o.hform.C) +
                        " hform_tau=" + format_number(o.hform.tau));
    plot(x.name + ": Besov bound norms", "gamma", "norm", column_series(t, "gamma", t.value_names));
  }

  void run_radiation() {
    const SweepOptions o = sweep_options();
    const double bc = beta_c();
    const SweepTable t = radiation_sweep(ctx.model(), x.lambda, x.gammas, x.betas, source(), bc, o);
    finish_table(t, "factor=" + format_number(x.factor) + " beta_c=" + format_number(bc) +
                        " hform_tau=" + format_number(o.hform.tau));
    plot(x.name + ": radiation bounds", "gamma", "B* norm",
         column_series(t, "gamma", {"radiation_bstar", "wrong_sign_bstar"}, "beta"));
  }

  void run_hoelder() {
    HoelderOptions ho;
    ho.sweep = sweep_options();
    ho.gamma0 = x.gamma0;
    ho.probes = x.probes;
    ho.seed = ctx.options().seed;
    ho.beta_c = beta_c();
    ho.slack = x.slack;
    const SweepTable t = hoelder_estimate(ctx.model(), x.lambda, x.s, x.gaps, ho);
    finish_table(t, "slack=" + format_number(x.slack) + " r2_min=0.9");
    plot(x.name + ": resolvent differences", "|z - z'|", "max over probes",
         column_series(t, "gap", t.value_names));
  }

  void run_energy() {
    EnergyOptions eo;
    eo.sweep = sweep_options();
    eo.factor = x.factor;
    eo.n_max = x.n_max;
    const SweepTable t =
        besov_energy_check(ctx.model(), x.lambda, source(), x.delta, x.nus, x.gammas, eo);
    finish_table(t, "factor=" + format_number(x.factor) + " n_max=" + std::to_string(x.n_max));
    plot(x.name + ": energy ratio", "gamma", "lhs / rhs",
         column_series(t, "gamma", {"ratio"}, "nu"));
  }

  void run_sommerfeld() {
    SommerfeldOptions so;
    so.r_max = r_max();
    so.h = h();
    if (x.given.count("gamma0")) so.gamma0 = x.gamma0;
    so.absorb = x.absorb;
    so.s = x.s;
    so.tol = x.tol;
    so.sign = x.sign;
    so.mu = x.mu;
    const ComparisonReport rep = sommerfeld_compare(ctx.model(), x.lambda, source(), so);
    write(".csv", comparison_csv(rep, header("tol=" + format_number(so.tol) + " absorb=" +
                                             format_number(so.absorb))));
    out.verdict = rep.verdict;
    out.summary = "relative_hs=" + num(rep.relative_hs) + " relative_bstar=" +
                  num(rep.relative_bstar) + " discrepancy_hs=" + num(rep.discrepancy_hs);
    if (!rep.note.empty()) out.summary += "; " + rep.note;
  }

  void run_rellich() {
    const Model& model = ctx.model();
    const double r = std::round((r_max() - x_min(model)) / h()) * h() + x_min(model);
    const RadialGrid grid = make_grid(model, r, h());
    EigenScanOptions eo;
    eo.lambda0 = ctx.lambda0();
    if (x.given.count("tol")) eo.tol = x.tol;
    const EigenScanResult res = eigen_scan(model, x.mu, grid, x.lo, x.hi, eo);
    write(".csv", eigen_csv(res, header("tol=" + format_number(eo.tol))));
    int above = 0, genuine = 0, bound = 0;
    for (const auto& e : res.entries) {
      if (e.value <= res.lambda0) {
        if (!e.artifact) ++bound;
        continue;
      }
      if (e.near_threshold) continue;
      ++above;
      if (!e.artifact) ++genuine;
    }
    out.verdict = genuine == 0 ? Verdict::pass : Verdict::fail;
    out.summary = "lambda0=" + num(res.lambda0) + " above=" + std::to_string(above) +
                  " genuine_above=" + std::to_string(genuine) +
                  " bound_states=" + std::to_string(bound);
    for (const auto& e : res.entries) {
      if (e.value <= res.lambda0 && !e.artifact) {
        out.summary += " first_bound=" + format_number(e.refined);
        break;
      }
    }
  }

  void run_riccati() {
    const Model& model = ctx.model();
    const double r = std::round((r_max() - x_min(model)) / h()) * h() + x_min(model);
    const RadialGrid grid = make_grid(model, r, h());
    const double lo = x.fit_lo > 0.0 ? x.fit_lo : r / 100.0;
    const double hi = x.fit_hi > 0.0 ? x.fit_hi : r;
    const cplx z{x.lambda, x.gamma};
    const PhaseSpec with = phase_a(model, z, 1, grid, ctx.lambda0(), true);
    const PhaseSpec without = phase_a(model, z, 1, grid, ctx.lambda0(), false);
    const RiccatiResidual rw = riccati_residual(with, model, grid, lo, hi);
    const RiccatiResidual rn = riccati_residual(without, model, grid, lo, hi);
    const auto& rep = ctx.report();
    const double bound = -(1.0 + std::min(rep.rho / 2.0, rep.tau / 2.0)) + 0.2;
    write(".csv", phase_csv(with, rw,
                            header("fit=[" + format_number(lo) + "," + format_number(hi) +
                                   "] bound=" + format_number(bound))));
    PlotSeries a{"corrected", rw.r, rw.residual}, b{"uncorrected", rn.r, rn.residual};
    plot(x.name + ": Riccati residual", "r", "residual", {a, b});
    if (!rw.reliable) {
      out.verdict = Verdict::inconclusive;
    } else {
      out.verdict = rw.exponent <= bound && (!rn.reliable || rn.exponent > rw.exponent)
                        ? Verdict::pass
                        : Verdict::fail;
    }
    out.summary = "exponent=" + num(rw.exponent) + " uncorrected=" + num(rn.exponent) +
                  " bound=" + num(bound) + (rw.reliable ? "" : "; fit unreliable");
  }

  void run() {
    if (x.type == "check") run_check();
    else if (x.type == "solve") run_solve();
    else if (x.type == "lap") run_lap();
    else if (x.type == "radiation") run_radiation();
    else if (x.type == "hoelder") run_hoelder();
    else if (x.type == "rellich") run_rellich();
    else if (x.type == "sommerfeld") run_sommerfeld();
    else if (x.type == "riccati") run_riccati();
    else if (x.type == "energy") run_energy();
    else throw ContractError("unknown experiment type '" + x.type + "'");
  }
};

std::string error_text(const std::exception& e) {
  if (dynamic_cast<const ContractError*>(&e)) return std::string("precondition violated: ") + e.what();
  if (dynamic_cast<const ConfigError*>(&e)) return std::string("configuration: ") + e.what();
  return e.what();
}

}  // namespace

int exit_code(const std::vector<ExperimentOutcome>& outcomes, bool strict) {
  bool inconclusive = false;
  for (const auto& o : outcomes) {
    if (o.error || o.verdict == Verdict::fail) return 1;
    if (o.verdict == Verdict::inconclusive) inconclusive = true;
  }
  if (inconclusive) return strict ? 1 : 2;
  return 0;
}

RunResult run(const RunConfig& config, const std::string& command, const RunOptions& options,
              std::ostream& log) {
  const auto& types = experiment_types();
  if (command != "all" && std::find(types.begin(), types.end(), command) == types.end()) {
    throw ContractError("unknown command '" + command + "'");
  }
  std::vector<ExperimentConfig> selected;
  for (const auto& x : config.experiments)
    if (command == "all" || x.type == command) selected.push_back(x);
  if (selected.empty() && command != "all") {
    ExperimentConfig x;
    x.name = command;
    x.type = command;
    selected.push_back(x);
  }

  RunResult result;
  result.outcomes.resize(selected.size());
  kernels::set_threads(std::max(1, options.jobs));
  try {
    const Context ctx(config, options);
    auto one = [&](std::size_t i) {
      auto& out = result.outcomes[i];
      out.name = selected[i].name;
      out.type = selected[i].type;
      try {
        Job{ctx, selected[i], out}.run();
      } catch (const std::exception& e) {
        out.error = true;
        out.verdict = Verdict::fail;
        out.summary = error_text(e);
      }
    };
    if (selected.size() > 1) {
      kernels::parallel_for(selected.size(), one);
    } else {
      for (std::size_t i = 0; i < selected.size(); ++i) one(i);
    }
  } catch (const std::exception& e) {
    for (std::size_t i = 0; i < selected.size(); ++i) {
      auto& out = result.outcomes[i];
      out.name = selected[i].name;
      out.type = selected[i].type;
      out.error = true;
      out.verdict = Verdict::fail;
      out.summary = error_text(e);
    }
  }
  for (const auto& o : result.outcomes) {
    log << o.name << " (" << o.type << "): " << (o.error ? "error" : to_string(o.verdict));
    if (!o.summary.empty()) log << "; " << o.summary;
    log << "\n";
  }
  result.exit_code = exit_code(result.outcomes, options.strict);
  return result;
}

}  // namespace radlab
