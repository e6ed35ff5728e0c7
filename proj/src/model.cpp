#include "radlab/model.hpp"

#include <cmath>
#include <sstream>

#include "radlab/error.hpp"

namespace radlab {

namespace {

// Smoothstep S(s) = 1 - chi(1 + s) and its derivatives.
double step(double s) { return 1.0 - chi(1.0 + s); }
double step_d1(double s) { return -chi_d1(1.0 + s); }
double step_d2(double s) { return -chi_d2(1.0 + s); }

double half_line_escape(double y) {
  const double s = y - 1.0;
  if (s <= 0) return 1.0;
  if (s >= 1) return y;
  return 1.0 + s * step(s);
}
double half_line_escape_d1(double y) {
  const double s = y - 1.0;
  if (s <= 0) return 0.0;
  if (s >= 1) return 1.0;
  return step(s) + s * step_d1(s);
}
double half_line_escape_d2(double y) {
  const double s = y - 1.0;
  if (s <= 0 || s >= 1) return 0.0;
  return 2.0 * step_d1(s) + s * step_d2(s);
}

}  // namespace

WarpedModel WarpedModel::make(WarpProfile profile, const Potential& V, CutoffSpec cutoffs) {
  PotentialSplit split = PotentialSplit::standard(profile, cutoffs, V);
  return WarpedModel{std::move(profile), std::move(split), cutoffs, V.name};
}

double TwoEndLine::potential(double x) const {
  return lambda0 + (lambda1 - lambda0) * chi(0.5 * (x + 3.0));
}

double TwoEndLine::potential_d1(double x) const {
  return 0.5 * (lambda1 - lambda0) * chi_d1(0.5 * (x + 3.0));
}

double TwoEndLine::escape(double x) const {
  return two_sided ? half_line_escape(std::abs(x)) : half_line_escape(x);
}

double TwoEndLine::escape_d1(double x) const {
  if (!two_sided) return half_line_escape_d1(x);
  return (x < 0 ? -1.0 : 1.0) * half_line_escape_d1(std::abs(x));
}

double TwoEndLine::escape_d2(double x) const {
  return two_sided ? half_line_escape_d2(std::abs(x)) : half_line_escape_d2(x);
}

NodeSample sample(const Model& model, double x) {
  NodeSample s;
  s.x = x;
  if (const auto* w = std::get_if<WarpedModel>(&model)) {
    const LogWarp lw = w->profile.log_warp(x);
    const double a = 0.5 * (w->profile.dimension() - 1);
    const Jet g = geometric_term(w->profile, w->cutoffs, x, false);
    s.r = x;
    s.dr = 1.0;
    s.ddr = 0.0;
    s.V = w->split.V ? w->split.V(x).v : 0.0;
    s.geom = g.v;
    s.W = s.V + s.geom;
    s.mode_coeff = 0.5 * std::exp(-lw.l0);
    s.lap_r = a * lw.l1;
    s.half_lap = 0.5 * s.lap_r;
    s.hess_ell = 0.5 * lw.l1;
    s.h_radial = 0.0;
    s.q1 = w->split.q1(x).v;
    s.q11_d1 = w->split.q11 ? w->split.q11(x).d1 : 0.0;
    if (!std::isfinite(s.W) || !std::isfinite(s.q1)) throw EvaluationError("non-finite potential", x);
    return s;
  }
  const auto& line = std::get<TwoEndLine>(model);
  s.r = line.escape(x);
  s.dr = line.escape_d1(x);
  s.ddr = line.escape_d2(x);
  s.V = line.potential(x);
  s.geom = 0.0;
  s.W = s.V;
  s.mode_coeff = 0.0;
  s.lap_r = s.ddr;
  s.half_lap = 0.0;
  s.hess_ell = 0.0;
  const double eta = 1.0 - chi(2.0 * s.r / line.r0);
  s.h_radial = (1.0 - eta) * s.ddr;
  s.q1 = s.V;
  s.q11_d1 = line.potential_d1(x);
  return s;
}

int dimension(const Model& model) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) return w->profile.dimension();
  return 1;
}

double x_min(const Model& model) {
  if (const auto* line = std::get_if<TwoEndLine>(&model)) return -line->left;
  return 1.0;
}

double cutoff_r0(const Model& model) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) return w->cutoffs.r0;
  return std::get<TwoEndLine>(model).r0;
}

std::string describe(const Model& model) {
  std::ostringstream os;
  os.precision(10);
  if (const auto* w = std::get_if<WarpedModel>(&model)) {
    os << "warped profile=" << w->profile.name() << " d=" << w->profile.dimension()
       << " potential=" << w->potential_name << " r0=" << w->cutoffs.r0;
  } else {
    const auto& l = std::get<TwoEndLine>(model);
    os << "two_end lambda0=" << l.lambda0 << " lambda1=" << l.lambda1 << " left=" << l.left
       << " r0=" << l.r0 << (l.two_sided ? " escape=two_sided" : " escape=one_sided");
  }
  return os.str();
}

RadialGrid::Radius escape_function(const Model& model) {
  if (const auto* line = std::get_if<TwoEndLine>(&model)) {
    const TwoEndLine l = *line;
    return [l](double x) { return l.escape(x); };
  }
  return {};
}

RadialGrid make_grid(const Model& model, double r_max, double h) {
  return RadialGrid::uniform(x_min(model), r_max, h, escape_function(model));
}

Jet q1_on_end(const Model& model, double r) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) return w->split.q1(r);
  const auto& l = std::get<TwoEndLine>(model);
  if (l.two_sided) {
    const double a = l.potential(r), b = l.potential(-r);
    return a >= b ? Jet::exact(a, l.potential_d1(r)) : Jet::exact(b, -l.potential_d1(-r));
  }
  return Jet::exact(l.potential(r), l.potential_d1(r));
}

Jet q11_on_end(const Model& model, double r) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) {
    return w->split.q11 ? w->split.q11(r) : Jet{};
  }
  return q1_on_end(model, r);
}

CriticalEnergy model_critical_energy(const Model& model, double horizon, double tol) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) {
    return critical_energy(w->split, horizon, tol);
  }
  PotentialSplit s;
  const Model copy = model;
  s.q11 = [copy](double r) { return q1_on_end(copy, r); };
  return critical_energy(s, horizon, tol);
}

std::vector<double> thresholds(const Model& model) {
  if (const auto* l = std::get_if<TwoEndLine>(&model)) {
    if (l->two_sided) return {std::min(l->lambda0, l->lambda1)};
    return {l->lambda1};
  }
  return {};
}

bool in_certified_window(const Model& model, double lambda, double lambda0,
                         double threshold_window) {
  if (!(lambda > lambda0)) return false;
  for (double t : thresholds(model)) {
    if (std::abs(lambda - t) <= threshold_window) return false;
  }
  return true;
}

}  // namespace radlab
