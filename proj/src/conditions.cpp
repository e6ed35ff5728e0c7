#include "radlab/conditions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "radlab/error.hpp"
#include "radlab/geometry.hpp"

namespace radlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Decay of a nonnegative sampled quantity over the fit window.
struct Decay {
  bool vanishes = true;  // no nonzero value in the window
  double exponent = kInf;
  LinearFit fit;
  bool reliable = true;
  Witness last;  // outermost nonzero sample anywhere
};

Decay tail_decay(const std::vector<double>& r, const std::vector<double>& g, double lo, double hi,
                 double r2_min) {
  Decay d;
  std::vector<double> xs, ys;
  double top = 0.0;
  for (double x : r) top = std::max(top, std::min(x, hi));
  // A quantity that is zero over the outer half (log scale) of the window
  // counts as vanishing there.
  const double outer = std::sqrt(lo * top);
  bool outer_nonzero = false;
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (g[i] > 0.0) d.last = {r[i], 0.0, 0.0, -g[i]};
    if (g[i] > 0.0 && r[i] >= lo && r[i] <= hi) {
      xs.push_back(r[i]);
      ys.push_back(g[i]);
      if (r[i] >= outer) outer_nonzero = true;
    }
  }
  if (!outer_nonzero) return d;
  d.vanishes = false;
  if (xs.size() < 3) {
    d.reliable = false;
    d.exponent = 0.0;
    return d;
  }
  d.fit = fit_power_law(xs, ys);
  d.exponent = -d.fit.slope;
  d.reliable = d.fit.r2 >= r2_min;
  return d;
}

// Constraint on rho from a bound |g| <= C r^{-e(rho)} with e affine in rho:
// rho = (exponent - offset) / scale.
double implied(const Decay& d, double offset, double scale, double cap) {
  if (d.vanishes) return cap;
  return std::min(cap, (d.exponent - offset) / scale);
}

struct Probe {
  std::vector<double> r;
  std::vector<GeometryPoint> geo;
  std::vector<Jet> q11, q12, q21, q22;
};

Probe probe(const WarpedModel& m, const std::vector<double>& radii) {
  Probe p;
  p.r = radii;
  for (double r : radii) {
    p.geo.push_back(geometry_at(m.profile, m.cutoffs, r));
    p.q11.push_back(m.split.q11(r));
    p.q12.push_back(m.split.q12(r));
    p.q21.push_back(m.split.q21(r));
    p.q22.push_back(m.split.q22(r));
  }
  return p;
}

// Largest violation of r nabla^2 r >= (sigma/2) ell on the warped end: the
// ell block needs r f'/(2f) >= sigma/2; the radial block only sees the
// interior part (1 - eta) of ell.
double convexity_deficit(const GeometryPoint& g, int d, double sigma) {
  double def = 0.5 * sigma * (1.0 - g.eta);
  if (d > 1) def = std::max(def, 0.5 * sigma - g.r * g.hess_coeff);
  return std::max(0.0, def);
}

std::vector<double> deficits(const Probe& p, int d, double sigma) {
  std::vector<double> out(p.r.size());
  for (std::size_t i = 0; i < p.r.size(); ++i) out[i] = convexity_deficit(p.geo[i], d, sigma);
  return out;
}

// sigma passes when the deficit vanishes or decays at a positive rate.
bool sigma_passes(const std::vector<double>& r, const std::vector<double>& def, double lo,
                  double hi, const ConditionOptions& o) {
  const Decay d = tail_decay(r, def, lo, hi, o.r2_min);
  return d.vanishes || (d.reliable && d.exponent >= o.min_rate);
}

double extract_C(const std::vector<double>& r, const std::vector<double>& def, double tau) {
  double C = 0.0;
  for (std::size_t i = 0; i < r.size(); ++i) C = std::max(C, def[i] * std::pow(r[i], tau));
  return C;
}

CheckRow row(std::string name, Verdict v, std::string note = {}) {
  CheckRow c;
  c.name = std::move(name);
  c.verdict = v;
  c.note = std::move(note);
  return c;
}

// sigma by bisection on [0, sigma_max]; tau from the deficit decay at sigma.
struct Convexity {
  double sigma = 0.0, tau = 0.0, C = 0.0;
  bool failed = false;
  Witness witness;
};

template <class DeficitAt>
Convexity bisect_convexity(const std::vector<double>& r, DeficitAt deficit_at, double lo, double hi,
                           const ConditionOptions& o) {
  Convexity c;
  if (sigma_passes(r, deficit_at(o.sigma_max), lo, hi, o)) {
    c.sigma = o.sigma_max;
  } else {
    double a = 0.0, b = o.sigma_max;
    for (int it = 0; it < 50; ++it) {
      const double mid = 0.5 * (a + b);
      (sigma_passes(r, deficit_at(mid), lo, hi, o) ? a : b) = mid;
    }
    c.sigma = a;
  }
  if (c.sigma < 1e-6) {
    // No positive sigma works: show the violation at a small probe sigma.
    c.failed = true;
    const double probe_sigma = 1e-3 * o.sigma_max;
    const double probe_tau = 0.25;
    const auto def = deficit_at(probe_sigma);
    double C = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      if (r[i] <= lo) C = std::max(C, def[i] * std::pow(r[i], probe_tau));
    }
    c.witness.margin = kInf;
    for (std::size_t i = 0; i < r.size(); ++i) {
      const double margin = C * std::pow(r[i], -probe_tau) - def[i];
      if (margin < c.witness.margin) c.witness = {r[i], 0.0, 0.0, margin};
    }
    c.sigma = 0.0;
    return c;
  }
  const auto def = deficit_at(c.sigma);
  const Decay d = tail_decay(r, def, lo, hi, o.r2_min);
  c.tau = d.vanishes ? o.tau_max : std::min(o.tau_max, d.exponent);
  c.C = extract_C(r, def, c.tau) * (1.0 + o.inflation);
  return c;
}

Verdict worst(Verdict a, Verdict b) {
  if (a == Verdict::fail || b == Verdict::fail) return Verdict::fail;
  if (a == Verdict::inconclusive || b == Verdict::inconclusive) return Verdict::inconclusive;
  return Verdict::pass;
}

}  // namespace

const char* to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    default: return "inconclusive";
  }
}

Verdict ConditionReport::overall() const {
  Verdict v = Verdict::pass;
  for (const auto& r : rows) v = worst(v, r.verdict);
  return v;
}

const CheckRow* ConditionReport::find(const std::string& name) const {
  for (const auto& r : rows) {
    if (r.name == name) return &r;
  }
  return nullptr;
}

double ConditionReport::recomputed_beta_c() const { return 0.5 * std::min({sigma, tau, rho}); }

std::vector<double> geometric_radii(double r_min, double r_max, double ratio) {
  if (!(ratio > 1.0) || !(r_max > r_min) || !(r_min > 0)) {
    throw ContractError("geometric radii need 0 < r_min < r_max and ratio > 1");
  }
  std::vector<double> out;
  for (double r = r_min; r < r_max; r *= ratio) out.push_back(r);
  out.push_back(r_max);
  return out;
}

double convexity_margin(const WarpedModel& model, double sigma, double tau, double C,
                        const std::vector<double>& radii) {
  double m = kInf;
  for (double r : radii) {
    const GeometryPoint g = geometry_at(model.profile, model.cutoffs, r);
    m = std::min(m, C * std::pow(r, -tau) - convexity_deficit(g, model.profile.dimension(), sigma));
  }
  return m;
}

ConditionReport check_conditions(const WarpedModel& model, const ConditionOptions& o) {
  ConditionReport rep;
  const auto radii = geometric_radii(1.0, o.horizon, o.ratio);
  const Probe p = probe(model, radii);
  const int d = model.profile.dimension();
  const double lo = o.horizon / o.fit_span, hi = o.horizon;
  rep.r_min = radii.front();
  rep.r_max = radii.back();
  rep.points = radii.size();

  // Escape function: on a warped end r is the distance to the inner wall,
  // |dr| = 1 and grad r = d/dr is forward complete.
  rep.rows.push_back(row("escape", Verdict::pass, "|dr| = 1, radial flow complete"));

  const Convexity cv = bisect_convexity(
      radii, [&](double s) { return deficits(p, d, s); }, lo, hi, o);
  {
    CheckRow c = row("convexity", cv.failed ? Verdict::fail : Verdict::pass);
    c.constant = cv.C;
    c.exponent = cv.tau;
    if (cv.failed) {
      c.witness = cv.witness;
      c.note = "no sigma > 0 with a decaying deficit";
    } else if (cv.sigma >= o.sigma_max) {
      c.note = "sigma at cap";
    }
    rep.rows.push_back(c);
  }
  rep.sigma = cv.sigma;
  rep.tau = cv.failed ? 0.0 : cv.tau;
  rep.C = cv.C;

  // |dr|^2 <= C and |nabla^r |dr|^2| decay hold identically; Delta r must
  // stay bounded and ell . grad Delta r lives only where eta < 1.
  {
    std::vector<double> lap(radii.size()), tang(radii.size());
    double lap_max = 0.0, tang_max = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      lap[i] = std::abs(p.geo[i].lap_r);
      lap_max = std::max(lap_max, p.geo[i].lap_r);
      tang[i] = (1.0 - p.geo[i].eta) * std::abs(p.geo[i].grad_lap_r);
      tang_max = std::max(tang_max, tang[i]);
    }
    const Decay ld = tail_decay(radii, lap, lo, hi, o.r2_min);
    const bool bounded = std::isfinite(lap_max) && (ld.vanishes || ld.exponent >= -1e-3);
    CheckRow c = row("geometry_bounds", bounded ? Verdict::pass : Verdict::fail);
    c.constant = std::max({1.0, lap_max, tang_max});
    if (!bounded) {
      c.witness = {radii.back(), 0.0, 0.0, -lap.back()};
      c.note = "Delta r grows along the end";
    }
    rep.rows.push_back(c);
    rep.C = std::max(rep.C, c.constant);
  }

  // Long-range splitting: nabla^r q1 <= C r^{-1-rho'} (one-sided) and
  // |q2| <= C r^{-1-rho'}.
  {
    std::vector<double> dq1(radii.size()), q2(radii.size());
    double q1_max = 0.0;
    for (std::size_t i = 0; i < radii.size(); ++i) {
      const Jet q1 = p.q11[i] + p.q12[i];
      const Jet qq2 = p.q21[i] + p.q22[i];
      q1_max = std::max(q1_max, std::abs(q1.v));
      dq1[i] = std::max(0.0, denoise(q1.d1, q1.s1));
      q2[i] = std::abs(denoise(qq2.v, qq2.s0));
    }
    const Decay a = tail_decay(radii, dq1, lo, hi, o.r2_min);
    const Decay b = tail_decay(radii, q2, lo, hi, o.r2_min);
    rep.rho_prime = std::min(implied(a, 1.0, 1.0, o.rho_max), implied(b, 1.0, 1.0, o.rho_max));
    Verdict v = Verdict::pass;
    CheckRow c = row("long_range", v);
    if (!std::isfinite(q1_max)) {
      v = Verdict::fail;
      c.note = "q1 unbounded";
    } else if ((!a.vanishes && !a.reliable) || (!b.vanishes && !b.reliable)) {
      v = Verdict::inconclusive;
      c.note = "decay fit R^2 below threshold";
    } else if (rep.rho_prime <= 0.0) {
      v = Verdict::fail;
      c.witness = implied(a, 1.0, 1.0, o.rho_max) <= 0.0 ? a.last : b.last;
      c.note = "no positive rho'";
    }
    c.verdict = v;
    c.exponent = rep.rho_prime;
    rep.rows.push_back(c);
  }

  // Single end with a Dirichlet wall: r-balls are bounded, so compactness
  // holds on (lambda0, inf).
  rep.rows.push_back(row("compactness", Verdict::pass, "bounded r-balls"));

  // Regularity splitting: every bound fixes an upper limit on rho.
  {
    const std::size_t n = radii.size();
    std::vector<double> d11(n), dd11(n), d12(n), v21(n), d21(n), cross(n), v22(n);
    for (std::size_t i = 0; i < n; ++i) {
      const Jet& a = p.q11[i];
      const Jet& b = p.q12[i];
      const Jet& c = p.q21[i];
      d11[i] = std::abs(denoise(a.d1, a.s1));
      dd11[i] = std::abs(denoise(a.d2, a.s2));
      d12[i] = std::abs(denoise(b.d1, b.s1));
      v21[i] = std::abs(denoise(c.v, c.s0));
      d21[i] = std::abs(denoise(c.d1, c.s1));
      cross[i] = std::max(0.0, denoise(c.v, c.s0) * denoise(a.d1, a.s1));
      v22[i] = std::abs(denoise(p.q22[i].v, p.q22[i].s0));
    }
    struct Item {
      const std::vector<double>* g;
      double offset, scale;
    };
    // |q11'| <= r^{-(1+rho/2)/2}, |q11''|, |q12'|, |q22| <= r^{-1-rho/2},
    // |q21| <= r^{-rho}, |q21'|, q21 q11' <= r^{-1-rho}.
    const std::array<Item, 7> items{{{&d11, 0.5, 0.25},
                                     {&dd11, 1.0, 0.5},
                                     {&d12, 1.0, 0.5},
                                     {&v21, 0.0, 1.0},
                                     {&d21, 1.0, 1.0},
                                     {&cross, 1.0, 1.0},
                                     {&v22, 1.0, 0.5}}};
    double rho = o.rho_max;
    bool unreliable = false;
    Witness w;
    for (const auto& it : items) {
      const Decay dk = tail_decay(radii, *it.g, lo, hi, o.r2_min);
      if (!dk.vanishes && !dk.reliable) unreliable = true;
      const double cand = implied(dk, it.offset, it.scale, o.rho_max);
      if (cand < rho) {
        rho = cand;
        w = dk.last;
      }
    }
    rep.rho = rho;
    CheckRow c = row("regularity", Verdict::pass);
    c.exponent = rho;
    if (unreliable) {
      c.verdict = Verdict::inconclusive;
      c.note = "decay fit R^2 below threshold";
    } else if (rho <= 0.0) {
      c.verdict = Verdict::fail;
      c.witness = w;
      c.note = "no positive rho";
    }
    rep.rows.push_back(c);
  }

  const CriticalEnergy ce = critical_energy(model.split, o.horizon);
  rep.lambda0 = ce.lambda0;
  rep.lambda0_conclusive = ce.conclusive;
  {
    CheckRow c = row("critical_energy", ce.conclusive ? Verdict::pass : Verdict::inconclusive);
    c.constant = ce.lambda0;
    c.exponent = ce.residual;
    if (!ce.conclusive) c.note = "tail of q1 has not settled at the horizon";
    rep.rows.push_back(c);
  }
  rep.beta_c = rep.recomputed_beta_c();
  return rep;
}

ConditionReport check_conditions(const Model& model, const ConditionOptions& options) {
  if (const auto* w = std::get_if<WarpedModel>(&model)) return check_conditions(*w, options);
  const TwoEndLine line = std::get<TwoEndLine>(model);
  Potential V;
  V.name = "line";
  V.fn = [line](double r) { return Jet::exact(line.potential(r), line.potential_d1(r)); };
  CutoffSpec cut;
  cut.r0 = line.r0;
  return check_conditions(WarpedModel::make(WarpProfile::constant(1), V, cut), options);
}

// ---------------------------------------------------------------------------
// 2-D escape fields

EscapeField2D EscapeField2D::exterior_disk() {
  EscapeField2D f;
  f.name = "exterior_disk";
  f.r = [](double x, double y) { return std::hypot(x, y); };
  f.inside = [](double x, double y) { return std::hypot(x, y) > 1.0; };
  for (int k = 0; k < 32; ++k) {
    const double t = 2.0 * std::numbers::pi * k / 32.0;
    f.boundary.push_back({std::cos(t), std::sin(t), std::cos(t), std::sin(t)});
  }
  return f;
}

EscapeField2D EscapeField2D::hyperbola(double /*K*/, double log_coeff) {
  EscapeField2D f;
  f.name = "hyperbola";
  f.r = [log_coeff](double x, double y) {
    const double u = (y - x) * (y - x);
    return std::sqrt(x * x + y * y + log_coeff * std::log(u + 2.0));
  };
  f.inside = [](double x, double y) { return x * y < 1.0; };
  f.r0 = 8.0;
  // Boundary xy = 1 beyond the radius where the flow points inward.
  const double c = log_coeff;
  const double rho_in = c > 2.0 ? std::sqrt(2.0 * c / (c - 2.0)) * 1.05 : 2.5;
  for (int k = 0; k <= 40; ++k) {
    const double rho = rho_in * std::pow(64.0, k / 40.0);
    // x^2 + 1/x^2 = rho^2 on the branch x > 1.
    const double s = rho * rho;
    const double x = std::sqrt(0.5 * (s + std::sqrt(s * s - 4.0)));
    for (int sgn : {1, -1}) {
      for (bool swap : {false, true}) {
        double px = sgn * x, py = sgn / x;
        if (swap) std::swap(px, py);
        const double nn = std::hypot(py, px);
        f.boundary.push_back({px, py, -py / nn, -px / nn});
      }
    }
  }
  return f;
}

EscapeField2D EscapeField2D::saw_tooth(double K) {
  EscapeField2D f;
  f.name = "saw_tooth";
  f.r = [K](double x, double y) { return std::sqrt(1.0 + x * x + (y + K) * (y + K)); };
  auto lower = [K](double x) {
    double n = std::floor(x);
    if (n == x) n -= 1.0;
    return K * (x - n) / (1.0 + n);
  };
  f.inside = [lower](double x, double y) { return x > 0.0 && y > lower(x); };
  for (int n = 0; n < 64; ++n) {
    const double nx = -K / (1.0 + n), ny = 1.0, nn = std::hypot(nx, ny);
    for (double t : {0.25, 0.5, 0.75}) {
      f.boundary.push_back({n + t, K * t / (1.0 + n), nx / nn, ny / nn});
    }
    // vertical drop at x = n + 1
    f.boundary.push_back({n + 1.0, 0.5 * K / (1.0 + n), 1.0, 0.0});
  }
  for (double y : {0.5, 2.0, 8.0, 32.0}) f.boundary.push_back({0.0, y, 1.0, 0.0});
  return f;
}

namespace {

struct Deriv2D {
  double rx = 0, ry = 0, rxx = 0, rxy = 0, ryy = 0;
};

Deriv2D fd_once(const std::function<double(double, double)>& r, double x, double y, double h) {
  Deriv2D d;
  const double c = r(x, y);
  const double e = r(x + h, y), w = r(x - h, y), n = r(x, y + h), s = r(x, y - h);
  d.rx = (e - w) / (2 * h);
  d.ry = (n - s) / (2 * h);
  d.rxx = (e - 2 * c + w) / (h * h);
  d.ryy = (n - 2 * c + s) / (h * h);
  d.rxy = (r(x + h, y + h) - r(x + h, y - h) - r(x - h, y + h) + r(x - h, y - h)) / (4 * h * h);
  return d;
}

// Centered differences at h and h/2 combined by Richardson extrapolation.
Deriv2D fd(const std::function<double(double, double)>& r, double x, double y, double h) {
  const Deriv2D a = fd_once(r, x, y, h), b = fd_once(r, x, y, 0.5 * h);
  auto rich = [](double coarse, double fine) { return (4.0 * fine - coarse) / 3.0; };
  return {rich(a.rx, b.rx), rich(a.ry, b.ry), rich(a.rxx, b.rxx), rich(a.rxy, b.rxy),
          rich(a.ryy, b.ryy)};
}

struct Sample2D {
  double x, y, r;
  Deriv2D d;
  double eta;
};

// Smallest eigenvalue of the symmetric 2x2 matrix [[a, b], [b, c]].
double min_eig(double a, double b, double c) {
  return 0.5 * (a + c) - std::sqrt(0.25 * (a - c) * (a - c) + b * b);
}

double deficit_2d(const Sample2D& s, double sigma, double floor) {
  const auto& d = s.d;
  const double g2 = d.rx * d.rx + d.ry * d.ry;
  // nabla^r |dr|^2 = 2 (grad r)^T H (grad r)
  const double radial = 2.0 * (d.rx * (d.rxx * d.rx + d.rxy * d.ry) + d.ry * (d.rxy * d.rx + d.ryy * d.ry));
  const double corr = 0.5 * s.eta * radial / (g2 * g2);
  // r (H - corr dr dr) - (sigma/2) |dr|^2 ell, ell = I - eta |dr|^{-2} dr dr
  const double et = s.eta / g2;
  const double a = s.r * (d.rxx - corr * d.rx * d.rx) - 0.5 * sigma * g2 * (1.0 - et * d.rx * d.rx);
  const double b = s.r * (d.rxy - corr * d.rx * d.ry) + 0.5 * sigma * g2 * et * d.rx * d.ry;
  const double c = s.r * (d.ryy - corr * d.ry * d.ry) - 0.5 * sigma * g2 * (1.0 - et * d.ry * d.ry);
  const double def = -min_eig(a, b, c);
  return def > floor ? def : 0.0;
}

}  // namespace

ConditionReport check_escape_2d(const EscapeField2D& field, const ConditionOptions& o) {
  if (!field.r || !field.inside) throw ContractError("escape field needs r and a domain predicate");
  ConditionReport rep;
  std::vector<Sample2D> samples;
  const auto rhos = geometric_radii(field.rho_min, field.rho_max,
                                    std::pow(field.rho_max / field.rho_min, 1.0 / field.radii));
  for (double rho : rhos) {
    for (int k = 0; k < field.angles; ++k) {
      const double t = 2.0 * std::numbers::pi * (k + 0.5) / field.angles;
      const double x = rho * std::cos(t), y = rho * std::sin(t);
      if (!field.inside(x, y)) {
        ++rep.skipped;
        continue;
      }
      const double r = field.r(x, y);
      if (!std::isfinite(r)) throw EvaluationError("non-finite escape function", rho);
      Sample2D s{x, y, r, fd(field.r, x, y, field.fd_rel * rho), 1.0 - chi(2.0 * r / field.r0)};
      samples.push_back(s);
    }
  }
  rep.points = samples.size();
  if (samples.empty()) throw ContractError("no escape-field samples inside the domain");
  rep.r_min = kInf;
  rep.r_max = 0.0;
  for (const auto& s : samples) {
    rep.r_min = std::min(rep.r_min, s.r);
    rep.r_max = std::max(rep.r_max, s.r);
  }

  // r >= 1 and |dr|^2 bounded, with the decay of | |dr|^2 - 1 |.
  {
    CheckRow c = row("escape", Verdict::pass);
    double g2max = 0.0, g2min = kInf;
    std::vector<double> rr, dev;
    for (const auto& s : samples) {
      const double g2 = s.d.rx * s.d.rx + s.d.ry * s.d.ry;
      g2max = std::max(g2max, g2);
      g2min = std::min(g2min, g2);
      rr.push_back(s.r);
      const double e = std::abs(g2 - 1.0);
      dev.push_back(e > field.fd_floor ? e : 0.0);
      if (s.r < 1.0 && c.verdict == Verdict::pass) {
        c.verdict = Verdict::fail;
        c.witness = {s.r, s.x, s.y, s.r - 1.0};
        c.note = "r < 1 inside the domain";
      }
    }
    const Decay dd = tail_decay(rr, dev, 0.0, kInf, 0.5);
    rep.dr2_exponent = dd.vanishes ? kInf : dd.exponent;
    c.constant = g2max;
    c.exponent = rep.dr2_exponent;
    if (c.verdict == Verdict::pass && g2min < 1e-6) {
      c.verdict = Verdict::fail;
      c.note = "|dr| degenerates";
    }
    rep.rows.push_back(c);
  }

  // Convexity via the smallest eigenvalue of the 2x2 form; tau also from the
  // decay of nabla^r |dr|^2 <= C r^{-1-tau/2}.
  std::vector<double> rr(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) rr[i] = samples[i].r;
  auto deficit_at = [&](double sigma) {
    std::vector<double> out(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      out[i] = deficit_2d(samples[i], sigma, field.fd_floor);
    }
    return out;
  };
  const double lo = rep.r_max / 16.0, hi = kInf;
  const Convexity cv = bisect_convexity(rr, deficit_at, lo, hi, o);
  {
    CheckRow c = row("convexity", cv.failed ? Verdict::fail : Verdict::pass);
    c.constant = cv.C;
    c.exponent = cv.tau;
    if (cv.failed) {
      c.witness = cv.witness;
      for (const auto& s : samples) {
        if (s.r == cv.witness.r) {
          c.witness.x = s.x;
          c.witness.y = s.y;
        }
      }
      c.note = "no sigma > 0 with a decaying deficit";
    }
    rep.rows.push_back(c);
  }
  // Margins inside the noise floor count as zero, which lets the bisection
  // overshoot by about 2 fd_floor; report the safe side.
  rep.sigma = std::max(0.0, cv.sigma - 4.0 * field.fd_floor);
  rep.tau = cv.failed ? 0.0 : cv.tau;
  rep.C = cv.C;
  {
    std::vector<double> rad(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& d = samples[i].d;
      const double v = 2.0 * (d.rx * (d.rxx * d.rx + d.rxy * d.ry) + d.ry * (d.rxy * d.rx + d.ryy * d.ry));
      rad[i] = std::abs(v) * samples[i].r > field.fd_floor ? std::abs(v) : 0.0;
    }
    const Decay dk = tail_decay(rr, rad, lo, hi, 0.5);
    // |nabla^r |dr|^2| <= C r^{-1-tau/2}
    if (!dk.vanishes) rep.tau = std::min(rep.tau, 2.0 * (dk.exponent - 1.0));
  }

  // ell . grad Delta r needs third derivatives: wide-step differences of the
  // FD Laplacian, reported with reduced confidence.
  {
    std::vector<double> g(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) {
      const auto& s = samples[i];
      const double H = 4.0 * field.fd_rel * std::hypot(s.x, s.y);
      auto lap = [&](double x, double y) {
        const Deriv2D d = fd(field.r, x, y, field.fd_rel * std::hypot(s.x, s.y));
        return d.rxx + d.ryy;
      };
      // Richardson over H and H/2 keeps the O(H^2) error from tilting the
      // gradient off the radial direction.
      auto grad = [&](double step) {
        return std::pair{(lap(s.x + step, s.y) - lap(s.x - step, s.y)) / (2 * step),
                         (lap(s.x, s.y + step) - lap(s.x, s.y - step)) / (2 * step)};
      };
      const auto [cx, cy] = grad(H);
      const auto [fx, fy] = grad(0.5 * H);
      const double gx = (4.0 * fx - cx) / 3.0, gy = (4.0 * fy - cy) / 3.0;
      const double g2 = s.d.rx * s.d.rx + s.d.ry * s.d.ry;
      const double et = s.eta / g2;
      const double proj = gx * s.d.rx + gy * s.d.ry;
      const double lx = gx - et * s.d.rx * proj, ly = gy - et * s.d.ry * proj;
      const double v = std::hypot(lx, ly);
      g[i] = v * s.r * s.r > 1e2 * field.fd_floor ? v : 0.0;
    }
    const Decay dk = tail_decay(rr, g, lo, hi, 0.5);
    CheckRow c = row("third_derivative", Verdict::pass, "wide-step differences, reduced confidence");
    c.exponent = dk.vanishes ? kInf : dk.exponent;
    if (!dk.vanishes && !dk.reliable) c.verdict = Verdict::inconclusive;
    if (!dk.vanishes && dk.reliable) rep.tau = std::min(rep.tau, 2.0 * (dk.exponent - 1.0));
    rep.rows.push_back(c);
  }
  rep.tau = std::clamp(rep.tau, 0.0, o.tau_max);
  if (rep.tau <= 0.0) {
    rep.rows[1].verdict = Verdict::fail;
    rep.rows[1].note = "no positive tau";
  }

  // The flow of grad r must not leave the domain through the boundary.
  {
    CheckRow c = row("boundary", Verdict::pass);
    c.witness.margin = kInf;
    for (const auto& b : field.boundary) {
      const Deriv2D d = fd(field.r, b.x, b.y, 1e-3 * std::max(1.0, std::hypot(b.x, b.y)));
      const double g = std::hypot(d.rx, d.ry);
      const double m = (d.rx * b.nx + d.ry * b.ny) / g;
      if (m < c.witness.margin) c.witness = {field.r(b.x, b.y), b.x, b.y, m};
    }
    if (field.boundary.empty()) {
      c.witness.margin = 0.0;
      c.note = "no boundary samples";
    } else if (c.witness.margin < -1e-8) {
      c.verdict = Verdict::fail;
      c.note = "grad r points out of the domain";
    }
    rep.rows.push_back(c);
  }

  rep.lambda0 = 0.0;
  rep.rho_prime = kInf;
  rep.beta_c = rep.recomputed_beta_c();
  return rep;
}

}  // namespace radlab
