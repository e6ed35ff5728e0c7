#include "radlab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "radlab/error.hpp"

namespace radlab {

namespace {

// Falling factorial p (p-1) ... (p-k+1).
double falling(double p, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= (p - i);
  return out;
}

bool finite(const LogWarp& w) {
  return std::isfinite(w.l0) && std::isfinite(w.l1) && std::isfinite(w.l2) &&
         std::isfinite(w.l3) && std::isfinite(w.l4);
}

}  // namespace

double chi(double t) {
  if (t <= 1.0) return 1.0;
  if (t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

double chi_d1(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return -30.0 * s * s * (1.0 - s) * (1.0 - s);
}

double chi_d2(double t) {
  if (t <= 1.0 || t >= 2.0) return 0.0;
  const double s = t - 1.0;
  return -60.0 * s * (1.0 - s) * (1.0 - 2.0 * s);
}

double CutoffSpec::chi_n(double r, int n) const { return chi(r / std::ldexp(1.0, n)); }

Jet operator+(const Jet& a, const Jet& b) {
  return {a.v + b.v, a.d1 + b.d1, a.d2 + b.d2, a.s0 + b.s0, a.s1 + b.s1, a.s2 + b.s2};
}

Jet operator*(double c, const Jet& a) {
  const double m = std::abs(c);
  return {c * a.v, c * a.d1, c * a.d2, m * a.s0, m * a.s1, m * a.s2};
}

double denoise(double v, double scale) {
  return std::abs(v) <= 1e-9 * scale ? 0.0 : v;
}

WarpProfile::WarpProfile(int d, std::string name, LogFn fn)
    : WarpProfile(d, std::move(name), std::move(fn),
                  CrossSection{d == 1 ? CrossSectionKind::point
                               : d == 2 ? CrossSectionKind::circle
                                        : CrossSectionKind::sphere,
                               {}}) {}

WarpProfile::WarpProfile(int d, std::string name, LogFn fn, CrossSection cs)
    : d_(d), name_(std::move(name)), fn_(std::move(fn)), cs_(std::move(cs)) {
  if (d_ < 1) throw ContractError("dimension must be at least 1");
  if (!fn_) throw ContractError("warp profile needs an evaluator");
}

WarpProfile WarpProfile::power(int d, double theta) {
  return WarpProfile(d, "power", [theta](double r) {
    return LogWarp{theta * std::log(r), theta / r, -theta / (r * r), 2.0 * theta / (r * r * r),
                   -6.0 * theta / (r * r * r * r)};
  });
}

WarpProfile WarpProfile::stretched_exp(int d, double delta, double theta) {
  return WarpProfile(d, "stretched_exp", [delta, theta](double r) {
    LogWarp w;
    w.l0 = delta * std::pow(r, theta);
    w.l1 = delta * falling(theta, 1) * std::pow(r, theta - 1);
    w.l2 = delta * falling(theta, 2) * std::pow(r, theta - 2);
    w.l3 = delta * falling(theta, 3) * std::pow(r, theta - 3);
    w.l4 = delta * falling(theta, 4) * std::pow(r, theta - 4);
    return w;
  });
}

WarpProfile WarpProfile::exponential(int d, double C, double kappa, double amp, double order) {
  if (!(C > 0)) throw ContractError("exponential warp needs C > 0");
  return WarpProfile(d, "exponential", [C, kappa, amp, order](double r) {
    LogWarp w;
    w.l0 = std::log(C) + kappa * r;
    w.l1 = kappa;
    if (amp != 0.0) {
      w.l0 += amp * std::pow(r, order);
      w.l1 += amp * falling(order, 1) * std::pow(r, order - 1);
      w.l2 = amp * falling(order, 2) * std::pow(r, order - 2);
      w.l3 = amp * falling(order, 3) * std::pow(r, order - 3);
      w.l4 = amp * falling(order, 4) * std::pow(r, order - 4);
    }
    return w;
  });
}

WarpProfile WarpProfile::sinh_squared(int d) {
  return WarpProfile(d, "sinh_squared", [](double r) {
    const double e = std::exp(-2.0 * r);
    const double coth = (1.0 + e) / (1.0 - e);
    const double csch2 = 4.0 * e / ((1.0 - e) * (1.0 - e));
    LogWarp w;
    w.l0 = 2.0 * (r + std::log1p(-e) - std::log(2.0));
    w.l1 = 2.0 * coth;
    w.l2 = -2.0 * csch2;
    w.l3 = 4.0 * coth * csch2;
    w.l4 = -4.0 * csch2 * csch2 - 8.0 * coth * coth * csch2;
    return w;
  });
}

WarpProfile WarpProfile::constant(int d, double c) {
  if (!(c > 0)) throw ContractError("constant warp needs c > 0");
  const double l0 = std::log(c);
  return WarpProfile(d, "constant", [l0](double) { return LogWarp{l0, 0, 0, 0, 0}; });
}

WarpProfile WarpProfile::tabulated(int d, std::vector<double> r, std::vector<double> f) {
  if (r.size() != f.size() || r.size() < 5) {
    throw ContractError("tabulated warp needs at least five (r, f) rows");
  }
  std::vector<double> lf(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    if (!(f[i] > 0)) throw EvaluationError("tabulated warp has f <= 0", r[i]);
    if (i > 0 && !(r[i] > r[i - 1])) throw ContractError("tabulated r must increase");
    lf[i] = std::log(f[i]);
  }
  const double step = (r.back() - r.front()) / static_cast<double>(r.size() - 1);
  auto L = [r, lf](double x) {
    const std::size_t n = r.size();
    if (x <= r.front()) return lf[0] + (lf[1] - lf[0]) / (r[1] - r[0]) * (x - r[0]);
    if (x >= r.back()) {
      return lf[n - 1] + (lf[n - 1] - lf[n - 2]) / (r[n - 1] - r[n - 2]) * (x - r[n - 1]);
    }
    const auto it = std::upper_bound(r.begin(), r.end(), x);
    std::size_t i = static_cast<std::size_t>(it - r.begin()) - 1;
    std::size_t lo = i == 0 ? 0 : i - 1;
    if (lo + 3 >= n) lo = n - 4;
    double s = 0.0;
    for (std::size_t a = lo; a < lo + 4; ++a) {
      double basis = 1.0;
      for (std::size_t b = lo; b < lo + 4; ++b) {
        if (b != a) basis *= (x - r[b]) / (r[a] - r[b]);
      }
      s += basis * lf[a];
    }
    return s;
  };
  return WarpProfile(d, "tabulated", [L, step](double x) {
    const double h = step;
    const double m2 = L(x - 2 * h), m1 = L(x - h), c = L(x), p1 = L(x + h), p2 = L(x + 2 * h);
    LogWarp w;
    w.l0 = c;
    w.l1 = (p1 - m1) / (2 * h);
    w.l2 = (p1 - 2 * c + m1) / (h * h);
    w.l3 = (p2 - 2 * p1 + 2 * m1 - m2) / (2 * h * h * h);
    w.l4 = (p2 - 4 * p1 + 6 * c - 4 * m1 + m2) / (h * h * h * h);
    return w;
  });
}

LogWarp WarpProfile::log_warp(double r) const {
  const LogWarp w = fn_(r);
  if (!finite(w)) throw EvaluationError("non-finite warp data for profile " + name_, r);
  return w;
}

double WarpProfile::f(double r) const { return std::exp(log_warp(r).l0); }

double GeometryPoint::f() const { return std::exp(log_f); }

GeometryPoint geometry_at(const WarpProfile& profile, const CutoffSpec& cutoffs, double r) {
  if (!(r >= 1.0)) throw ContractError("geometry_at needs r >= 1");
  const LogWarp w = profile.log_warp(r);
  const double a = 0.5 * (profile.dimension() - 1);
  GeometryPoint g;
  g.r = r;
  g.log_f = w.l0;
  g.df_over_f = w.l1;
  g.d2f_over_f = w.l2 + w.l1 * w.l1;
  g.dr2 = 1.0;
  g.lap_r = a * w.l1;
  g.grad_lap_r = a * w.l2;
  g.hess_coeff = 0.5 * w.l1;
  g.eta = cutoffs.eta(r);
  g.eta_tilde = g.eta / g.dr2;
  g.q_geom = g.eta_tilde * 0.125 * (g.lap_r * g.lap_r + 2.0 * g.grad_lap_r);
  if (!std::isfinite(g.q_geom)) throw EvaluationError("non-finite geometric potential", r);
  return g;
}

Jet geometric_term(const WarpProfile& profile, const CutoffSpec& cutoffs, double r, bool cut) {
  const LogWarp w = profile.log_warp(r);
  const double a = 0.5 * (profile.dimension() - 1);
  const double D0 = a * w.l1, D1 = a * w.l2, D2 = a * w.l3, D3 = a * w.l4;
  Jet G;
  G.v = 0.125 * (D0 * D0 + 2 * D1);
  G.s0 = 0.125 * (D0 * D0 + 2 * std::abs(D1));
  G.d1 = 0.125 * (2 * D0 * D1 + 2 * D2);
  G.s1 = 0.125 * (2 * std::abs(D0 * D1) + 2 * std::abs(D2));
  G.d2 = 0.125 * (2 * D1 * D1 + 2 * D0 * D2 + 2 * D3);
  G.s2 = 0.125 * (2 * D1 * D1 + 2 * std::abs(D0 * D2) + 2 * std::abs(D3));
  if (!cut) return G;
  const double e0 = cutoffs.eta(r), e1 = cutoffs.eta_d1(r), e2 = cutoffs.eta_d2(r);
  Jet out;
  out.v = e0 * G.v;
  out.s0 = e0 * G.s0;
  out.d1 = e1 * G.v + e0 * G.d1;
  out.s1 = std::abs(e1) * G.s0 + e0 * G.s1;
  out.d2 = e2 * G.v + 2 * e1 * G.d1 + e0 * G.d2;
  out.s2 = std::abs(e2) * G.s0 + 2 * std::abs(e1) * G.s1 + e0 * G.s2;
  return out;
}

Potential Potential::zero() { return {"zero", [](double) { return Jet{}; }, false}; }

Potential Potential::constant(double c) {
  return {"constant", [c](double) { return Jet::exact(c); }, false};
}

Potential Potential::power(double c, double p) {
  return {"power", [c, p](double r) {
            const double v = c * std::pow(r, -p);
            return Jet::exact(v, -p * v / r, p * (p + 1) * v / (r * r));
          },
          false};
}

Potential Potential::well(double depth, double a, double b) {
  if (!(b > a)) throw ContractError("well needs a < b");
  return {"well", [depth, a, b](double r) {
            const double eps = 1e-12 * std::max(1.0, std::abs(r));
            if (std::abs(r - a) <= eps || std::abs(r - b) <= eps) return Jet::exact(-0.5 * depth);
            return Jet::exact(r > a && r < b ? -depth : 0.0);
          },
          true};
}

Jet PotentialSplit::q1(double r) const {
  Jet out;
  if (q11) out = out + q11(r);
  if (q12) out = out + q12(r);
  return out;
}

Jet PotentialSplit::q2(double r) const {
  Jet out;
  if (q21) out = out + q21(r);
  if (q22) out = out + q22(r);
  return out;
}

PotentialSplit PotentialSplit::standard(const WarpProfile& profile, const CutoffSpec& cutoffs,
                                        const Potential& V) {
  PotentialSplit s;
  s.V = V.fn ? V.fn : [](double) { return Jet{}; };
  const JetFn v = s.V;
  const bool short_range = V.short_range;
  s.q11 = [profile, cutoffs, v, short_range](double r) {
    Jet g = geometric_term(profile, cutoffs, r, true);
    return short_range ? g : g + v(r);
  };
  s.q12 = [](double) { return Jet{}; };
  s.q21 = [](double) { return Jet{}; };
  s.q22 = [v, short_range](double r) { return short_range ? v(r) : Jet{}; };
  return s;
}

double effective_potential(const WarpProfile& profile, const CutoffSpec& cutoffs,
                           const PotentialSplit& split, double r, double tol) {
  const GeometryPoint g = geometry_at(profile, cutoffs, r);
  const double q = (split.V ? split.V(r).v : 0.0) + g.q_geom;
  const double q12 = split.q1(r).v + split.q2(r).v;
  const double mismatch = std::abs(q - q12);
  if (mismatch > tol * std::max(1.0, std::abs(q))) throw SplitMismatchError(r, mismatch);
  return q;
}

CriticalEnergy critical_energy(const PotentialSplit& split, double horizon, double tol,
                               int samples_per_block) {
  if (!(horizon >= 4.0)) throw ContractError("critical energy horizon must be at least 4");
  const int blocks = static_cast<int>(std::floor(std::log2(horizon)));
  std::vector<double> block_max(blocks, -std::numeric_limits<double>::infinity());
  for (int n = 0; n < blocks; ++n) {
    const double lo = std::ldexp(1.0, n);
    for (int k = 0; k <= samples_per_block; ++k) {
      const double r = lo * std::exp2(static_cast<double>(k) / samples_per_block);
      const double q = split.q1(r).v;
      if (!std::isfinite(q)) throw EvaluationError("non-finite q1", r);
      block_max[n] = std::max(block_max[n], q);
    }
  }
  CriticalEnergy out;
  out.block_sups.assign(blocks, 0.0);
  double running = -std::numeric_limits<double>::infinity();
  for (int n = blocks - 1; n >= 0; --n) {
    running = std::max(running, block_max[n]);
    out.block_sups[n] = running;
  }
  out.lambda0 = out.block_sups.back();
  out.residual = std::abs(out.block_sups[blocks - 2] - out.block_sups[blocks - 1]);
  out.conclusive = out.residual <= tol * std::max(1.0, std::abs(out.lambda0));
  return out;
}

cplx interpolate(const RadialGrid& grid, std::span<const cplx> values, double x) {
  const std::size_t n = grid.size();
  const auto xs = grid.nodes();
  const double span_eps = 1e-12 * std::max(1.0, std::abs(x));
  if (x < xs.front() - span_eps || x > xs.back() + span_eps) return {0.0, 0.0};
  std::size_t i;
  if (grid.is_uniform()) {
    const double u = (x - xs.front()) / grid.spacing();
    const double ui = std::round(u);
    if (std::abs(u - ui) < 1e-9) {
      const auto j = static_cast<std::size_t>(std::clamp(ui, 0.0, static_cast<double>(n - 1)));
      return values[j];
    }
    i = static_cast<std::size_t>(std::clamp(std::floor(u), 0.0, static_cast<double>(n - 2)));
  } else {
    const auto it = std::upper_bound(xs.begin(), xs.end(), x);
    i = it == xs.begin() ? 0 : static_cast<std::size_t>(it - xs.begin()) - 1;
    if (i >= n - 1) i = n - 2;
    if (std::abs(xs[i] - x) <= span_eps) return values[i];
  }
  std::size_t lo = i == 0 ? 0 : i - 1;
  if (lo + 3 >= n) lo = n - 4;
  cplx s{0.0, 0.0};
  for (std::size_t a = lo; a < lo + 4; ++a) {
    double basis = 1.0;
    for (std::size_t b = lo; b < lo + 4; ++b) {
      if (b != a) basis *= (x - xs[b]) / (xs[a] - xs[b]);
    }
    s += basis * values[a];
  }
  return s;
}

GridFunction radial_translation(const WarpProfile& profile, const RadialGrid& grid,
                                const GridFunction& psi, double t, Direction direction) {
  if (t < 0) throw ContractError("radial translation needs t >= 0; use the direction flag");
  if (psi.representation != Representation::unreduced) {
    throw ContractError("radial translation acts on unreduced functions");
  }
  const double a = 0.25 * (profile.dimension() - 1);
  const double sgn = direction == Direction::forward ? 1.0 : -1.0;
  GridFunction out(grid.size(), Representation::unreduced);
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double r = grid.x(j);
    const double y = r + sgn * t;
    if (y < grid.x_min() - 1e-12 || y > grid.x_max() + 1e-12) continue;
    const double factor = std::exp(a * (profile.log_warp(y).l0 - profile.log_warp(r).l0));
    out[j] = factor * interpolate(grid, psi.values, y);
  }
  return out;
}

cplx measure_inner(const WarpProfile& profile, const RadialGrid& grid, const GridFunction& phi,
                   const GridFunction& psi) {
  const double a = 0.5 * (profile.dimension() - 1);
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double w = grid.weight(j) * std::exp(a * profile.log_warp(grid.x(j)).l0);
    s += w * std::conj(phi[j]) * psi[j];
  }
  return s;
}

double measure_norm(const WarpProfile& profile, const RadialGrid& grid, const GridFunction& phi) {
  return std::sqrt(std::max(0.0, measure_inner(profile, grid, phi, phi).real()));
}

}  // namespace radlab
