#include "radlab/radial.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "radlab/error.hpp"
#include "radlab/fit.hpp"
#include "radlab/kernels.hpp"

namespace radlab {

namespace {

double binomial(int n, int k) {
  if (n < 0 || k < 0 || k > n) return 0.0;
  double out = 1.0;
  for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
  return out;
}

void require_uniform(const RadialGrid& grid, const char* what) {
  if (!grid.is_uniform()) throw ContractError(std::string(what) + " needs a uniform grid");
}

}  // namespace

ModeSpectrum mode_spectrum(const CrossSection& cs, int d, double cap) {
  if (cap < 0) throw ContractError("mode cap must be nonnegative");
  ModeSpectrum out;
  out.cap = cap;
  switch (cs.kind) {
    case CrossSectionKind::point:
      out.modes.push_back({0.0, 1});
      break;
    case CrossSectionKind::circle:
      out.modes.push_back({0.0, 1});
      for (int k = 1; static_cast<double>(k) * k <= cap; ++k) out.modes.push_back({double(k) * k, 2});
      break;
    case CrossSectionKind::sphere: {
      if (d < 2) throw ContractError("sphere cross-section needs d >= 2");
      for (int l = 0;; ++l) {
        const double mu = static_cast<double>(l) * (l + d - 2);
        if (mu > cap) break;
        const double m = binomial(l + d - 1, d - 1) - binomial(l + d - 3, d - 1);
        out.modes.push_back({mu, static_cast<int>(std::lround(m))});
      }
      break;
    }
    case CrossSectionKind::abstract:
      for (const auto& [mu, m] : cs.eigenvalues) out.modes.push_back({mu, m});
      break;
    default:
      throw ContractError("unknown cross-section kind");
  }
  return out;
}

std::vector<NodeSample> sample_grid(const Model& model, const RadialGrid& grid) {
  return kernels::sample_nodes(model, grid.nodes());
}

bool RadialOperator::symmetric() const {
  for (std::size_t i = 0; i + 1 < size(); ++i) {
    if (lower[i + 1] != upper[i]) return false;
  }
  return true;
}

std::vector<cplx> RadialOperator::rhs(const GridFunction& psi) const {
  std::vector<cplx> b(size());
  for (std::size_t i = 0; i < size(); ++i) b[i] = psi[first + i];
  if (policy == OuterPolicy::outgoing && !b.empty()) b.back() *= 0.5;
  return b;
}

GridFunction RadialOperator::apply(const GridFunction& phi) const {
  const std::size_t n = size();
  std::vector<cplx> x(n), y(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = phi[first + i];
  kernels::tridiag_matvec(lower, diag, upper, x, y);
  if (policy == OuterPolicy::outgoing && n > 0) y.back() *= 2.0;
  GridFunction out(phi.size(), phi.representation);
  for (std::size_t i = 0; i < n; ++i) out[first + i] = y[i];
  return out;
}

RadialOperator assemble_radial_operator(const Model& model, const RadialGrid& grid, double mu,
                                        cplx z, OuterPolicy policy, cplx outgoing_coeff,
                                        const AssemblyOptions& options) {
  const auto samples = sample_grid(model, grid);
  return assemble_radial_operator(samples, grid, mu, z, policy, outgoing_coeff, options);
}

RadialOperator assemble_radial_operator(std::span<const NodeSample> samples,
                                        const RadialGrid& grid, double mu, cplx z,
                                        OuterPolicy policy, cplx outgoing_coeff,
                                        const AssemblyOptions& options) {
  require_uniform(grid, "radial operator");
  if (samples.size() != grid.size()) throw ContractError("samples do not match the grid");
  const std::size_t M = grid.size() - 1;
  const double h = grid.spacing();
  RadialOperator op;
  op.mu = mu;
  op.z = z;
  op.policy = policy;
  op.outgoing_coeff = outgoing_coeff;
  op.h = h;
  op.first = 1;
  const std::size_t n = policy == OuterPolicy::outgoing ? M : M - 1;
  op.lower.assign(n, cplx{-0.5 / (h * h), 0.0});
  op.upper.assign(n, cplx{-0.5 / (h * h), 0.0});
  op.diag.resize(n);
  op.potential.resize(n);
  op.lower[0] = 0.0;
  op.upper[n - 1] = 0.0;
  double kmax = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const NodeSample& s = samples[i + 1];
    const double w = s.W + mu * s.mode_coeff;
    if (!std::isfinite(w)) throw EvaluationError("non-finite operator entry", s.x);
    op.potential[i] = w;
    op.diag[i] = 1.0 / (h * h) + w - z;
    kmax = std::max(kmax, std::abs(z - w));
  }
  if (policy == OuterPolicy::outgoing) {
    const double w = op.potential[n - 1];
    op.diag[n - 1] = (1.0 - cplx{0.0, 1.0} * h * outgoing_coeff) / (2.0 * h * h) + 0.5 * (w - z);
  }
  op.points_per_wavelength = kmax > 0 ? 2.0 * std::numbers::pi / (h * std::sqrt(2.0 * kmax))
                                      : std::numeric_limits<double>::infinity();
  if (op.points_per_wavelength < options.ppw_min && options.strict_resolution) {
    throw ResolutionError("grid spacing resolves only " + std::to_string(op.points_per_wavelength) +
                              " points per wavelength",
                          op.points_per_wavelength);
  }
  return op;
}

double BesovProfile::b_norm() const {
  double s = 0.0;
  for (std::size_t nu = 0; nu < annulus_norms.size(); ++nu) {
    s += std::sqrt(std::ldexp(1.0, static_cast<int>(nu))) * annulus_norms[nu];
  }
  return s;
}

double BesovProfile::b_star_norm() const {
  double s = 0.0;
  for (double p : decay_profile()) s = std::max(s, p);
  return s;
}

std::vector<double> BesovProfile::decay_profile() const {
  std::vector<double> p(annulus_norms.size());
  for (std::size_t nu = 0; nu < p.size(); ++nu) {
    p[nu] = annulus_norms[nu] / std::sqrt(std::ldexp(1.0, static_cast<int>(nu)));
  }
  return p;
}

double BesovProfile::l2_norm() const {
  double s = 0.0;
  for (double a : annulus_norms) s += a * a;
  return std::sqrt(s);
}

BesovProfile BesovProfile::combine(const std::vector<std::pair<BesovProfile, int>>& parts) {
  BesovProfile out;
  for (const auto& [p, m] : parts) {
    if (p.annulus_norms.size() > out.annulus_norms.size()) {
      out.annulus_norms.resize(p.annulus_norms.size(), 0.0);
      out.measure = p.measure;
    }
    for (std::size_t nu = 0; nu < p.annulus_norms.size(); ++nu) {
      out.annulus_norms[nu] += m * p.annulus_norms[nu] * p.annulus_norms[nu];
    }
    out.outer_partial = out.outer_partial || p.outer_partial;
  }
  for (auto& a : out.annulus_norms) a = std::sqrt(a);
  return out;
}

BesovProfile besov_norms(const RadialGrid& grid, const GridFunction& phi) {
  if (phi.size() != grid.size()) throw ContractError("grid function does not match the grid");
  const auto count = static_cast<std::size_t>(grid.annulus_count());
  std::vector<double> sq(grid.size()), ones(grid.size(), 1.0);
  for (std::size_t j = 0; j < grid.size(); ++j) sq[j] = std::norm(phi[j]);
  BesovProfile out;
  out.annulus_norms.assign(count, 0.0);
  out.measure.assign(count, 0.0);
  kernels::annulus_sums(grid.weights(), grid.annuli(), sq, out.annulus_norms);
  kernels::annulus_sums(grid.weights(), grid.annuli(), ones, out.measure);
  for (auto& a : out.annulus_norms) a = std::sqrt(a);
  out.outer_partial = grid.outer_partial();
  return out;
}

DecayVerdict profile_decay(const BesovProfile& profile, int last, double tail_floor) {
  DecayVerdict v;
  const auto p = profile.decay_profile();
  std::vector<double> lr, lp;
  double pmax = 0.0;
  for (double x : p) pmax = std::max(pmax, x);
  std::vector<std::size_t> usable;
  for (std::size_t nu = 0; nu < p.size(); ++nu) {
    const double width = nu == 0 ? 1.0 : std::ldexp(1.0, static_cast<int>(nu));
    if (nu < profile.measure.size() && profile.measure[nu] >= 0.5 * width) usable.push_back(nu);
  }
  if (pmax == 0.0) {
    v.decays = true;
    return v;
  }
  const std::size_t take = std::min<std::size_t>(usable.size(), static_cast<std::size_t>(last));
  std::vector<double> xs, ys;
  for (std::size_t k = usable.size() - take; k < usable.size(); ++k) {
    xs.push_back(std::ldexp(1.0, static_cast<int>(usable[k])));
    ys.push_back(p[usable[k]]);
  }
  v.tail_ratio = usable.empty() ? p.back() / pmax : p[usable.back()] / pmax;
  const LinearFit fit = fit_power_law(xs, ys);
  v.slope = fit.count >= 2 ? fit.slope : 0.0;
  v.decays = v.tail_ratio <= tail_floor || (fit.count >= 2 && v.slope <= -0.25);
  return v;
}

double weighted_log_norm(const RadialGrid& grid, const GridFunction& phi, double s) {
  std::vector<double> terms;
  terms.reserve(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    const double a = std::abs(phi[j]);
    if (a == 0.0 || grid.weight(j) == 0.0) continue;
    terms.push_back(2.0 * s * std::log(grid.radius(j)) + std::log(grid.weight(j)) +
                    2.0 * std::log(a));
  }
  if (terms.empty()) return -std::numeric_limits<double>::infinity();
  const double m = *std::max_element(terms.begin(), terms.end());
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return 0.5 * (m + std::log(acc));
}

double weighted_norm(const RadialGrid& grid, const GridFunction& phi, double s) {
  return std::exp(weighted_log_norm(grid, phi, s));
}

GridFunction apply_pr(const RadialGrid& grid, std::span<const NodeSample> samples,
                      const GridFunction& u) {
  const auto du = derivative(grid, u.values);
  GridFunction out(u.size(), u.representation);
  for (std::size_t j = 0; j < u.size(); ++j) {
    out[j] = cplx{0.0, -1.0} * (samples[j].dr * du[j] - samples[j].half_lap * u[j]);
  }
  return out;
}

GridFunction apply_H0(const RadialGrid& grid, std::span<const NodeSample> samples, double mu,
                      const GridFunction& u) {
  require_uniform(grid, "H0");
  const std::size_t n = u.size();
  const double h = grid.spacing();
  std::vector<cplx> d2(n);
  for (std::size_t j = 1; j + 1 < n; ++j) d2[j] = (u[j - 1] - 2.0 * u[j] + u[j + 1]) / (h * h);
  d2[0] = d2[1];
  d2[n - 1] = d2[n - 2];
  GridFunction out(n, u.representation);
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = -0.5 * d2[j] + (samples[j].geom + mu * samples[j].mode_coeff) * u[j];
  }
  return out;
}

double h_form_constant(std::span<const NodeSample> samples, const HFormSpec& spec) {
  double C = spec.C;
  for (const auto& s : samples) {
    const double rt = std::pow(s.r, 1.0 + spec.tau);
    C = std::max(C, -0.5 * s.h_radial * rt);
    C = std::max(C, -0.5 * s.hess_ell * rt);
  }
  return C;
}

double h_form(const RadialGrid& grid, std::span<const NodeSample> samples, double mu,
              const GridFunction& u, const HFormSpec& spec, std::span<const double> extra) {
  const double C = h_form_constant(samples, spec);
  const auto du = derivative(grid, u.values);
  double s = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    const NodeSample& n = samples[j];
    const double decay = 2.0 * C * std::pow(n.r, -1.0 - spec.tau);
    const double grad2 = std::norm(du[j] - n.half_lap * u[j]);
    const double ang = 2.0 * mu * n.mode_coeff * std::norm(u[j]);
    double integrand = (n.h_radial + decay) * grad2 + (n.hess_ell + decay) * ang;
    if (spec.beta != 0.0) integrand *= std::pow(n.r, 2.0 * spec.beta);
    if (!extra.empty()) integrand *= extra[j];
    s += grid.weight(j) * integrand;
  }
  return s;
}

}  // namespace radlab
