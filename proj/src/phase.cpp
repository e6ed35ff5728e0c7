#include "radlab/phase.hpp"

#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <limits>

#include "radlab/error.hpp"
#include "radlab/geometry.hpp"
#include "radlab/radial.hpp"

namespace radlab {

namespace {

constexpr cplx I{0.0, 1.0};

bool passes_from(const Model& model, double lambda, double lambda0, double start,
                 double horizon) {
  constexpr int per_octave = 64;
  const double ratio = std::exp2(1.0 / per_octave);
  for (double r = start; r <= horizon * (1 + 1e-12); r *= ratio) {
    if (lambda + lambda0 - 2.0 * q1_on_end(model, r).v < -1e-12) return false;
  }
  return true;
}

}  // namespace

double r_lambda(const Model& model, double lambda, double lambda0, double horizon) {
  if (!(lambda > lambda0)) throw ContractError("r_lambda needs lambda > lambda0");
  const double r0 = cutoff_r0(model);
  std::vector<double> candidates{r0};
  for (int n = 1; std::ldexp(1.0, n) <= horizon; ++n) {
    const double R = std::ldexp(1.0, n);
    if (R > r0) candidates.push_back(R);
  }
  for (double R : candidates) {
    if (passes_from(model, lambda, lambda0, std::max(1.0, 0.5 * R), horizon)) return R;
  }
  throw HorizonError("no r_lambda below the horizon for lambda = " + std::to_string(lambda));
}

cplx phase_value(const Model& model, cplx z, int sign, double r_lam, double x, bool corrected,
                 double extra) {
  const NodeSample s = sample(model, x);
  const double eta = 1.0 - chi(2.0 * s.r / r_lam);
  if (eta == 0.0) return {0.0, 0.0};
  const cplx w = z - s.q1 - extra;
  if (w.imag() == 0.0 && w.real() <= 0.0) {
    throw BranchError("z - q1 on the branch cut (-inf, 0]", s.r);
  }
  cplx a = s.dr * std::sqrt(2.0 * w);
  if (corrected) a += static_cast<double>(sign) * 0.25 * (-I * s.dr * s.q11_d1) / w;
  return eta * a;
}

PhaseSpec phase_a(const Model& model, cplx z, int sign, const RadialGrid& grid, double lambda0,
                  bool corrected) {
  if (!(z.real() > lambda0)) throw ContractError("phase needs Re z > lambda0");
  if (std::abs(z.imag()) >= 1.0) throw ContractError("phase needs |Im z| < 1");
  PhaseSpec p;
  p.z = z;
  p.sign = sign;
  p.corrected = corrected;
  p.r_lambda = r_lambda(model, z.real(), lambda0);
  p.x.assign(grid.nodes().begin(), grid.nodes().end());
  p.a.resize(grid.size());
  p.eta.resize(grid.size());
  for (std::size_t j = 0; j < grid.size(); ++j) {
    p.eta[j] = 1.0 - chi(2.0 * grid.radius(j) / p.r_lambda);
    p.a[j] = phase_value(model, z, sign, p.r_lambda, grid.x(j), corrected);
  }
  return p;
}

RiccatiResidual riccati_residual(std::span<const double> x, std::span<const cplx> a, cplx z,
                                 int sign, const Model& model, double fit_lo, double fit_hi) {
  const RadialGrid grid = RadialGrid::from_nodes(std::vector<double>(x.begin(), x.end()));
  const auto da = derivative(grid, a);
  RiccatiResidual out;
  std::vector<double> fx, fy;
  for (std::size_t j = 1; j + 1 < x.size(); ++j) {
    const NodeSample s = sample(model, x[j]);
    const cplx pra = -I * s.dr * da[j];
    const cplx rhs = 2.0 * s.dr * s.dr * (z - s.q1);
    const double res = std::abs(static_cast<double>(sign) * pra + a[j] * a[j] - rhs);
    out.r.push_back(s.r);
    out.residual.push_back(res);
    // residuals at the rounding level of the terms carry no decay information
    const double floor = 16.0 * std::numeric_limits<double>::epsilon() * std::max(std::norm(a[j]), std::abs(rhs));
    if (s.r >= fit_lo && s.r <= fit_hi && res > floor) {
      fx.push_back(s.r);
      fy.push_back(res);
    }
  }
  out.fit = fit_power_law(fx, fy);
  out.exponent = out.fit.slope;
  out.reliable = out.fit.count >= 3 && out.fit.r2 >= 0.9;
  return out;
}

RiccatiResidual riccati_residual(const PhaseSpec& phase, const Model& model,
                                 const RadialGrid& grid, double fit_lo, double fit_hi) {
  if (phase.a.size() != grid.size()) throw ContractError("phase does not match the grid");
  return riccati_residual(grid.nodes(), phase.a, phase.z, phase.sign, model, fit_lo, fit_hi);
}

RiccatiSolution riccati_exact(const Model& model, cplx z, int sign, const RadialGrid& grid,
                              double lambda0, const RiccatiOptions& options) {
  namespace ode = boost::numeric::odeint;
  using State = std::array<double, 4>;
  const std::size_t n = grid.size();
  const double rl = r_lambda(model, z.real(), lambda0);
  const cplx a_end = phase_value(model, z, sign, rl, grid.x_max());

  auto system = [&model, z](const State& s, State& ds, double x) {
    const NodeSample n = sample(model, x);
    const cplx b{s[0], s[1]};
    const cplx w = -2.0 * n.dr * n.dr * (z - n.q1) * b;
    ds = {s[2], s[3], w.real(), w.imag()};
  };

  const cplx db0 = static_cast<double>(sign) * I * a_end;
  State state{1.0, 0.0, db0.real(), db0.imag()};
  std::vector<State> states(n);
  states[n - 1] = state;

  if (options.adaptive) {
    std::vector<double> times(n);
    for (std::size_t k = 0; k < n; ++k) times[k] = grid.x(n - 1 - k);
    std::size_t k = 0;
    auto stepper = ode::make_dense_output(options.atol, options.rtol, ode::runge_kutta_dopri5<State>());
    const double dt0 = -std::min(0.01, 0.5 * (grid.x(n - 1) - grid.x(n - 2)));
    ode::integrate_times(stepper, system, state, times.begin(), times.end(), dt0,
                         [&](const State& s, double) { states[n - 1 - k++] = s; });
  } else {
    ode::runge_kutta_dopri5<State> stepper;
    double t = grid.x(n - 1);
    for (std::size_t j = n - 1; j-- > 0;) {
      const double span = t - grid.x(j);
      const auto steps = static_cast<long>(std::max(1.0, std::ceil(span / options.step - 1e-9)));
      const double dt = -span / static_cast<double>(steps);
      for (long s = 0; s < steps; ++s) {
        stepper.do_step(system, state, t, dt);
        t += dt;
      }
      t = grid.x(j);
      states[j] = state;
    }
  }

  RiccatiSolution out;
  out.z = z;
  out.sign = sign;
  out.x.assign(grid.nodes().begin(), grid.nodes().end());
  out.b.resize(n);
  out.db.resize(n);
  out.a.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    out.b[j] = {states[j][0], states[j][1]};
    out.db[j] = {states[j][2], states[j][3]};
    if (!(std::abs(out.b[j]) > 1e-300) || !std::isfinite(std::abs(out.b[j]))) {
      throw Error("Riccati linearization: b vanishes or overflows at r = " +
                  std::to_string(grid.radius(j)));
    }
    out.a[j] = -static_cast<double>(sign) * I * out.db[j] / out.b[j];
  }
  return out;
}

GridFunction apply_A(const RadialGrid& grid, std::span<const NodeSample> samples,
                     const GridFunction& phi, std::optional<Representation> expected) {
  if (expected && *expected != phi.representation) {
    throw ContractError("apply_A: grid function carries the wrong representation flag");
  }
  if (phi.size() != grid.size() || samples.size() != grid.size()) {
    throw ContractError("apply_A: grid function does not match the grid");
  }
  const std::size_t n = grid.size();
  GridFunction out(n, phi.representation);
  const auto d = derivative(grid, phi.values);
  if (phi.representation == Representation::unreduced) {
    for (std::size_t j = 0; j < n; ++j) {
      out[j] = -I * samples[j].dr * d[j] - 0.5 * I * samples[j].lap_r * phi[j];
    }
    return out;
  }
  if (grid.is_uniform()) {
    const double h = grid.spacing();
    for (std::size_t j = 1; j + 1 < n; ++j) {
      const double cp = 0.5 * (samples[j].dr + samples[j + 1].dr);
      const double cm = 0.5 * (samples[j - 1].dr + samples[j].dr);
      out[j] = -I * (cp * phi[j + 1] - cm * phi[j - 1]) / (2.0 * h);
    }
    for (std::size_t j : {std::size_t{0}, n - 1}) {
      out[j] = -I * (samples[j].dr * d[j] + 0.5 * samples[j].ddr * phi[j]);
    }
    return out;
  }
  for (std::size_t j = 0; j < n; ++j) {
    out[j] = -I * (samples[j].dr * d[j] + 0.5 * samples[j].ddr * phi[j]);
  }
  return out;
}

GridFunction apply_A(const Model& model, const RadialGrid& grid, const GridFunction& phi,
                     std::optional<Representation> expected) {
  const auto samples = sample_grid(model, grid);
  return apply_A(grid, samples, phi, expected);
}

}  // namespace radlab
