#pragma once

// Randomized invariant checks shared by the property tests and the
// acceptance run. Each returns how many seeded instances were tried and how
// many violated the invariant.

#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "radlab/experiments.hpp"
#include "radlab/phase.hpp"
#include "radlab/solver.hpp"

namespace radlab::invariants {

struct Outcome {
  std::string name;
  int instances = 0;
  int failures = 0;
  double worst = 0.0;  // largest violation measure seen (relative error or excess)

  void record(bool ok, double measure) {
    ++instances;
    if (!ok) ++failures;
    worst = std::max(worst, measure);
  }
};

struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(gen); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }
};

inline Model random_model(Rng& rng) {
  const int d = rng.integer(2, 3);
  const Potential V = rng.integer(0, 1) ? Potential::zero() : Potential::coulomb(rng.uniform(-1.0, 1.0));
  switch (rng.integer(0, 3)) {
    case 0:
      return WarpedModel::make(WarpProfile::power(d, rng.uniform(0.5, 2.0)), V);
    case 1:
      return WarpedModel::make(WarpProfile::exponential(d, 1.0, rng.uniform(0.5, 2.0)), V);
    case 2:
      return WarpedModel::make(WarpProfile::constant(1), V);
    default:
      return TwoEndLine{0.0, rng.uniform(1.0, 3.0), 10.0};
  }
}

inline GridFunction random_bump(Rng& rng, const RadialGrid& g) {
  const double lo = g.x_min() + 0.5, hi = g.x_max() - 0.5;
  const double a = rng.uniform(lo, hi - 1.0), b = rng.uniform(a + 0.5, std::min(hi, a + 8.0));
  const double k = rng.uniform(-3.0, 3.0);
  const auto f = bump(a, b);
  return sample_function(g, [&](double x) { return f(x) * std::exp(cplx{0.0, k * x}); });
}

inline Outcome cutoff_partition(std::uint64_t seed, int count) {
  Outcome o{"cutoff partition"};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const CutoffSpec c{rng.uniform(2.0, 8.0)};
    const int m = rng.integer(0, 8), n = m + rng.integer(1, 6);
    const double r = std::exp(rng.uniform(0.0, std::log(4096.0)));
    const double cn = c.chi_n(r, n);
    // dyadic pieces telescope: chi_bar_m chi_n = chi_n - chi_m for n > m
    const double tele = std::abs(c.chi_mn(r, m, n) - (cn - c.chi_n(r, m)));
    const double part = std::abs(cn + c.chi_bar_n(r, n) - 1.0) + std::abs(c.eta(r) + chi(2.0 * r / c.r0) - 1.0);
    o.record(cn >= 0.0 && cn <= 1.0 && part == 0.0 && tele <= 1e-14, tele + part);
  }
  return o;
}

inline Outcome a_symmetry(std::uint64_t seed, int count) {
  Outcome o{"A-symmetry"};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const Model m = random_model(rng);
    const RadialGrid g = make_grid(m, 40.0, 0.05);
    const auto s = sample_grid(m, g);
    const GridFunction u = random_bump(rng, g), v = random_bump(rng, g);
    const cplx lhs = inner(g, apply_A(g, s, u), v), rhs = inner(g, u, apply_A(g, s, v));
    const double rel = std::abs(lhs - rhs) / (1.0 + std::abs(lhs));
    o.record(rel <= 1e-12, rel);
  }
  return o;
}

inline Outcome besov_duality(std::uint64_t seed, int count) {
  Outcome o{"Besov duality"};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const RadialGrid g = RadialGrid::uniform(1.0, 1.0 + 0.05 * rng.integer(400, 8000), 0.05);
    const double p = rng.uniform(-1.5, 0.5), q = rng.uniform(-1.5, 0.5), k = rng.uniform(0.0, 4.0);
    const GridFunction phi =
        sample_function(g, [&](double x) { return std::pow(x, p) * std::exp(cplx{0.0, k * x}); });
    const GridFunction psi =
        sample_function(g, [&](double x) { return cplx{std::pow(x, q) * std::cos(x), 0.0}; });
    const double bound = besov_norms(g, phi).b_star_norm() * besov_norms(g, psi).b_norm();
    const double ratio = std::abs(inner(g, phi, psi)) / bound;
    o.record(ratio <= 1.0 + 1e-12, std::max(0.0, ratio - 1.0));
  }
  return o;
}

inline Outcome resolvent_identity(std::uint64_t seed, int count) {
  Outcome o{"first resolvent identity"};
  Rng rng(seed);
  SolverOptions so;
  so.enforce_shift_guard = false;
  for (int i = 0; i < count; ++i) {
    const Model m = random_model(rng);
    const RadialGrid g = make_grid(m, 20.0, 0.05);
    const auto s = sample_grid(m, g);
    const cplx z{rng.uniform(0.2, 3.0), rng.uniform(0.05, 0.9)};
    const cplx w{rng.uniform(0.2, 3.0), rng.uniform(0.05, 0.9)};
    const double mu = rng.integer(0, 1) ? 0.0 : 2.0;
    const auto opz = assemble_radial_operator(s, g, mu, z, OuterPolicy::dirichlet);
    const auto opw = assemble_radial_operator(s, g, mu, w, OuterPolicy::dirichlet);
    const GridFunction psi = random_bump(rng, g);
    const GridFunction rz = resolve(opz, g, psi, so).phi, rw = resolve(opw, g, psi, so).phi;
    const GridFunction rzrw = resolve(opz, g, rw, so).phi;
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < g.size(); ++j) {
      num += std::norm(rz[j] - rw[j] - (z - w) * rzrw[j]);
      den += std::norm(rz[j] - rw[j]);
    }
    const double rel = std::sqrt(num / den);
    o.record(rel < 1e-9, rel);
  }
  return o;
}

inline Outcome theta_concavity(std::uint64_t seed, int count) {
  Outcome o{"Theta concavity"};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const WeightSpec w{rng.uniform(0.05, 0.99), rng.integer(0, 12)};
    const double r = std::exp(rng.uniform(0.0, std::log(1e5)));
    const double e = 1e-5 * r;
    const double fd = (w.theta(r + e) - w.theta(r - e)) / (2 * e);
    const double rel = std::abs(fd - w.theta_d1(r)) / w.theta_d1(r);
    const bool ok = w.theta(r) >= 0.0 && w.theta(r) <= 1.0 / w.delta && w.theta_d1(r) > 0.0 &&
                    w.theta_d2(r) <= 0.0 && rel < 1e-5;
    o.record(ok, rel);
  }
  return o;
}

inline Outcome branch_conjugation(std::uint64_t seed, int count) {
  Outcome o{"branch conjugation"};
  Rng rng(seed);
  for (int i = 0; i < count; ++i) {
    const Model m = random_model(rng);
    const double lambda0 = model_critical_energy(m).lambda0;
    const cplx z{lambda0 + rng.uniform(0.1, 4.0), rng.uniform(-0.9, 0.9)};
    const double rl = r_lambda(m, z.real(), lambda0);
    const double x = rng.uniform(2.0, 500.0);
    const cplx up = phase_value(m, z, 1, rl, x);
    const cplx down = phase_value(m, std::conj(z), -1, rl, x);
    const double rel = std::abs(down - std::conj(up)) / (1.0 + std::abs(up));
    o.record(rel <= 1e-13, rel);
  }
  return o;
}

inline std::vector<Outcome> all(int count) {
  return {cutoff_partition(101, count),   a_symmetry(202, count),      besov_duality(303, count),
          resolvent_identity(404, count), theta_concavity(505, count), branch_conjugation(606, count)};
}

}  // namespace radlab::invariants
