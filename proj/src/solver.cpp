#include "radlab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include "radlab/error.hpp"
#include "radlab/kernels.hpp"
#include "radlab/phase.hpp"

namespace radlab {

namespace {

double inf_norm(std::span<const cplx> v) {
  double m = 0.0;
  for (const auto& x : v) m = std::max(m, std::abs(x));
  return m;
}

// Real symmetric tridiagonal form of h_mu on the interior nodes.
struct SymTridiag {
  std::vector<double> d, e;
};

SymTridiag dirichlet_matrix(std::span<const NodeSample> samples, const RadialGrid& grid,
                            double mu) {
  AssemblyOptions relaxed;
  relaxed.strict_resolution = false;
  const RadialOperator op =
      assemble_radial_operator(samples, grid, mu, {0.0, 0.0}, OuterPolicy::dirichlet, {}, relaxed);
  SymTridiag t;
  t.d.resize(op.size());
  t.e.assign(op.size(), 0.0);
  for (std::size_t i = 0; i < op.size(); ++i) t.d[i] = op.diag[i].real();
  for (std::size_t i = 0; i + 1 < op.size(); ++i) t.e[i] = op.upper[i].real();
  return t;
}

// Eigenvalues (and optionally eigenvectors, column-major n x count) with
// 0-based indices [il, iu].
std::vector<double> stevr_by_index(SymTridiag t, int il, int iu, std::vector<double>* vectors) {
  const auto n = static_cast<lapack_int>(t.d.size());
  const int count = iu - il + 1;
  if (count <= 0) return {};
  std::vector<double> w(t.d.size());
  std::vector<lapack_int> isuppz(2 * static_cast<std::size_t>(std::max(count, 1)));
  lapack_int m = 0;
  double dummy = 0.0;
  double* zptr = &dummy;
  lapack_int ldz = 1;
  if (vectors) {
    vectors->assign(static_cast<std::size_t>(n) * count, 0.0);
    zptr = vectors->data();
    ldz = n;
  }
  const lapack_int info =
      LAPACKE_dstevr(LAPACK_COL_MAJOR, vectors ? 'V' : 'N', 'I', n, t.d.data(), t.e.data(), 0.0,
                     0.0, il + 1, iu + 1, 0.0, &m, w.data(), zptr, ldz, isuppz.data());
  if (info != 0) throw Error("dstevr failed with info = " + std::to_string(info));
  w.resize(static_cast<std::size_t>(m));
  return w;
}

RadialGrid refined_grid(const Model& model, const RadialGrid& grid, double factor) {
  return make_grid(model, grid.x_max(), grid.spacing() / factor);
}

}  // namespace

TridiagonalLU::TridiagonalLU(std::span<const cplx> lower, std::span<const cplx> diag,
                             std::span<const cplx> upper) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || n == 0) {
    throw ContractError("tridiagonal bands must have the diagonal's length");
  }
  d_.assign(diag.begin(), diag.end());
  dl_.assign(lower.begin() + 1, lower.end());
  du_.assign(upper.begin(), upper.end() - 1);
  du2_.assign(n > 2 ? n - 2 : 1, cplx{});
  ipiv_.assign(n, 0);

  double amax = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double col = std::abs(diag[j]);
    if (j > 0) col += std::abs(upper[j - 1]);
    if (j + 1 < n) col += std::abs(lower[j + 1]);
    anorm_ = std::max(anorm_, col);
    amax = std::max({amax, std::abs(diag[j]), std::abs(lower[j]), std::abs(upper[j])});
  }

  const auto ln = static_cast<lapack_int>(n);
  lapack_int info = LAPACKE_zgttrf(ln, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data());
  if (info > 0) throw ConditioningError("exactly singular tridiagonal system", 0.0);
  if (info < 0) throw Error("zgttrf: illegal argument " + std::to_string(-info));

  double umax = std::max({inf_norm(d_), inf_norm(du_), inf_norm(du2_)});
  growth_ = amax > 0 ? umax / amax : 1.0;

  info = LAPACKE_zgtcon('1', ln, dl_.data(), d_.data(), du_.data(), du2_.data(), ipiv_.data(),
                        anorm_, &rcond_);
  if (info != 0) throw Error("zgtcon failed with info = " + std::to_string(info));
}

std::vector<cplx> TridiagonalLU::solve(std::span<const cplx> b) const {
  if (b.size() != d_.size()) throw ContractError("right-hand side has the wrong length");
  std::vector<cplx> x(b.begin(), b.end());
  const auto n = static_cast<lapack_int>(d_.size());
  const lapack_int info =
      LAPACKE_zgttrs(LAPACK_COL_MAJOR, 'N', n, 1, dl_.data(), d_.data(), du_.data(), du2_.data(),
                     ipiv_.data(), x.data(), n);
  if (info != 0) throw Error("zgttrs failed with info = " + std::to_string(info));
  return x;
}

ResolventSolution resolve(const RadialOperator& op, const RadialGrid& grid,
                          const GridFunction& psi, const SolverOptions& options) {
  if (psi.size() != grid.size()) throw ContractError("psi does not match the grid");
  if (op.size() + op.first + (op.policy == OuterPolicy::dirichlet ? 1 : 0) != grid.size()) {
    throw ContractError("operator was assembled on a different grid");
  }
  const double gamma = std::abs(op.z.imag());
  if (op.policy == OuterPolicy::dirichlet) {
    if (gamma == 0.0) throw ContractError("shift method needs Im z != 0");
    const double reach = gamma * (grid.x_max() - grid.x_min());
    if (options.enforce_shift_guard && reach < options.shift_guard) {
      throw ContractError("shift guard violated: Gamma (R_max - x_min) = " + std::to_string(reach) +
                          " < " + std::to_string(options.shift_guard));
    }
  }

  const TridiagonalLU lu(op.lower, op.diag, op.upper);
  if (lu.rcond() < options.rcond_min) {
    throw ConditioningError("near-singular resolvent system", lu.rcond());
  }
  const std::vector<cplx> b = op.rhs(psi);
  std::vector<cplx> x = lu.solve(b);

  const std::size_t n = op.size();
  std::vector<cplx> r(n);
  auto backward_error = [&]() {
    kernels::tridiag_matvec(op.lower, op.diag, op.upper, x, r);
    for (std::size_t i = 0; i < n; ++i) r[i] -= b[i];
    const double denom = lu.norm1() * inf_norm(x) + inf_norm(b);
    return denom > 0 ? inf_norm(r) / denom : 0.0;
  };

  SolveReport report;
  report.rcond = lu.rcond();
  report.pivot_growth = lu.pivot_growth();
  report.backward_error = backward_error();
  if (report.backward_error > options.residual_tol || report.pivot_growth > 1e8) {
    const auto dx = lu.solve(r);
    for (std::size_t i = 0; i < n; ++i) x[i] -= dx[i];
    ++report.refinements;
    report.backward_error = backward_error();
  }
  if (report.backward_error > options.residual_tol) {
    throw ConditioningError("backward error " + std::to_string(report.backward_error) +
                                " above tolerance after refinement",
                            lu.rcond());
  }

  ResolventSolution sol;
  sol.mu = op.mu;
  sol.z = op.z;
  sol.method = op.policy == OuterPolicy::outgoing ? Method::outgoing : Method::shift;
  sol.phi = GridFunction(grid.size(), psi.representation);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(x[i].real()) || !std::isfinite(x[i].imag())) {
      throw ConditioningError("non-finite solution value", lu.rcond());
    }
    sol.phi[op.first + i] = x[i];
  }
  const GridFunction applied = op.apply(sol.phi);
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t j = op.first + i;
    acc += grid.weight(j) * std::norm(applied[j] - psi[j]);
  }
  sol.residual = std::sqrt(acc);
  sol.report = report;
  return sol;
}

ResolventSolution resolve_outgoing(const Model& model, const RadialGrid& grid, double mu,
                                   double lambda, int sign, const GridFunction& psi, double gamma,
                                   const SolverOptions& options, const AssemblyOptions& assembly) {
  if (sign != 1 && sign != -1) throw ContractError("sign must be +1 or -1");
  if (gamma < 0.0) throw ContractError("gamma must be nonnegative");
  const double lambda0 = model_critical_energy(model).lambda0;
  if (!in_certified_window(model, lambda, lambda0)) {
    throw ContractError("lambda = " + std::to_string(lambda) +
                        " is outside the eigenvalue-free window");
  }
  const double rl = r_lambda(model, lambda, lambda0);
  const auto samples = sample_grid(model, grid);
  const NodeSample& last = samples.back();
  if (last.r < rl) throw ContractError("R_max lies inside the cutoff region of the phase");
  const cplx z{lambda, sign * gamma};
  const cplx a = phase_value(model, z, sign, rl, grid.x_max(), true, mu * last.mode_coeff);
  if (!(a.real() > 0.0)) throw BranchError("outgoing phase has Re a <= 0 at R_max", last.r);
  const RadialOperator op = assemble_radial_operator(samples, grid, mu, z, OuterPolicy::outgoing,
                                                     static_cast<double>(sign) * a, assembly);
  return resolve(op, grid, psi, options);
}

int sturm_count(std::span<const double> d, std::span<const double> e, double x) {
  int count = 0;
  double q = 1.0;
  const double tiny = std::numeric_limits<double>::min();
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double off = i > 0 ? e[i - 1] : 0.0;
    q = d[i] - x - (i > 0 ? off * off / q : 0.0);
    if (q == 0.0) q = -tiny;
    if (q < 0.0) ++count;
  }
  return count;
}

std::vector<double> dirichlet_eigenvalues(const Model& model, double mu, const RadialGrid& grid,
                                          int il, int iu) {
  const auto samples = sample_grid(model, grid);
  return stevr_by_index(dirichlet_matrix(samples, grid, mu), il, iu, nullptr);
}

EigenScanResult eigen_scan(const Model& model, double mu, const RadialGrid& grid, double lo,
                           double hi, const EigenScanOptions& options) {
  if (!(hi > lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw ContractError("eigen_scan needs a bounded interval lo < hi");
  }
  EigenScanResult out;
  out.lo = lo;
  out.hi = hi;
  out.lambda0 = options.lambda0;

  const auto samples = sample_grid(model, grid);
  const SymTridiag t = dirichlet_matrix(samples, grid, mu);
  const int il = sturm_count(t.d, t.e, lo);
  const int iu = sturm_count(t.d, t.e, hi) - 1;
  if (iu < il) return out;

  std::vector<double> vectors;
  const auto values = stevr_by_index(t, il, iu, &vectors);
  const std::size_t n = t.d.size();

  const RadialGrid doubled = make_grid(model, 2.0 * grid.x_max(), grid.spacing());
  const auto tv = thresholds(model);

  for (std::size_t k = 0; k < values.size(); ++k) {
    EigenEntry e;
    e.value = values[k];
    e.index = il + static_cast<int>(k);
    GridFunction v(grid.size());
    for (std::size_t i = 0; i < n; ++i) v[i + 1] = vectors[k * n + i];
    e.profile = besov_norms(grid, v);
    e.decay = profile_decay(e.profile);
    const auto far = dirichlet_eigenvalues(model, mu, doubled, e.index, e.index);
    e.drift = far.empty() ? std::numeric_limits<double>::infinity() : std::abs(far[0] - e.value);
    for (double th : tv) {
      if (std::abs(e.value - th) < options.threshold_window) e.near_threshold = true;
    }
    e.artifact = !e.near_threshold && !e.decay.decays && e.drift > 10.0 * options.tol;
    e.refined = e.value;
    out.entries.push_back(std::move(e));
  }

  if (options.refine) {
    std::vector<std::size_t> genuine;
    for (std::size_t k = 0; k < out.entries.size(); ++k) {
      if (!out.entries[k].artifact && !out.entries[k].near_threshold) genuine.push_back(k);
    }
    if (!genuine.empty()) {
      const int lo_i = out.entries[genuine.front()].index;
      const int hi_i = out.entries[genuine.back()].index;
      const auto e2 = dirichlet_eigenvalues(model, mu, refined_grid(model, grid, 2.0), lo_i, hi_i);
      const auto e4 = dirichlet_eigenvalues(model, mu, refined_grid(model, grid, 4.0), lo_i, hi_i);
      for (std::size_t k : genuine) {
        auto& e = out.entries[k];
        const auto off = static_cast<std::size_t>(e.index - lo_i);
        if (off >= e2.size() || off >= e4.size()) continue;
        const double r1 = (4.0 * e2[off] - e.value) / 3.0;
        const double r2 = (4.0 * e4[off] - e2[off]) / 3.0;
        e.refined = (16.0 * r2 - r1) / 15.0;
      }
    }
  }
  return out;
}

}  // namespace radlab
