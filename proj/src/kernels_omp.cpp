#include <exception>
#include <vector>

#include "radlab/kernels.hpp"

#ifdef RADLAB_HAVE_OPENMP
#include <omp.h>
#endif

namespace radlab::kernels {

namespace omp {

void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y) {
  const auto n = static_cast<std::ptrdiff_t>(diag.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    cplx s = diag[i] * x[i];
    if (i > 0) s += lower[i] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
}

void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums) {
  const auto count = static_cast<std::ptrdiff_t>(sums.size());
  const std::size_t n = values.size();
  // One annulus per task, nodes visited in index order as in the serial sum.
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t nu = 0; nu < count; ++nu) {
    double s = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      if (annuli[j] == nu) s += weights[j] * values[j];
    }
    sums[static_cast<std::size_t>(nu)] = s;
  }
}

std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs) {
  std::vector<NodeSample> out(xs.size());
  parallel_for(xs.size(), [&](std::size_t j) { out[j] = sample(model, xs[j]); });
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(n);
  const auto count = static_cast<std::ptrdiff_t>(n);
#pragma omp parallel for schedule(dynamic, 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) {
    try {
      body(static_cast<std::size_t>(i));
    } catch (...) {
      errors[static_cast<std::size_t>(i)] = std::current_exception();
    }
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

}  // namespace omp

bool openmp_available() {
#ifdef RADLAB_HAVE_OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef RADLAB_HAVE_OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

void set_threads(int n) {
#ifdef RADLAB_HAVE_OPENMP
  if (n > 0) omp_set_num_threads(n);
#else
  (void)n;
#endif
}

#ifdef RADLAB_HAVE_OPENMP
namespace impl = omp;
#else
namespace impl = serial;
#endif

void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y) {
  impl::tridiag_matvec(lower, diag, upper, x, y);
}

void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums) {
  impl::annulus_sums(weights, annuli, values, sums);
}

std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs) {
  return impl::sample_nodes(model, xs);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  impl::parallel_for(n, body);
}

}  // namespace radlab::kernels
