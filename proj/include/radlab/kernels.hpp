#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "radlab/model.hpp"

// Hot loops in two flavours. The serial versions are the reference; the
// OpenMP versions must reproduce them bit for bit (annulus sums keep the
// serial summation order inside each annulus).
namespace radlab::kernels {

using cplx = std::complex<double>;

namespace serial {
// y = T x for the tridiagonal T = (lower, diag, upper); lower[0] and
// upper[n-1] are ignored.
void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y);
// sums[nu] = sum over nodes in annulus nu of weights[j] * values[j].
void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums);
std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs);
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace serial

namespace omp {
void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y);
void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums);
std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs);
// Dynamic schedule; each index runs exactly once. Exceptions thrown by the
// body are rethrown on the calling thread (first by index).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);
}  // namespace omp

bool openmp_available();
int max_threads();
void set_threads(int n);

// Dispatch to the OpenMP variant when it was compiled in.
void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y);
void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums);
std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs);
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace radlab::kernels
