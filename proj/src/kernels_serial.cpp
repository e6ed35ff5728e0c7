#include "radlab/kernels.hpp"

namespace radlab::kernels {

namespace serial {

void tridiag_matvec(std::span<const cplx> lower, std::span<const cplx> diag,
                    std::span<const cplx> upper, std::span<const cplx> x, std::span<cplx> y) {
  const std::size_t n = diag.size();
  for (std::size_t i = 0; i < n; ++i) {
    cplx s = diag[i] * x[i];
    if (i > 0) s += lower[i] * x[i - 1];
    if (i + 1 < n) s += upper[i] * x[i + 1];
    y[i] = s;
  }
}

void annulus_sums(std::span<const double> weights, std::span<const int> annuli,
                  std::span<const double> values, std::span<double> sums) {
  for (auto& s : sums) s = 0.0;
  for (std::size_t j = 0; j < values.size(); ++j) {
    sums[static_cast<std::size_t>(annuli[j])] += weights[j] * values[j];
  }
}

std::vector<NodeSample> sample_nodes(const Model& model, std::span<const double> xs) {
  std::vector<NodeSample> out(xs.size());
  for (std::size_t j = 0; j < xs.size(); ++j) out[j] = sample(model, xs[j]);
  return out;
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  for (std::size_t i = 0; i < n; ++i) body(i);
}

}  // namespace serial

}  // namespace radlab::kernels
