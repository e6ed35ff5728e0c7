// Serial reference kernels against their OpenMP variants.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "radlab/kernels.hpp"
#include "radlab/model.hpp"

namespace {

using radlab::cplx;
namespace kernels = radlab::kernels;

struct Tridiag {
  std::vector<cplx> lower, diag, upper, x, y;
  explicit Tridiag(std::size_t n) : lower(n), diag(n), upper(n), x(n), y(n) {
    for (std::size_t j = 0; j < n; ++j) {
      const double t = static_cast<double>(j);
      lower[j] = {-0.5, 0.0};
      upper[j] = {-0.5, 0.0};
      diag[j] = {1.0 + 1e-3 * t, 0.01};
      x[j] = {std::sin(0.01 * t), std::cos(0.02 * t)};
    }
  }
};

template <bool Parallel>
void BM_tridiag_matvec(benchmark::State& state) {
  Tridiag t(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::tridiag_matvec(t.lower, t.diag, t.upper, t.x, t.y);
    else kernels::serial::tridiag_matvec(t.lower, t.diag, t.upper, t.x, t.y);
    benchmark::DoNotOptimize(t.y.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_annulus_sums(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> w(n, 0.01), values(n);
  std::vector<int> annuli(n);
  for (std::size_t j = 0; j < n; ++j) {
    const double r = 1.0 + 0.01 * static_cast<double>(j);
    annuli[j] = static_cast<int>(std::floor(std::log2(std::max(r, 1.0))));
    values[j] = 1.0 / r;
  }
  std::vector<double> sums(static_cast<std::size_t>(annuli.back()) + 1);
  for (auto _ : state) {
    if constexpr (Parallel) kernels::omp::annulus_sums(w, annuli, values, sums);
    else kernels::serial::annulus_sums(w, annuli, values, sums);
    benchmark::DoNotOptimize(sums.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_sample_nodes(benchmark::State& state) {
  const radlab::Model model =
      radlab::WarpedModel::make(radlab::WarpProfile::power(3, 2.0), radlab::Potential::coulomb(1.0));
  const auto n = static_cast<std::size_t>(state.range(0));
  std::vector<double> xs(n);
  for (std::size_t j = 0; j < n; ++j) xs[j] = 1.0 + 0.02 * static_cast<double>(j);
  for (auto _ : state) {
    auto s = Parallel ? kernels::omp::sample_nodes(model, xs) : kernels::serial::sample_nodes(model, xs);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_tridiag_matvec<false>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_tridiag_matvec<true>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_annulus_sums<false>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_annulus_sums<true>)->RangeMultiplier(8)->Range(1 << 12, 1 << 21);
BENCHMARK(BM_sample_nodes<false>)->RangeMultiplier(8)->Range(1 << 10, 1 << 16);
BENCHMARK(BM_sample_nodes<true>)->RangeMultiplier(8)->Range(1 << 10, 1 << 16);

BENCHMARK_MAIN();
