#include <doctest.h>

#include <atomic>
#include <cmath>
#include <random>
#include <stdexcept>

#include "radlab/kernels.hpp"
#include "radlab/model.hpp"

using namespace radlab;

TEST_CASE("OpenMP kernels reproduce the serial ones bit for bit") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const std::size_t n = 5003;
  std::vector<cplx> lo(n), di(n), up(n), x(n), y1(n), y2(n);
  for (std::size_t j = 0; j < n; ++j) {
    lo[j] = {u(rng), u(rng)};
    di[j] = {u(rng), u(rng)};
    up[j] = {u(rng), u(rng)};
    x[j] = {u(rng), u(rng)};
  }
  kernels::serial::tridiag_matvec(lo, di, up, x, y1);
  kernels::omp::tridiag_matvec(lo, di, up, x, y2);
  CHECK(y1 == y2);

  std::vector<double> w(n), v(n);
  std::vector<int> ann(n);
  for (std::size_t j = 0; j < n; ++j) {
    w[j] = std::abs(u(rng));
    v[j] = u(rng);
    ann[j] = static_cast<int>(j / 700);
  }
  std::vector<double> s1(8), s2(8);
  kernels::serial::annulus_sums(w, ann, v, s1);
  kernels::omp::annulus_sums(w, ann, v, s2);
  CHECK(s1 == s2);

  const Model m = WarpedModel::make(WarpProfile::power(3, 2.0), Potential::coulomb(1.0));
  std::vector<double> xs;
  for (int j = 0; j < 2000; ++j) xs.push_back(1.0 + 0.05 * j);
  const auto a = kernels::serial::sample_nodes(m, xs);
  const auto b = kernels::omp::sample_nodes(m, xs);
  REQUIRE(a.size() == b.size());
  for (std::size_t j = 0; j < a.size(); ++j) {
    CHECK(a[j].W == b[j].W);
    CHECK(a[j].q1 == b[j].q1);
  }
}

TEST_CASE("parallel_for runs every index once and rethrows") {
  std::vector<std::atomic<int>> hits(1000);
  kernels::parallel_for(hits.size(), [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) CHECK(h.load() == 1);
  CHECK_THROWS_AS(kernels::parallel_for(10,
                                        [](std::size_t i) {
                                          if (i == 3) throw std::runtime_error("boom");
                                        }),
                  std::runtime_error);
}
