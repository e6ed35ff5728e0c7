#include "radlab/grid.hpp"

#include <cmath>

#include "radlab/error.hpp"

namespace radlab {

int annulus_index(double r) {
  if (!(r >= 2.0)) return 0;
  return static_cast<int>(std::floor(std::log2(r)));
}

RadialGrid::RadialGrid(std::vector<double> nodes, Radius radius, bool uniform, double h)
    : x_(std::move(nodes)), uniform_(uniform), h_(uniform ? h : 0.0) {
  const std::size_t n = x_.size();
  if (n < 3) throw ContractError("radial grid needs at least three nodes");
  for (std::size_t j = 1; j < n; ++j) {
    if (!(x_[j] > x_[j - 1])) throw ContractError("radial grid nodes must be strictly increasing");
  }
  r_.resize(n);
  w_.resize(n);
  annulus_.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    r_[j] = radius ? radius(x_[j]) : x_[j];
    annulus_[j] = annulus_index(r_[j]);
  }
  w_[0] = 0.5 * (x_[1] - x_[0]);
  w_[n - 1] = 0.5 * (x_[n - 1] - x_[n - 2]);
  for (std::size_t j = 1; j + 1 < n; ++j) w_[j] = 0.5 * (x_[j + 1] - x_[j - 1]);

  int top = 0;
  for (int a : annulus_) top = std::max(top, a);
  annulus_count_ = top + 1;
  const double outer_edge = std::ldexp(1.0, top + 1);
  outer_partial_ = r_.back() < outer_edge * (1.0 - 1e-12);
}

RadialGrid RadialGrid::uniform(double x_min, double x_max, double h, Radius radius) {
  if (!(h > 0) || !(x_max > x_min)) throw ContractError("uniform grid needs h > 0 and x_max > x_min");
  const double steps = (x_max - x_min) / h;
  const auto m = static_cast<std::size_t>(std::llround(steps));
  if (std::abs(steps - static_cast<double>(m)) > 1e-6 * std::max(1.0, steps)) {
    throw ContractError("uniform grid: (x_max - x_min) must be a multiple of h");
  }
  std::vector<double> nodes(m + 1);
  for (std::size_t j = 0; j <= m; ++j) nodes[j] = x_min + static_cast<double>(j) * h;
  nodes.back() = x_max;
  return RadialGrid(std::move(nodes), std::move(radius), true, h);
}

RadialGrid RadialGrid::geometric(double x_min, double x_max, double ratio, Radius radius) {
  if (!(ratio > 1.0) || !(x_min > 0) || !(x_max > x_min)) {
    throw ContractError("geometric grid needs ratio > 1 and 0 < x_min < x_max");
  }
  const auto m = static_cast<std::size_t>(std::ceil(std::log(x_max / x_min) / std::log(ratio)));
  std::vector<double> nodes(m + 1);
  for (std::size_t j = 0; j <= m; ++j) nodes[j] = x_min * std::pow(ratio, static_cast<double>(j));
  nodes.back() = x_max;
  if (nodes[m] <= nodes[m - 1]) nodes.erase(nodes.begin() + static_cast<std::ptrdiff_t>(m - 1));
  return RadialGrid(std::move(nodes), std::move(radius), false, 0.0);
}

RadialGrid RadialGrid::from_nodes(std::vector<double> nodes, Radius radius) {
  return RadialGrid(std::move(nodes), std::move(radius), false, 0.0);
}

GridFunction sample_function(const RadialGrid& grid, const std::function<cplx(double)>& fn,
                             Representation rep) {
  GridFunction out(grid.size(), rep);
  for (std::size_t j = 0; j < grid.size(); ++j) out[j] = fn(grid.x(j));
  return out;
}

cplx inner(const RadialGrid& grid, const GridFunction& phi, const GridFunction& psi) {
  cplx s{0.0, 0.0};
  for (std::size_t j = 0; j < grid.size(); ++j) s += grid.weight(j) * std::conj(phi[j]) * psi[j];
  return s;
}

double l2_norm(const RadialGrid& grid, const GridFunction& phi) {
  double s = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) s += grid.weight(j) * std::norm(phi[j]);
  return std::sqrt(s);
}

std::vector<cplx> derivative(const RadialGrid& grid, std::span<const cplx> f) {
  const std::size_t n = grid.size();
  std::vector<cplx> d(n);
  const auto x = grid.nodes();
  for (std::size_t j = 1; j + 1 < n; ++j) {
    const double hm = x[j] - x[j - 1];
    const double hp = x[j + 1] - x[j];
    d[j] = -hp / (hm * (hm + hp)) * f[j - 1] + (hp - hm) / (hm * hp) * f[j] +
           hm / (hp * (hm + hp)) * f[j + 1];
  }
  {
    const double h1 = x[1] - x[0];
    const double h2 = x[2] - x[1];
    d[0] = -(2 * h1 + h2) / (h1 * (h1 + h2)) * f[0] + (h1 + h2) / (h1 * h2) * f[1] -
           h1 / (h2 * (h1 + h2)) * f[2];
  }
  {
    const double hn = x[n - 1] - x[n - 2];
    const double hm = x[n - 2] - x[n - 3];
    d[n - 1] = (2 * hn + hm) / (hn * (hn + hm)) * f[n - 1] - (hn + hm) / (hn * hm) * f[n - 2] +
               hn / (hm * (hn + hm)) * f[n - 3];
  }
  return d;
}

}  // namespace radlab
