#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace radlab {

using cplx = std::complex<double>;

// Nodes x_j on [x_min, x_max] together with the escape-function value r(x_j)
// at each node. On a warped half-line r(x) = x; on multi-end models r is
// constant on the ends that do not escape. Dyadic annuli F_nu are indicator
// sets {2^nu <= r < 2^(nu+1)} with nu >= 0 (r < 2 belongs to annulus 0).
class RadialGrid {
 public:
  using Radius = std::function<double(double)>;

  static RadialGrid uniform(double x_min, double x_max, double h, Radius radius = {});
  static RadialGrid geometric(double x_min, double x_max, double ratio, Radius radius = {});
  static RadialGrid from_nodes(std::vector<double> nodes, Radius radius = {});

  std::size_t size() const noexcept { return x_.size(); }
  double x(std::size_t j) const { return x_[j]; }
  double radius(std::size_t j) const { return r_[j]; }
  double weight(std::size_t j) const { return w_[j]; }
  int annulus(std::size_t j) const { return annulus_[j]; }
  std::span<const double> nodes() const noexcept { return x_; }
  std::span<const double> radii() const noexcept { return r_; }
  std::span<const double> weights() const noexcept { return w_; }
  std::span<const int> annuli() const noexcept { return annulus_; }

  int annulus_count() const noexcept { return annulus_count_; }
  // True when the outermost annulus is cut off by the end of the grid.
  bool outer_partial() const noexcept { return outer_partial_; }
  bool is_uniform() const noexcept { return uniform_; }
  // Uniform spacing; 0 for non-uniform grids.
  double spacing() const noexcept { return h_; }
  double x_min() const { return x_.front(); }
  double x_max() const { return x_.back(); }

 private:
  RadialGrid(std::vector<double> nodes, Radius radius, bool uniform, double h);

  std::vector<double> x_;
  std::vector<double> r_;
  std::vector<double> w_;
  std::vector<int> annulus_;
  int annulus_count_ = 0;
  bool outer_partial_ = false;
  bool uniform_ = false;
  double h_ = 0.0;
};

int annulus_index(double r);

// After the measure-flattening unitary u = f^{(d-1)/4} phi solutions live in
// flat L^2(dr); "unreduced" functions are the original phi.
enum class Representation { reduced, unreduced };

struct GridFunction {
  std::vector<cplx> values;
  Representation representation = Representation::reduced;

  GridFunction() = default;
  explicit GridFunction(std::size_t n, Representation rep = Representation::reduced)
      : values(n, cplx{0.0, 0.0}), representation(rep) {}
  GridFunction(std::vector<cplx> v, Representation rep = Representation::reduced)
      : values(std::move(v)), representation(rep) {}

  std::size_t size() const noexcept { return values.size(); }
  cplx& operator[](std::size_t j) { return values[j]; }
  const cplx& operator[](std::size_t j) const { return values[j]; }
};

// Samples a real callable at every grid node x_j.
GridFunction sample_function(const RadialGrid& grid, const std::function<cplx(double)>& fn,
                             Representation rep = Representation::reduced);

// Trapezoid-weighted inner product <phi, psi> = sum w_j conj(phi_j) psi_j.
cplx inner(const RadialGrid& grid, const GridFunction& phi, const GridFunction& psi);
double l2_norm(const RadialGrid& grid, const GridFunction& phi);

// Three-point derivative d/dx on possibly non-uniform nodes; one-sided
// second-order stencils at the two ends.
std::vector<cplx> derivative(const RadialGrid& grid, std::span<const cplx> values);

}  // namespace radlab
