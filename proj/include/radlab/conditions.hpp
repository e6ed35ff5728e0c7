#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "radlab/fit.hpp"
#include "radlab/model.hpp"

namespace radlab {

enum class Verdict { pass, fail, inconclusive };
const char* to_string(Verdict v);

struct Witness {
  double r = 0.0;
  double x = 0.0, y = 0.0;  // 2-D checks only
  double margin = 0.0;      // negative on a failed inequality
};

struct CheckRow {
  std::string name;
  Verdict verdict = Verdict::pass;
  Witness witness;
  double constant = 0.0;
  double exponent = 0.0;
  std::string note;
};

struct ConditionReport {
  std::vector<CheckRow> rows;
  double sigma = 0.0;
  double tau = 0.0;
  double rho_prime = 0.0;
  // +inf when the check does not assess it (2-D escape fields).
  double rho = std::numeric_limits<double>::infinity();
  double C = 0.0;
  double lambda0 = 0.0;
  bool lambda0_conclusive = true;
  double beta_c = 0.0;
  double dr2_exponent = 0.0;  // decay of | |dr|^2 - 1 | (2-D)

  // grid metadata
  double r_min = 1.0, r_max = 0.0;
  std::size_t points = 0;
  std::size_t skipped = 0;

  Verdict overall() const;
  const CheckRow* find(const std::string& name) const;
  double recomputed_beta_c() const;
};

struct ConditionOptions {
  double sigma_max = 8.0;
  double tau_max = 8.0;
  double rho_max = 8.0;
  double horizon = 16384.0;
  double ratio = 1.01;      // geometric grid ratio
  double fit_span = 100.0;  // fits use [horizon / fit_span, horizon]
  double min_rate = 0.05;   // slowest decay accepted as "decaying"
  double r2_min = 0.9;
  double inflation = 0.05;  // safety factor on the extracted C
};

// Warped end: Conditions on escape function, convexity and the derivative
// bounds, long-range splitting (rho'), compactness and the regularity
// splitting (rho), plus lambda0 and beta_c.
ConditionReport check_conditions(const WarpedModel& model, const ConditionOptions& options = {});
// Line models are checked through their escaping end viewed as a 1-D warped end.
ConditionReport check_conditions(const Model& model, const ConditionOptions& options = {});

// min over the radii of C r^{-tau} - deficit_sigma(r); >= 0 certifies the
// convexity bound with these constants on that grid.
double convexity_margin(const WarpedModel& model, double sigma, double tau, double C,
                        const std::vector<double>& radii);

std::vector<double> geometric_radii(double r_min, double r_max, double ratio);

struct BoundaryPoint {
  double x = 0.0, y = 0.0;
  double nx = 0.0, ny = 0.0;  // inward normal proxy
};

struct EscapeField2D {
  std::string name;
  std::function<double(double, double)> r;  // smooth across the boundary
  std::function<bool(double, double)> inside;
  // Polar samples rho in [rho_min, rho_max] (geometric) times angles.
  double rho_min = 4.0, rho_max = 256.0;
  int radii = 48, angles = 96;
  double fd_rel = 0.02;   // FD step relative to the sample radius
  double fd_floor = 1e-5; // margins below this are FD noise
  double r0 = 4.0;        // cutoff scale in eta
  std::vector<BoundaryPoint> boundary;

  static EscapeField2D exterior_disk();
  // r^2 = x^2 + y^2 + c ln((y - x)^2 + 2) on xy < 1. On the boundary
  // (1/2) grad r^2 . grad(xy) = 2 - c + 2c/(x^2 + y^2), so the flow points
  // inward at large radius only for c > 2. The default c = K matches that
  // identity; c = K/2 with K = 3 does not.
  static EscapeField2D hyperbola(double K, double log_coeff);
  static EscapeField2D hyperbola(double K) { return hyperbola(K, K); }
  static EscapeField2D saw_tooth(double K);
};

ConditionReport check_escape_2d(const EscapeField2D& field, const ConditionOptions& options = {});

}  // namespace radlab
