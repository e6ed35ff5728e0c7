#pragma once

#include <set>
#include <string>
#include <vector>

#include "radlab/conditions.hpp"
#include "radlab/model.hpp"

namespace radlab {

// Run configuration, a sectioned key = value text:
//
//   [model]            profile, d, theta, delta, C, kappa, amp, order, c, table,
//                      potential, potential_c, potential_p, well_depth, well_a,
//                      well_b, r0, lambda0, lambda1, left, two_sided, field, K,
//                      log_coeff
//   [grid]             r_max, h, mode_cap
//   [output]           dir, svg
//   [experiment NAME]  type = check|solve|lap|radiation|hoelder|rellich|
//                      sommerfeld|riccati|energy, then the keys of that type
//
// '#' starts a comment; lists are comma separated. See README for the keys
// accepted by each experiment type.

struct ModelConfig {
  // power | stretched_exp | exponential | sinh_squared | constant | tabulated
  // | two_end | escape2d
  std::string profile = "power";
  int d = 2;
  double theta = 1.0;
  double delta = 0.5;
  double C = 1.0;
  double kappa = 1.0;
  double amp = 0.0;
  double order = 0.0;
  double c = 1.0;
  std::string table;  // CSV with columns r,f (tabulated)
  // zero | constant | power | coulomb | well
  std::string potential = "zero";
  double potential_c = 0.0;
  double potential_p = 1.0;
  double well_depth = 0.0;
  double well_a = 1.0;
  double well_b = 2.0;
  double r0 = 2.0;
  // two_end
  double lambda0 = 0.0;
  double lambda1 = 2.0;
  double left = 40.0;
  bool two_sided = false;
  // escape2d: disk | hyperbola | saw_tooth
  std::string field = "disk";
  double K = 1.0;
  double log_coeff = -1.0;  // < 0: same as K
};

struct GridConfig {
  double r_max = 256.0;
  double h = 0.02;
  double mode_cap = 0.0;
};

struct ExperimentConfig {
  std::string name;
  std::string type;
  int line = 0;
  std::set<std::string> given;  // keys set explicitly in the file

  double lambda = 1.0;
  double gamma = 0.0;  // solve: z = lambda + i gamma
  std::vector<double> gammas{0.1, 0.01, 0.001};
  std::vector<double> betas{0.0, 0.5};
  double beta_c = -1.0;  // < 0: from the condition report
  double s = 1.0;
  std::vector<double> gaps{0.2, 0.1, 0.05, 0.025, 0.0125};
  double gamma0 = 1e-3;
  int probes = 8;
  double slack = 0.1;
  std::string source = "bump";  // bump | modulated | zero
  double source_a = 2.0;
  double source_b = 3.0;
  double source_k = -1.0;  // modulated: < 0 means sqrt(2 (lambda - lambda0))
  double factor = 2.0;
  double tol = 1e-4;
  int sign = 1;
  double mu = 0.0;
  double lo = -10.0, hi = 10.0;  // rellich interval
  double fit_lo = -1.0, fit_hi = -1.0;  // riccati; < 0: r_max/100 and r_max
  std::string method = "outgoing";  // outgoing | shift
  double hform_C = -1.0, hform_tau = -1.0;  // < 0: from the condition report
  double absorb = 7.0;
  double delta = 0.5;
  std::vector<int> nus{0, 1, 2, 3, 4, 5, 6};
  int n_max = 12;
  double r_max = -1.0, h = -1.0;  // < 0: the [grid] values
};

struct RunConfig {
  ModelConfig model;
  GridConfig grid;
  std::vector<ExperimentConfig> experiments;
  std::string out_dir = "radlab-out";
  bool svg = true;
  std::string text;  // the parsed source, hashed into every output header
};

const std::vector<std::string>& experiment_types();

// Throws ConfigError carrying every violation found.
RunConfig parse_config(const std::string& text);

bool is_escape_field(const ModelConfig& m);
// Throws ConfigError for an escape-field config or an unreadable table.
Model build_model(const ModelConfig& m);
EscapeField2D build_field(const ModelConfig& m);

}  // namespace radlab
