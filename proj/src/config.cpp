#include "radlab/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "radlab/error.hpp"

namespace radlab {

namespace {

struct Entry {
  std::string key, value;
  int line = 0;
};

struct Section {
  std::string kind;  // model | grid | output | experiment
  std::string name;
  int line = 0;
  std::vector<Entry> entries;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string where(int line, const Section& sec) {
  std::string s = "line " + std::to_string(line) + ": [" + sec.kind;
  if (!sec.name.empty()) s += " " + sec.name;
  return s + "]";
}

const std::vector<std::string> kSourceKeys = {"source", "source_a", "source_b", "source_k"};

const std::map<std::string, std::vector<std::string>>& type_keys() {
  static const std::map<std::string, std::vector<std::string>> keys = [] {
    auto with = [](std::vector<std::string> base, const std::vector<std::string>& more) {
      base.insert(base.end(), more.begin(), more.end());
      return base;
    };
    std::map<std::string, std::vector<std::string>> m;
    m["check"] = {};
    m["solve"] = with({"lambda", "gamma", "mu", "sign", "method", "tol"}, kSourceKeys);
    m["lap"] = with({"lambda", "gammas", "factor", "method", "hform_C", "hform_tau"}, kSourceKeys);
    m["radiation"] = with(m["lap"], {"betas", "beta_c"});
    m["hoelder"] = {"lambda", "s", "gaps", "gamma0", "probes", "slack", "beta_c", "method"};
    m["rellich"] = {"lo", "hi", "mu", "tol"};
    m["sommerfeld"] = with({"lambda", "s", "tol", "gamma0", "absorb", "sign", "mu"}, kSourceKeys);
    m["riccati"] = {"lambda", "gamma", "fit_lo", "fit_hi"};
    m["energy"] = with({"lambda", "gammas", "delta", "nus", "n_max", "factor", "method", "hform_C",
                        "hform_tau"},
                       kSourceKeys);
    return m;
  }();
  return keys;
}

// Collects violations instead of throwing so that one pass reports them all.
class Reader {
 public:
  std::vector<std::string> errors;

  void error(int line, const Section& sec, const std::string& msg) {
    errors.push_back(where(line, sec) + " " + msg);
  }

  bool real(const Entry& e, const Section& sec, double& out) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(e.value, &pos);
      if (pos != e.value.size() || !std::isfinite(v)) throw std::invalid_argument("");
      out = v;
      return true;
    } catch (const std::exception&) {
      error(e.line, sec, e.key + " = '" + e.value + "' is not a finite number");
      return false;
    }
  }

  bool integer(const Entry& e, const Section& sec, int& out) {
    try {
      std::size_t pos = 0;
      const long v = std::stol(e.value, &pos);
      if (pos != e.value.size()) throw std::invalid_argument("");
      out = static_cast<int>(v);
      return true;
    } catch (const std::exception&) {
      error(e.line, sec, e.key + " = '" + e.value + "' is not an integer");
      return false;
    }
  }

  bool boolean(const Entry& e, const Section& sec, bool& out) {
    if (e.value == "true" || e.value == "1" || e.value == "yes") return out = true, true;
    if (e.value == "false" || e.value == "0" || e.value == "no") return out = false, true;
    error(e.line, sec, e.key + " = '" + e.value + "' is not a boolean");
    return false;
  }

  bool reals(const Entry& e, const Section& sec, std::vector<double>& out) {
    std::vector<double> v;
    std::stringstream ss(e.value);
    std::string item;
    bool ok = true;
    while (std::getline(ss, item, ',')) {
      Entry one{e.key, trim(item), e.line};
      double x = 0.0;
      if (real(one, sec, x)) v.push_back(x);
      else ok = false;
    }
    if (ok && v.empty()) {
      error(e.line, sec, e.key + " is an empty list");
      ok = false;
    }
    if (ok) out = std::move(v);
    return ok;
  }

  bool integers(const Entry& e, const Section& sec, std::vector<int>& out) {
    std::vector<double> v;
    if (!reals(e, sec, v)) return false;
    std::vector<int> n;
    for (double x : v) {
      if (x != std::floor(x)) {
        error(e.line, sec, e.key + " must list integers");
        return false;
      }
      n.push_back(static_cast<int>(x));
    }
    out = std::move(n);
    return true;
  }

  bool choice(const Entry& e, const Section& sec, const std::vector<std::string>& allowed,
              std::string& out) {
    if (std::find(allowed.begin(), allowed.end(), e.value) != allowed.end()) {
      out = e.value;
      return true;
    }
    std::string list;
    for (const auto& a : allowed) list += (list.empty() ? "" : "|") + a;
    error(e.line, sec, e.key + " = '" + e.value + "' does not name a known value (" + list + ")");
    return false;
  }
};

void read_model(Reader& rd, const Section& sec, ModelConfig& m) {
  std::map<std::string, double*> reals = {
      {"theta", &m.theta},     {"delta", &m.delta},       {"C", &m.C},
      {"kappa", &m.kappa},     {"amp", &m.amp},           {"order", &m.order},
      {"c", &m.c},             {"potential_c", &m.potential_c}, {"potential_p", &m.potential_p},
      {"well_depth", &m.well_depth}, {"well_a", &m.well_a}, {"well_b", &m.well_b},
      {"r0", &m.r0},           {"lambda0", &m.lambda0},   {"lambda1", &m.lambda1},
      {"left", &m.left},       {"K", &m.K},               {"log_coeff", &m.log_coeff}};
  for (const auto& e : sec.entries) {
    if (auto it = reals.find(e.key); it != reals.end()) {
      rd.real(e, sec, *it->second);
    } else if (e.key == "d") {
      rd.integer(e, sec, m.d);
    } else if (e.key == "two_sided") {
      rd.boolean(e, sec, m.two_sided);
    } else if (e.key == "table") {
      m.table = e.value;
    } else if (e.key == "profile") {
      rd.choice(e, sec,
                {"power", "stretched_exp", "exponential", "sinh_squared", "constant", "tabulated",
                 "two_end", "escape2d"},
                m.profile);
    } else if (e.key == "potential") {
      rd.choice(e, sec, {"zero", "constant", "power", "coulomb", "well"}, m.potential);
    } else if (e.key == "field") {
      rd.choice(e, sec, {"disk", "hyperbola", "saw_tooth"}, m.field);
    } else {
      rd.error(e.line, sec, "unknown key '" + e.key + "'");
    }
  }
  if (m.d < 1) rd.error(sec.line, sec, "d must be >= 1");
  if (m.r0 < 2.0) rd.error(sec.line, sec, "r0 must be >= 2");
  if (m.profile == "tabulated" && m.table.empty())
    rd.error(sec.line, sec, "profile = tabulated needs table = PATH");
  if (m.potential == "well" && !(m.well_a < m.well_b))
    rd.error(sec.line, sec, "well_a must be below well_b");
  if (m.profile == "two_end" && !(m.left > 1.0)) rd.error(sec.line, sec, "left must exceed 1");
}

void read_grid(Reader& rd, const Section& sec, GridConfig& g) {
  for (const auto& e : sec.entries) {
    if (e.key == "r_max") rd.real(e, sec, g.r_max);
    else if (e.key == "h") rd.real(e, sec, g.h);
    else if (e.key == "mode_cap") rd.real(e, sec, g.mode_cap);
    else rd.error(e.line, sec, "unknown key '" + e.key + "'");
  }
  if (!(g.h > 0.0)) rd.error(sec.line, sec, "h must be positive");
  if (!(g.r_max > 2.0)) rd.error(sec.line, sec, "r_max must exceed 2");
  if (g.mode_cap < 0.0) rd.error(sec.line, sec, "mode_cap must be >= 0");
}

void read_output(Reader& rd, const Section& sec, RunConfig& rc) {
  for (const auto& e : sec.entries) {
    if (e.key == "dir") rc.out_dir = e.value;
    else if (e.key == "svg") rd.boolean(e, sec, rc.svg);
    else rd.error(e.line, sec, "unknown key '" + e.key + "'");
  }
}

void read_experiment(Reader& rd, const Section& sec, ExperimentConfig& x) {
  x.name = sec.name;
  x.line = sec.line;
  const Entry* type = nullptr;
  for (const auto& e : sec.entries)
    if (e.key == "type") type = &e;
  if (!type) {
    rd.error(sec.line, sec, "missing key 'type'");
    return;
  }
  if (!rd.choice(*type, sec, experiment_types(), x.type)) return;
  const auto& allowed = type_keys().at(x.type);

  const std::map<std::string, double*> reals = {
      {"lambda", &x.lambda}, {"gamma", &x.gamma},       {"beta_c", &x.beta_c},
      {"s", &x.s},           {"gamma0", &x.gamma0},     {"slack", &x.slack},
      {"source_a", &x.source_a}, {"source_b", &x.source_b}, {"source_k", &x.source_k},
      {"factor", &x.factor}, {"tol", &x.tol},           {"mu", &x.mu},
      {"lo", &x.lo},         {"hi", &x.hi},             {"fit_lo", &x.fit_lo},
      {"fit_hi", &x.fit_hi}, {"hform_C", &x.hform_C},   {"hform_tau", &x.hform_tau},
      {"absorb", &x.absorb}, {"delta", &x.delta},       {"r_max", &x.r_max},
      {"h", &x.h}};
  for (const auto& e : sec.entries) {
    if (e.key == "type") continue;
    const bool common = e.key == "r_max" || e.key == "h";
    if (!common && std::find(allowed.begin(), allowed.end(), e.key) == allowed.end()) {
      rd.error(e.line, sec, "unknown key '" + e.key + "' for type " + x.type);
      continue;
    }
    x.given.insert(e.key);
    if (auto it = reals.find(e.key); it != reals.end()) {
      rd.real(e, sec, *it->second);
    } else if (e.key == "gammas") {
      rd.reals(e, sec, x.gammas);
    } else if (e.key == "betas") {
      rd.reals(e, sec, x.betas);
    } else if (e.key == "gaps") {
      rd.reals(e, sec, x.gaps);
    } else if (e.key == "nus") {
      rd.integers(e, sec, x.nus);
    } else if (e.key == "probes") {
      rd.integer(e, sec, x.probes);
    } else if (e.key == "n_max") {
      rd.integer(e, sec, x.n_max);
    } else if (e.key == "sign") {
      rd.integer(e, sec, x.sign);
    } else if (e.key == "method") {
      rd.choice(e, sec, {"outgoing", "shift"}, x.method);
    } else if (e.key == "source") {
      rd.choice(e, sec,
                x.type == "sommerfeld" ? std::vector<std::string>{"bump", "zero"}
                                       : std::vector<std::string>{"bump", "modulated", "zero"},
                x.source);
    }
  }

  auto bad = [&](const std::string& msg) { rd.error(sec.line, sec, msg); };
  const std::string gamma_rule = "outside the spectral parameter range: Γ ∈ (0,1) required";
  for (double g : x.gammas)
    if (!(g > 0.0 && g < 1.0)) bad("gammas contains " + std::to_string(g) + ", " + gamma_rule);
  if (x.given.count("gamma0") && !(x.gamma0 > 0.0 && x.gamma0 < 1.0))
    bad("gamma0 = " + std::to_string(x.gamma0) + ", " + gamma_rule);
  if (x.given.count("gamma")) {
    const bool zero_ok = x.type == "riccati" || (x.type == "solve" && x.method == "outgoing");
    if (!((x.gamma > 0.0 || (zero_ok && x.gamma == 0.0)) && x.gamma < 1.0))
      bad("gamma = " + std::to_string(x.gamma) + ", " + gamma_rule);
  }
  if (x.type == "solve" && x.method == "shift" && !(x.gamma > 0.0))
    bad("method = shift needs gamma in (0,1)");
  for (double b : x.betas)
    if (b < 0.0) bad("betas must be >= 0");
  if ((x.type == "hoelder" || x.type == "sommerfeld") && !(x.s > 0.5)) bad("s must exceed 1/2");
  for (double g : x.gaps)
    if (!(g > 0.0)) bad("gaps must be positive");
  if (x.type == "hoelder" && x.gaps.size() < 3) bad("gaps needs at least 3 entries");
  if (x.probes < 1) bad("probes must be >= 1");
  if (!(x.source_a < x.source_b)) bad("source_a must be below source_b");
  if (!(x.factor > 1.0)) bad("factor must exceed 1");
  if (!(x.tol > 0.0)) bad("tol must be positive");
  if (x.sign != 1 && x.sign != -1) bad("sign must be 1 or -1");
  if (!(x.lo < x.hi)) bad("lo must be below hi");
  if (!(x.delta > 0.0)) bad("delta must be positive");
  for (int nu : x.nus)
    if (nu < 0) bad("nus must be >= 0");
  if (x.n_max < 0) bad("n_max must be >= 0");
  if (x.given.count("h") && !(x.h > 0.0)) bad("h must be positive");
  if (x.given.count("r_max") && !(x.r_max > 2.0)) bad("r_max must exceed 2");
  if (x.given.count("absorb") && !(x.absorb > 0.0)) bad("absorb must be positive");
}

}  // namespace

const std::vector<std::string>& experiment_types() {
  static const std::vector<std::string> types = {"check",   "solve",      "lap",
                                                 "radiation", "hoelder",  "rellich",
                                                 "sommerfeld", "riccati", "energy"};
  return types;
}

RunConfig parse_config(const std::string& text) {
  RunConfig rc;
  rc.text = text;
  Reader rd;
  std::vector<Section> sections;
  std::istringstream is(text);
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    const std::string s = trim(raw.substr(0, raw.find('#')));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') {
        rd.errors.push_back("line " + std::to_string(line) + ": malformed section header '" + s + "'");
        continue;
      }
      std::istringstream hs(s.substr(1, s.size() - 2));
      Section sec;
      sec.line = line;
      hs >> sec.kind >> sec.name;
      std::string extra;
      hs >> extra;
      const bool named = sec.kind == "experiment";
      if (sec.kind != "model" && sec.kind != "grid" && sec.kind != "output" && !named) {
        rd.errors.push_back("line " + std::to_string(line) + ": unknown section '" + s + "'");
        sec.kind = "ignored";
      } else if (named && sec.name.empty()) {
        rd.errors.push_back("line " + std::to_string(line) + ": [experiment] needs a name");
      } else if ((!named && !sec.name.empty()) || !extra.empty()) {
        rd.errors.push_back("line " + std::to_string(line) + ": malformed section header '" + s + "'");
      }
      sections.push_back(std::move(sec));
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos) {
      rd.errors.push_back("line " + std::to_string(line) + ": expected key = value, got '" + s + "'");
      continue;
    }
    Entry e{trim(s.substr(0, eq)), trim(s.substr(eq + 1)), line};
    if (sections.empty()) {
      rd.errors.push_back("line " + std::to_string(line) + ": key '" + e.key +
                          "' appears before any section");
      continue;
    }
    auto& sec = sections.back();
    if (sec.kind == "ignored") continue;
    const auto dup = std::find_if(sec.entries.begin(), sec.entries.end(),
                                  [&](const Entry& o) { return o.key == e.key; });
    if (dup != sec.entries.end()) {
      rd.error(line, sec, "key '" + e.key + "' repeated (first at line " +
                              std::to_string(dup->line) + ")");
      continue;
    }
    sec.entries.push_back(std::move(e));
  }

  std::map<std::string, int> seen_kind;
  std::map<std::string, int> seen_name;
  for (const auto& sec : sections) {
    if (sec.kind == "ignored") continue;
    if (sec.kind != "experiment") {
      if (auto it = seen_kind.find(sec.kind); it != seen_kind.end()) {
        rd.errors.push_back("line " + std::to_string(sec.line) + ": section [" + sec.kind +
                            "] repeated (first at line " + std::to_string(it->second) + ")");
        continue;
      }
      seen_kind[sec.kind] = sec.line;
    }
    if (sec.kind == "model") {
      read_model(rd, sec, rc.model);
    } else if (sec.kind == "grid") {
      read_grid(rd, sec, rc.grid);
    } else if (sec.kind == "output") {
      read_output(rd, sec, rc);
    } else if (!sec.name.empty()) {
      if (auto it = seen_name.find(sec.name); it != seen_name.end()) {
        rd.errors.push_back("duplicate experiment name '" + sec.name + "' at lines " +
                            std::to_string(it->second) + " and " + std::to_string(sec.line));
        continue;
      }
      seen_name[sec.name] = sec.line;
      ExperimentConfig x;
      read_experiment(rd, sec, x);
      rc.experiments.push_back(std::move(x));
    }
  }
  if (!rd.errors.empty()) throw ConfigError(rd.errors);
  return rc;
}

bool is_escape_field(const ModelConfig& m) { return m.profile == "escape2d"; }

namespace {

WarpProfile read_table(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"[model] cannot read table '" + path + "'"});
  std::vector<double> r, f;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    line = trim(line);
    if (line.empty() || line[0] == '#' || line[0] == 'r') continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("");
      r.push_back(std::stod(line.substr(0, comma)));
      f.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw ConfigError({"[model] table '" + path + "' line " + std::to_string(n) +
                         ": expected r,f"});
    }
  }
  return WarpProfile::tabulated(d, std::move(r), std::move(f));
}

Potential build_potential(const ModelConfig& m) {
  if (m.potential == "constant") return Potential::constant(m.potential_c);
  if (m.potential == "power") return Potential::power(m.potential_c, m.potential_p);
  if (m.potential == "coulomb") return Potential::coulomb(m.potential_c);
  if (m.potential == "well") return Potential::well(m.well_depth, m.well_a, m.well_b);
  return Potential::zero();
}

}  // namespace

Model build_model(const ModelConfig& m) {
  if (is_escape_field(m))
    throw ConfigError({"[model] profile = escape2d only supports the check command"});
  if (m.profile == "two_end") {
    TwoEndLine line;
    line.lambda0 = m.lambda0;
    line.lambda1 = m.lambda1;
    line.left = m.left;
    line.two_sided = m.two_sided;
    line.r0 = std::max(m.r0, 4.0);
    return line;
  }
  WarpProfile profile = [&] {
    if (m.profile == "stretched_exp") return WarpProfile::stretched_exp(m.d, m.delta, m.theta);
    if (m.profile == "exponential")
      return WarpProfile::exponential(m.d, m.C, m.kappa, m.amp, m.order);
    if (m.profile == "sinh_squared") return WarpProfile::sinh_squared(m.d);
    if (m.profile == "constant") return WarpProfile::constant(m.d, m.c);
    if (m.profile == "tabulated") return read_table(m.table, m.d);
    return WarpProfile::power(m.d, m.theta);
  }();
  return WarpedModel::make(std::move(profile), build_potential(m), CutoffSpec{m.r0});
}

EscapeField2D build_field(const ModelConfig& m) {
  const double lc = m.log_coeff < 0.0 ? m.K : m.log_coeff;
  if (m.field == "hyperbola") return EscapeField2D::hyperbola(m.K, lc);
  if (m.field == "saw_tooth") return EscapeField2D::saw_tooth(m.K);
  return EscapeField2D::exterior_disk();
}

}  // namespace radlab
