#include "radlab/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "radlab/error.hpp"

namespace radlab {

namespace {

void write_header(std::ostringstream& os, const HeaderBlock& header) {
  for (const auto& [k, v] : header) os << "# " << k << ": " << v << "\n";
}

std::string join(const std::vector<std::string>& v, char sep) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i) out += sep;
    out += v[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

const char* rule_name(VerdictRule r) {
  switch (r) {
    case VerdictRule::bounded_in_gamma:
      return "bounded_in_gamma";
    case VerdictRule::hoelder_fit:
      return "hoelder_fit";
    case VerdictRule::energy_uniform:
      return "energy_uniform";
  }
  return "?";
}

VerdictRule parse_rule(const std::string& s) {
  if (s == "bounded_in_gamma") return VerdictRule::bounded_in_gamma;
  if (s == "hoelder_fit") return VerdictRule::hoelder_fit;
  if (s == "energy_uniform") return VerdictRule::energy_uniform;
  throw Error("unknown verdict rule '" + s + "'");
}

Verdict parse_verdict(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  if (s == "inconclusive") return Verdict::inconclusive;
  throw Error("unknown verdict '" + s + "'");
}

double parse_double(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw Error("malformed number '" + s + "'");
  return v;
}

}  // namespace

std::string config_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string format_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string sweep_csv(const SweepTable& t, const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# experiment: " << t.experiment << "\n";
  os << "# rule: " << rule_name(t.rule) << "\n";
  os << "# factor: " << format_number(t.factor) << "\n";
  os << "# params: " << join(t.param_names, ';') << "\n";
  os << "# values: " << join(t.value_names, ';') << "\n";
  os << "# checked: " << join(t.checked, ';') << "\n";
  for (const auto& [k, v] : t.settings) os << "# setting." << k << ": " << format_number(v) << "\n";
  for (const auto& [k, v] : t.summary) os << "# summary." << k << ": " << format_number(v) << "\n";
  os << "# verdict: " << to_string(t.verdict) << "\n";
  if (!t.note.empty()) os << "# note: " << t.note << "\n";
  std::vector<std::string> cols = t.param_names;
  cols.insert(cols.end(), t.value_names.begin(), t.value_names.end());
  for (const char* c : {"reference", "reliable", "flag", "verdict"}) cols.emplace_back(c);
  os << join(cols, ',') << "\n";
  for (const auto& r : t.rows) {
    std::vector<std::string> f;
    for (double p : r.params) f.push_back(format_number(p));
    for (double v : r.values) f.push_back(format_number(v));
    f.push_back(format_number(r.reference));
    f.emplace_back(r.reliable ? "1" : "0");
    f.push_back(r.flag);
    f.emplace_back(to_string(r.verdict));
    os << join(f, ',') << "\n";
  }
  return os.str();
}

SweepTable parse_sweep_csv(const std::string& text) {
  SweepTable t;
  std::istringstream is(text);
  std::string line;
  bool have_columns = false;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto colon = line.find(": ");
      if (colon == std::string::npos) continue;
      const std::string key = line.substr(2, colon - 2), value = line.substr(colon + 2);
      auto list = [&] { return value.empty() ? std::vector<std::string>{} : split(value, ';'); };
      if (key == "experiment") t.experiment = value;
      else if (key == "rule") t.rule = parse_rule(value);
      else if (key == "factor") t.factor = parse_double(value);
      else if (key == "params") t.param_names = list();
      else if (key == "values") t.value_names = list();
      else if (key == "checked") t.checked = list();
      else if (key == "verdict") t.verdict = parse_verdict(value);
      else if (key == "note") t.note = value;
      else if (key.rfind("setting.", 0) == 0) t.settings[key.substr(8)] = parse_double(value);
      else if (key.rfind("summary.", 0) == 0) t.summary[key.substr(8)] = parse_double(value);
      continue;
    }
    if (!have_columns) {
      have_columns = true;
      continue;
    }
    const auto f = split(line, ',');
    const std::size_t np = t.param_names.size(), nv = t.value_names.size();
    if (f.size() != np + nv + 4) throw Error("sweep CSV row has the wrong column count");
    SweepRow r;
    for (std::size_t i = 0; i < np; ++i) r.params.push_back(parse_double(f[i]));
    for (std::size_t i = 0; i < nv; ++i) r.values.push_back(parse_double(f[np + i]));
    r.reference = parse_double(f[np + nv]);
    r.reliable = f[np + nv + 1] == "1";
    r.flag = f[np + nv + 2];
    r.verdict = parse_verdict(f[np + nv + 3]);
    t.rows.push_back(std::move(r));
  }
  return t;
}

std::string condition_csv(const ConditionReport& rep, const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# overall: " << to_string(rep.overall()) << "\n";
  os << "# sigma: " << format_number(rep.sigma) << "\n";
  os << "# tau: " << format_number(rep.tau) << "\n";
  os << "# rho_prime: " << format_number(rep.rho_prime) << "\n";
  os << "# rho: " << format_number(rep.rho) << "\n";
  os << "# C: " << format_number(rep.C) << "\n";
  os << "# lambda0: " << format_number(rep.lambda0) << "\n";
  os << "# lambda0_conclusive: " << (rep.lambda0_conclusive ? 1 : 0) << "\n";
  os << "# beta_c: " << format_number(rep.beta_c) << "\n";
  os << "check,verdict,constant,exponent,witness_r,witness_x,witness_y,witness_margin,note\n";
  for (const auto& c : rep.rows) {
    os << c.name << "," << to_string(c.verdict) << "," << format_number(c.constant) << ","
       << format_number(c.exponent) << "," << format_number(c.witness.r) << ","
       << format_number(c.witness.x) << "," << format_number(c.witness.y) << ","
       << format_number(c.witness.margin) << "," << c.note << "\n";
  }
  return os.str();
}

std::string eigen_csv(const EigenScanResult& res, const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# interval: " << format_number(res.lo) << " " << format_number(res.hi) << "\n";
  os << "# lambda0: " << format_number(res.lambda0) << "\n";
  os << "eigenvalue,index,refined,drift,profile_slope,tail_ratio,decays,artifact,near_threshold\n";
  for (const auto& e : res.entries) {
    os << format_number(e.value) << "," << e.index << "," << format_number(e.refined) << ","
       << format_number(e.drift) << "," << format_number(e.decay.slope) << ","
       << format_number(e.decay.tail_ratio) << "," << (e.decay.decays ? 1 : 0) << ","
       << (e.artifact ? 1 : 0) << "," << (e.near_threshold ? 1 : 0) << "\n";
  }
  return os.str();
}

std::string comparison_csv(const ComparisonReport& rep, const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# s: " << format_number(rep.s) << "\n";
  os << "# discrepancy_hs: " << format_number(rep.discrepancy_hs) << "\n";
  os << "# discrepancy_bstar: " << format_number(rep.discrepancy_bstar) << "\n";
  os << "# relative_hs: " << format_number(rep.relative_hs) << "\n";
  os << "# relative_bstar: " << format_number(rep.relative_bstar) << "\n";
  std::vector<std::string> g;
  for (double x : rep.gammas) g.push_back(format_number(x));
  os << "# gammas: " << join(g, ';') << "\n";
  os << "# monotone: " << (rep.monotone ? 1 : 0) << "\n";
  os << "# radiation_slope: " << format_number(rep.radiation_decay.slope) << "\n";
  os << "# radiation_tail_ratio: " << format_number(rep.radiation_decay.tail_ratio) << "\n";
  os << "# verdict: " << to_string(rep.verdict) << "\n";
  os << "x,re_first,im_first,re_second,im_second\n";
  for (std::size_t j = 0; j < rep.x.size(); ++j) {
    os << format_number(rep.x[j]) << "," << format_number(rep.first[j].real()) << ","
       << format_number(rep.first[j].imag()) << "," << format_number(rep.second[j].real())
       << "," << format_number(rep.second[j].imag()) << "\n";
  }
  return os.str();
}

std::string solution_csv(const RadialGrid& grid, const GridFunction& phi,
                         const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "x,r,re,im\n";
  for (std::size_t j = 0; j < grid.size(); ++j) {
    os << format_number(grid.x(j)) << "," << format_number(grid.radius(j)) << ","
       << format_number(phi[j].real()) << "," << format_number(phi[j].imag()) << "\n";
  }
  return os.str();
}

std::string besov_csv(const BesovProfile& p, const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# b_norm: " << format_number(p.b_norm()) << "\n";
  os << "# b_star_norm: " << format_number(p.b_star_norm()) << "\n";
  os << "# outer_partial: " << (p.outer_partial ? 1 : 0) << "\n";
  os << "nu,R_nu,annulus_norm\n";
  for (std::size_t nu = 0; nu < p.annulus_norms.size(); ++nu) {
    os << nu << "," << format_number(std::ldexp(1.0, static_cast<int>(nu))) << ","
       << format_number(p.annulus_norms[nu]) << "\n";
  }
  return os.str();
}

std::string phase_csv(const PhaseSpec& phase, const RiccatiResidual& res,
                      const HeaderBlock& header) {
  std::ostringstream os;
  write_header(os, header);
  os << "# r_lambda: " << format_number(phase.r_lambda) << "\n";
  os << "# exponent: " << format_number(res.exponent) << "\n";
  os << "# reliable: " << (res.reliable ? 1 : 0) << "\n";
  os << "r,re_a,im_a,residual\n";
  // residual is reported at interior nodes only
  for (std::size_t j = 1; j + 1 < phase.x.size(); ++j) {
    os << format_number(res.r[j - 1]) << "," << format_number(phase.a[j].real()) << ","
       << format_number(phase.a[j].imag()) << "," << format_number(res.residual[j - 1]) << "\n";
  }
  return os.str();
}

std::string loglog_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series) {
  constexpr double W = 640, H = 420, L = 70, R = 20, T = 40, B = 50;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : series) {
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      x0 = std::min(x0, std::log10(s.x[i]));
      x1 = std::max(x1, std::log10(s.x[i]));
      y0 = std::min(y0, std::log10(s.y[i]));
      y1 = std::max(y1, std::log10(s.y[i]));
    }
  }
  if (!(x1 >= x0)) x0 = 0, x1 = 1;
  if (!(y1 >= y0)) y0 = 0, y1 = 1;
  if (x1 - x0 < 1e-9) x0 -= 0.5, x1 += 0.5;
  if (y1 - y0 < 1e-9) y0 -= 0.5, y1 += 0.5;
  auto px = [&](double lx) { return L + (lx - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double ly) { return H - B - (ly - y0) / (y1 - y0) * (H - T - B); };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", v);
    return std::string(buf);
  };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" << title
     << "</text>\n";
  os << "<rect x=\"" << L << "\" y=\"" << T << "\" width=\"" << W - L - R << "\" height=\""
     << H - T - B << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int e = static_cast<int>(std::ceil(x0)); e <= static_cast<int>(std::floor(x1)); ++e) {
    os << "<text x=\"" << num(px(e)) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">1e"
       << e << "</text>\n";
  }
  for (int e = static_cast<int>(std::ceil(y0)); e <= static_cast<int>(std::floor(y1)); ++e) {
    os << "<text x=\"" << L - 6 << "\" y=\"" << num(py(e) + 4) << "\" text-anchor=\"end\">1e" << e
       << "</text>\n";
  }
  os << "<text x=\"" << W / 2 << "\" y=\"" << H - 12 << "\" text-anchor=\"middle\">" << xlabel
     << "</text>\n";
  os << "<text x=\"16\" y=\"" << H / 2 << "\" transform=\"rotate(-90 16 " << H / 2
     << ")\" text-anchor=\"middle\">" << ylabel << "</text>\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const auto& s = series[k];
    const char* c = colors[k % 6];
    os << "<polyline fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
      if (!(s.x[i] > 0 && s.y[i] > 0) || !std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      os << num(px(std::log10(s.x[i]))) << "," << num(py(std::log10(s.y[i]))) << " ";
    }
    os << "\"/>\n";
    os << "<text x=\"" << W - R - 8 << "\" y=\"" << T + 16 + 14 * static_cast<double>(k)
       << "\" text-anchor=\"end\" fill=\"" << c << "\">" << s.name << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void write_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + tmp + " for writing");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for " + tmp);
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot rename " + tmp + " to " + path + ": " + ec.message());
  }
}

}  // namespace radlab
