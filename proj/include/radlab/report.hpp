#pragma once

#include <string>
#include <utility>
#include <vector>

#include "radlab/conditions.hpp"
#include "radlab/experiments.hpp"
#include "radlab/phase.hpp"
#include "radlab/solver.hpp"

namespace radlab {

inline constexpr const char* kToolVersion = "radlab 0.1.0";

// 64-bit FNV-1a of the text, as 16 hex digits.
std::string config_hash(const std::string& text);

// "# key: value" lines written at the top of every CSV.
using HeaderBlock = std::vector<std::pair<std::string, std::string>>;

std::string format_number(double v);

std::string sweep_csv(const SweepTable& table, const HeaderBlock& header);
// Reads back what sweep_csv wrote; verdicts are taken from the file as-is.
SweepTable parse_sweep_csv(const std::string& text);

std::string condition_csv(const ConditionReport& report, const HeaderBlock& header);
std::string eigen_csv(const EigenScanResult& result, const HeaderBlock& header);
std::string comparison_csv(const ComparisonReport& report, const HeaderBlock& header);
std::string solution_csv(const RadialGrid& grid, const GridFunction& phi,
                         const HeaderBlock& header);
std::string besov_csv(const BesovProfile& profile, const HeaderBlock& header);
// r, Re a, Im a, residual
std::string phase_csv(const PhaseSpec& phase, const RiccatiResidual& residual,
                      const HeaderBlock& header);

struct PlotSeries {
  std::string name;
  std::vector<double> x, y;
};

// Static log-log line plot; non-positive points are skipped.
std::string loglog_svg(const std::string& title, const std::string& xlabel,
                       const std::string& ylabel, const std::vector<PlotSeries>& series);

// Writes to path + ".tmp" and renames over path.
void write_atomic(const std::string& path, const std::string& content);

}  // namespace radlab
