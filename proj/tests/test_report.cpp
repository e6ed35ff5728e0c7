#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "radlab/report.hpp"

using namespace radlab;

TEST_CASE("config hash is FNV-1a 64") {
  CHECK(config_hash("") == "cbf29ce484222325");
  CHECK(config_hash("a") == "af63dc4c8601ec8c");
  CHECK(config_hash("[grid]\nh = 0.1\n") != config_hash("[grid]\nh = 0.2\n"));
}

TEST_CASE("numbers round-trip exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-300, -2.5e17}) CHECK(std::stod(format_number(v)) == v);
  CHECK(format_number(std::numeric_limits<double>::infinity()) == "inf");
}

TEST_CASE("sweep CSV round trip keeps rows, settings and verdicts") {
  SweepTable t;
  t.experiment = "radiation";
  t.param_names = {"lambda", "gamma", "beta"};
  t.value_names = {"radiation_bstar", "h_form", "lhs", "wrong_sign_bstar"};
  t.checked = {"radiation_bstar", "lhs"};
  t.settings["beta_c"] = 1.0;
  t.rows = {{{2.0, 0.1, 0.0}, {0.5, 0.25, 0.75, 9.0}, 1.25, true, "", Verdict::pass},
            {{2.0, 0.01, 0.0}, {0.6, 0.3, 0.9, 9.5}, 1.25, true, "", Verdict::pass},
            {{2.0, 1e-5, 0.0}, {0.0, 0.1, 0.1, 2.0}, 1.25, false, "unreliable", Verdict::inconclusive}};
  apply_verdicts(t);
  const std::string csv = sweep_csv(t, {{"tool", kToolVersion}, {"config_hash", "x"}});
  CHECK(csv.rfind("# tool: radlab", 0) == 0);
  SweepTable back = parse_sweep_csv(csv);
  CHECK(back.param_names == t.param_names);
  CHECK(back.checked == t.checked);
  CHECK(back.settings == t.settings);
  REQUIRE(back.rows.size() == 3);
  CHECK(back.rows[1].values == t.rows[1].values);
  CHECK(back.rows[2].flag == "unreliable");
  CHECK_FALSE(back.rows[2].reliable);
  const Verdict stored = back.verdict;
  apply_verdicts(back);
  CHECK(back.verdict == stored);
  CHECK(back.summary == t.summary);
  for (std::size_t i = 0; i < 3; ++i) CHECK(back.rows[i].verdict == t.rows[i].verdict);
}

TEST_CASE("SVG plot is static and skips non-positive points") {
  const std::string svg = loglog_svg("t", "x", "y", {{"s", {1.0, 10.0, 100.0}, {1.0, 0.0, 0.01}}});
  CHECK(svg.rfind("<svg", 0) == 0);
  CHECK(svg.find("<script") == std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("atomic write leaves no temporary behind") {
  const auto dir = std::filesystem::temp_directory_path() / "radlab_report_test";
  std::filesystem::remove_all(dir);
  const std::string path = (dir / "sub" / "a.csv").string();
  write_atomic(path, "one\n");
  write_atomic(path, "two\n");
  std::ifstream in(path);
  std::stringstream s;
  s << in.rdbuf();
  CHECK(s.str() == "two\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
