#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "rtlagent/sim/sim_tools.hpp"
#include "rtlagent/support/strings.hpp"

using namespace rtlagent;
namespace fs = std::filesystem;

namespace {

const char* kMuxOk =
    "module top_module(input a, input b, input sel, output out);\n"
    "  assign out = sel ? b : a;\n"
    "endmodule\n";

const char* kMuxSwapped =
    "module top_module(input a, input b, input sel, output out);\n"
    "  assign out = sel ? a : b;\n"
    "endmodule\n";

const char* kMuxBroken =
    "module top_module(input a, input b, input sel, output out);\n"
    "  assign out = sel ? b : a\n"  // missing semicolon
    "endmodule\n";

// Self-checking bench: 8 vectors, one check every 10 ticks, first check at
// t=10. Prints the shared mismatch-statistics phrasing.
const char* kMuxTb =
    "`timescale 1ns/1ns\n"
    "module tb;\n"
    "  reg a, b, sel;\n"
    "  wire out_dut;\n"
    "  reg out_ref;\n"
    "  integer errors;\n"
    "  integer i;\n"
    "  top_module dut(.a(a), .b(b), .sel(sel), .out(out_dut));\n"
    "  initial begin\n"
    "    $dumpfile(\"wave.vcd\");\n"
    "    $dumpvars(0, tb);\n"
    "    errors = 0;\n"
    "    for (i = 0; i < 8; i = i + 1) begin\n"
    "      {a, b, sel} = i[2:0];\n"
    "      #5;\n"
    "      out_ref = sel ? b : a;\n"
    "      #5;\n"
    "      if (out_dut !== out_ref) begin\n"
    "        if (errors == 0) $display(\"First mismatch at time %0d\", $time);\n"
    "        errors = errors + 1;\n"
    "      end\n"
    "    end\n"
    "    $display(\"Mismatches: %0d in %0d samples\", errors, 8);\n"
    "    $finish;\n"
    "  end\n"
    "endmodule\n";

// Same bench but silent about the mismatch time: exercises the waveform
// fallback through the out_ref/out_dut pair.
std::string quiet_tb()
{
  std::string tb = kMuxTb;
  auto pos = tb.find("        if (errors == 0)");
  REQUIRE(pos != std::string::npos);
  auto end = tb.find('\n', pos);
  tb.erase(pos, end - pos + 1);
  return tb;
}

std::string fresh_dir(const std::string& tag)
{
  auto dir = fs::temp_directory_path() / ("rtlagent_sim_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  return dir.string();
}

}  // namespace

TEST_CASE("check_syntax: valid mux compiles clean")
{
  auto report = sim::check_syntax(kMuxOk, fresh_dir("ok"));
  CHECK(report.ok);
  CHECK(report.diagnostics.empty());
}

TEST_CASE("check_syntax: missing semicolon yields a line-numbered error")
{
  auto report = sim::check_syntax(kMuxBroken, fresh_dir("broken"));
  CHECK_FALSE(report.ok);
  REQUIRE_FALSE(report.diagnostics.empty());
  CHECK(report.diagnostics[0].severity == "error");
  // the parse trips on or right after the truncated statement
  CHECK(report.diagnostics[0].line >= 2);
  CHECK(report.diagnostics[0].line <= 3);
}

TEST_CASE("missing binary raises ToolUnavailable")
{
  sim::SimulatorConfig cfg;
  cfg.compiler = "no-such-simulator-binary";
  CHECK_THROWS_AS(sim::check_syntax(kMuxOk, fresh_dir("nobin"), cfg), sim::ToolUnavailable);
  cfg.compiler = "iverilog";
  cfg.runner = "no-such-runner-binary";
  CHECK_THROWS_AS(sim::simulate(kMuxOk, kMuxTb, fresh_dir("norun"), {}, cfg),
                  sim::ToolUnavailable);
}

TEST_CASE("simulate: correct mux passes with zero mismatches")
{
  const auto dir = fresh_dir("pass");
  auto report = sim::simulate(kMuxOk, kMuxTb, dir);
  CHECK(report.compiled);
  REQUIRE(report.mismatch_count.has_value());
  CHECK(*report.mismatch_count == 0);
  CHECK(report.total_samples == 8);
  CHECK_FALSE(report.first_mismatch_time.has_value());
  CHECK(report.passed());
  REQUIRE(report.vcd_path.has_value());
  CHECK(fs::exists(*report.vcd_path));
  CHECK(fs::exists(fs::path(dir) / "dut.v"));
  CHECK(fs::exists(fs::path(dir) / "tb.v"));
  CHECK(fs::exists(fs::path(dir) / "sim.out"));
  CHECK(fs::exists(fs::path(dir) / "stdout.log"));
}

TEST_CASE("simulate: swapped mux fails at the hand-computed tick")
{
  auto report = sim::simulate(kMuxSwapped, kMuxTb, fresh_dir("fail"));
  CHECK(report.compiled);
  REQUIRE(report.mismatch_count.has_value());
  CHECK(*report.mismatch_count == 4);  // i = 2,3,4,5 differ (a != b there)
  CHECK_FALSE(report.passed());
  // first differing vector is i=2, checked at t = 10*(i+1) = 30
  REQUIRE(report.first_mismatch_time.has_value());
  CHECK(*report.first_mismatch_time == 30);
}

TEST_CASE("simulate: waveform fallback recovers the mismatch time")
{
  auto report = sim::simulate(kMuxSwapped, quiet_tb(), fresh_dir("fallback"));
  CHECK(report.compiled);
  REQUIRE(report.mismatch_count.has_value());
  CHECK(*report.mismatch_count == 4);
  REQUIRE(report.first_mismatch_time.has_value());
  // i=2 drives {a,b,sel}=010 at t=20: the swapped output flips to b=1
  // while the reference register still holds 0 — the first recorded
  // divergence with a fully-defined reference value
  CHECK(*report.first_mismatch_time == 20);
}

TEST_CASE("simulate: syntax error dominates, statistics unknown")
{
  auto report = sim::simulate(kMuxBroken, kMuxTb, fresh_dir("synerr"));
  CHECK_FALSE(report.compiled);
  CHECK_FALSE(report.mismatch_count.has_value());
  CHECK_FALSE(report.vcd_path.has_value());
  CHECK_FALSE(report.passed());
  CHECK_FALSE(report.diagnostics.empty());
}

TEST_CASE("simulate: runaway testbench times out as an observation")
{
  const char* tb_forever =
      "`timescale 1ns/1ns\n"
      "module tb;\n"
      "  reg clk;\n"
      "  initial clk = 0;\n"
      "  always #1 clk = ~clk;\n"  // no $finish
      "endmodule\n";
  sim::SimulatorConfig cfg;
  cfg.timeout_seconds = 1;
  auto report = sim::simulate(kMuxOk, tb_forever, fresh_dir("hang"), {}, cfg);
  CHECK(report.compiled);
  CHECK(report.timed_out);
  CHECK_FALSE(report.mismatch_count.has_value());
  CHECK_FALSE(report.passed());
}

TEST_CASE("simulate: concurrent workdirs stay isolated")
{
  const auto dir1 = fresh_dir("iso1");
  const auto dir2 = fresh_dir("iso2");
  auto r1 = sim::simulate(kMuxOk, kMuxTb, dir1);
  auto r2 = sim::simulate(kMuxSwapped, kMuxTb, dir2);
  CHECK(r1.passed());
  CHECK_FALSE(r2.passed());
  REQUIRE(r1.vcd_path.has_value());
  REQUIRE(r2.vcd_path.has_value());
  CHECK(fs::path(*r1.vcd_path).parent_path() == fs::path(dir1));
  CHECK(fs::path(*r2.vcd_path).parent_path() == fs::path(dir2));
  std::ifstream d1(fs::path(dir1) / "dut.v");
  std::ostringstream s1;
  s1 << d1.rdbuf();
  CHECK(s1.str() == kMuxOk);
}

TEST_CASE("ref/dut divergence scan on a hand-built dump")
{
  wave::WaveDb db;
  db.signals.push_back({"tb.out_ref", 1, "!"});
  db.signals.push_back({"tb.out_dut", 1, "\""});
  db.signals.push_back({"tb.clk", 1, "#"});
  db.changes["tb.out_ref"] = {{0, "x"}, {10, "0"}, {30, "1"}};
  db.changes["tb.out_dut"] = {{0, "0"}, {30, "0"}};  // wrong from 30 on
  db.changes["tb.clk"] = {{0, "0"}};
  db.end_time = 40;
  auto div = sim::ref_dut_divergence(db);
  REQUIRE(div.first_time.has_value());
  CHECK(*div.first_time == 30);
  REQUIRE(div.signals.size() == 1);
  CHECK(div.signals[0] == "out");
}

TEST_CASE("custom mismatch rules with alternate phrasing")
{
  std::string tb = kMuxTb;
  auto pos = tb.find("Mismatches: %0d in %0d samples");
  REQUIRE(pos != std::string::npos);
  tb.replace(pos, std::string("Mismatches: %0d in %0d samples").size(),
             "RESULT errors=%0d total=%0d");
  sim::MismatchRules rules;
  rules.count_pattern = R"(RESULT errors=(\d+) total=(\d+))";
  auto report = sim::simulate(kMuxOk, tb, fresh_dir("rules"), rules);
  REQUIRE(report.mismatch_count.has_value());
  CHECK(*report.mismatch_count == 0);
  CHECK(report.total_samples == 8);
}
