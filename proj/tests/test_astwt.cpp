#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "rtlagent/astwt/trace.hpp"
#include "rtlagent/vlog/parser.hpp"
#include "vlog_random.hpp"

using namespace rtlagent;

namespace {

std::string read_data_file(const std::string& name)
{
  std::ifstream in(std::string(TEST_DATA_DIR) + "/" + name, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

vlog::AstModule parse_ok(const std::string& src)
{
  auto r = vlog::parse_module(src);
  REQUIRE(r.ok());
  return *r.module;
}

const char* kAndSource =
    "module m(input x, input y, output z);\n"
    "  assign z = x & y;\n"
    "endmodule\n";

const char* kAndVcd =
    "$timescale 1ns $end\n"
    "$scope module tb $end\n"
    "$var wire 1 ! clk $end\n"
    "$var wire 1 \" x $end\n"
    "$var wire 1 # y $end\n"
    "$var wire 1 $ z $end\n"
    "$upscope $end\n"
    "$enddefinitions $end\n"
    "#0\n$dumpvars\n0!\n0\"\n0#\n0$\n$end\n"
    "#5\n1!\n#10\n0!\n1\"\n#15\n1!\n1$\n#20\n0!\n1#\n#25\n1!\n#30\n0!\n";

const char* kFsmSource =
    "module fsm(input clk, input rst, input w, output z);\n"
    "  localparam A = 1'b0, B = 1'b1;\n"
    "  reg state, next_state;\n"
    "  always @(posedge clk) if (rst) state <= A; else state <= next_state;\n"
    "  always @* case (state)\n"
    "    A: next_state = w ? B : A;\n"
    "    B: next_state = w ? B : A;\n"
    "    default: next_state = A;\n"
    "  endcase\n"
    "  assign z = (state == B) & w;\n"
    "endmodule\n";

// dump with dut internals in a sub-scope; parameters are never dumped
const char* kFsmVcd =
    "$timescale 1ns $end\n"
    "$scope module tb $end\n"
    "$var wire 1 ! clk $end\n"
    "$var wire 1 \" w $end\n"
    "$var wire 1 # z $end\n"
    "$scope module dut $end\n"
    "$var wire 1 $ state $end\n"
    "$var wire 1 % next_state $end\n"
    "$var wire 1 & rst $end\n"
    "$upscope $end\n"
    "$upscope $end\n"
    "$enddefinitions $end\n"
    "#0\n$dumpvars\n0!\n0\"\n0#\n0$\n0%\n1&\n$end\n"
    "#5\n1!\n#10\n0!\n0&\n1\"\n1%\n#15\n1!\n1$\n1#\n#20\n0!\n#25\n1!\n#30\n0!\n#35\n1!\n#40\n0!\n";

}  // namespace

TEST_CASE("one-hop fan-in: code ref plus z,x,y columns")
{
  auto m = parse_ok(kAndSource);
  auto db = wave::parse_vcd(kAndVcd);
  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 1;
  req.mismatch_time = 15;
  auto report = astwt::trace(m, db, req, "clk");
  REQUIRE(report.code_refs.size() == 1);
  CHECK(report.code_refs[0].signal == "z");
  CHECK(report.code_refs[0].text == "assign z = x & y;");
  CHECK(report.code_refs[0].line == 2);
  CHECK(report.code_refs[0].hop == 0);
  CHECK(report.table.columns == std::vector<std::string>{"z", "x", "y"});
  CHECK(report.truncation_note.empty());
  CHECK(report.not_dumped.empty());
}

TEST_CASE("level 0 keeps only the mismatched signals")
{
  auto m = parse_ok(kAndSource);
  auto db = wave::parse_vcd(kAndVcd);
  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 0;
  req.mismatch_time = 15;
  auto report = astwt::trace(m, db, req, "clk");
  CHECK(report.table.columns == std::vector<std::string>{"z"});
  REQUIRE(report.code_refs.size() == 1);  // hop-0 target's own driving statement
  CHECK(report.code_refs[0].signal == "z");
}

TEST_CASE("fsm fixture at level 2, expectation from the fixpoint oracle")
{
  auto m = parse_ok(kFsmSource);
  auto db = wave::parse_vcd(kFsmVcd);
  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 2;
  req.mismatch_time = 15;
  req.cycles_before = 1;
  req.cycles_after = 1;
  auto report = astwt::trace(m, db, req, "clk", "tb.dut");

  // expected signal set from the independent closure oracle
  auto expected = vlog_random::truncate_levels(vlog_random::closure_levels(m, {"z"}), 2);
  std::set<std::string> got(report.table.columns.begin(), report.table.columns.end());
  got.insert(report.not_dumped.begin(), report.not_dumped.end());
  std::set<std::string> want;
  for (const auto& [name, _] : expected)
    want.insert(name);
  CHECK(got == want);

  for (const char* name : {"z", "state", "next_state", "w"}) {
    CAPTURE(name);
    CHECK(std::find(report.table.columns.begin(), report.table.columns.end(), name) !=
          report.table.columns.end());
  }
  // the localparam B reaches the graph but is never dumped
  CHECK(std::find(report.not_dumped.begin(), report.not_dumped.end(), "B") !=
        report.not_dumped.end());

  // code refs include the case arms computing next_state
  int next_state_refs = 0;
  for (const auto& ref : report.code_refs)
    if (ref.signal == "next_state")
      ++next_state_refs;
  CHECK(next_state_refs == 3);

  // rendering marks the not-dumped signals
  auto text = astwt::render_report(report);
  CHECK(text.find("not dumped:") != std::string::npos);
  CHECK(text.find("== CODE ==") == 0);
  CHECK(text.find("== WAVEFORM ==") != std::string::npos);
}

TEST_CASE("code refs are ordered by hop then line")
{
  auto m = parse_ok(kFsmSource);
  auto db = wave::parse_vcd(kFsmVcd);
  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 3;
  req.mismatch_time = 15;
  auto report = astwt::trace(m, db, req, "clk", "tb.dut");
  for (std::size_t i = 1; i < report.code_refs.size(); ++i) {
    const auto& a = report.code_refs[i - 1];
    const auto& b = report.code_refs[i];
    CHECK(std::tie(a.hop, a.line) <= std::tie(b.hop, b.line));
  }
}

TEST_CASE("column monotonicity in level and report determinism")
{
  std::mt19937 rng(31);
  for (int i = 0; i < 15; ++i) {
    auto net = vlog_random::make_netlist(rng);
    auto m = parse_ok(net.source);

    // synthetic dump containing every module signal plus a clock
    wave::WaveDb db;
    db.timescale_mag = 1;
    db.timescale_unit = "ns";
    bool has_clk = false;
    for (std::size_t s = 0; s < net.signals.size(); ++s) {
      const auto& name = net.signals[s];
      has_clk = has_clk || name == "clk";
      db.signals.push_back({"tb.dut." + name, 1, std::string(1, char('!' + s))});
      db.changes["tb.dut." + name] = {{0, "0"}, {7 + s, "1"}};
    }
    if (!has_clk) {
      db.signals.push_back({"tb.clk", 1, "Z"});
    }
    const std::string clk_name = has_clk ? "tb.dut.clk" : "tb.clk";
    db.changes[clk_name] = {{0, "0"}, {5, "1"}, {10, "0"}, {15, "1"}, {20, "0"}, {25, "1"}};
    db.begin_time = 0;
    db.end_time = 30;

    astwt::TraceRequest req;
    req.mismatched_signals = {net.signals[net.signals.size() / 2]};
    req.mismatch_time = 15;
    std::vector<std::string> prev;
    for (int level = 0; level <= 4; ++level) {
      req.level = level;
      auto report = astwt::trace(m, db, req, "clk", "tb.dut");
      const auto& cols = report.table.columns;
      // previous columns are a prefix-order subset of the next
      for (const auto& c : prev)
        CHECK(std::find(cols.begin(), cols.end(), c) != cols.end());
      prev = cols;

      auto again = astwt::trace(m, db, req, "clk", "tb.dut");
      CHECK(astwt::render_report(report) == astwt::render_report(again));

      // coverage: every non-root column is some selected signal's driver
      std::set<std::string> ref_signals;
      for (const auto& ref : report.code_refs)
        ref_signals.insert(ref.signal);
      for (const auto& c : cols) {
        if (req.mismatched_signals.count(c))
          continue;
        bool covered = false;
        for (const auto& s : ref_signals) {
          auto ds = vlog::direct_drivers(m, s);
          if (ds.drivers.count(c)) {
            covered = true;
            break;
          }
        }
        CHECK_MESSAGE(covered, "column ", c, " not covered at level ", level);
      }
    }
  }
}

TEST_CASE("signal budget truncates with a note, lowest hops kept")
{
  // one output fed by 14 inputs: 15 traced signals at level 1
  std::string src = "module wide(";
  for (int i = 0; i < 14; ++i)
    src += "input i" + std::to_string(i) + ", ";
  src += "output z);\n  assign z = i0";
  for (int i = 1; i < 14; ++i)
    src += " ^ i" + std::to_string(i);
  src += ";\nendmodule\n";
  auto m = parse_ok(src);

  wave::WaveDb db;
  db.signals.push_back({"tb.clk", 1, "!"});
  db.changes["tb.clk"] = {{0, "0"}, {5, "1"}, {10, "0"}, {15, "1"}};
  db.signals.push_back({"tb.dut.z", 1, "\""});
  db.changes["tb.dut.z"] = {{0, "0"}};
  for (int i = 0; i < 14; ++i) {
    auto name = "tb.dut.i" + std::to_string(i);
    db.signals.push_back({name, 1, std::string(1, char('#' + i))});
    db.changes[name] = {{0, "1"}};
  }
  db.end_time = 20;

  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 1;
  req.mismatch_time = 5;
  auto report = astwt::trace(m, db, req, "clk", "tb.dut");
  CHECK(report.table.columns.size() + report.not_dumped.size() == astwt::kSignalBudget);
  CHECK(report.table.columns[0] == "z");  // root survives truncation
  CHECK_FALSE(report.truncation_note.empty());
  CHECK(report.truncation_note.find("12") != std::string::npos);
  CHECK(report.truncation_note.find("15") != std::string::npos);
}

TEST_CASE("rendered report matches the golden file")
{
  auto m = parse_ok(kAndSource);
  auto db = wave::parse_vcd(kAndVcd);
  astwt::TraceRequest req;
  req.mismatched_signals = {"z"};
  req.level = 1;
  req.mismatch_time = 15;
  req.cycles_before = 1;
  req.cycles_after = 1;
  auto report = astwt::trace(m, db, req, "clk");
  CHECK(astwt::render_report(report) == read_data_file("report_golden.txt"));
}
