#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "commands.hpp"

namespace fs = std::filesystem;
using namespace tracecontract;

namespace {

fs::path scratch() {
  static const fs::path dir = [] {
    auto d = fs::temp_directory_path() / ("tracecontract_cli_" + std::to_string(::getpid()));
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void spit(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::string& args) {
  const auto out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
  const std::string cmd =
      std::string(TRACECONTRACT_EXE) + " " + args + " >" + out.string() + " 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, slurp(out), slurp(err)};
}

std::string fixture(const std::string& name) {
  const auto p = scratch() / (name + ".json");
  if (!fs::exists(p)) EXPECT_EQ(run("fixture " + name + " -o " + p.string()).code, 0);
  return p.string();
}

std::string default_contract_file() {
  const auto p = scratch() / "default.contract";
  spit(p, default_contract_source());
  return p.string();
}

// Reads guards.csv into clause -> score for one class column value.
std::map<std::string, std::string> guard_scores(const fs::path& csv, const std::string& cls) {
  std::map<std::string, std::string> out;
  std::istringstream in(slurp(csv));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#' || line.rfind("item_id", 0) == 0) continue;
    std::vector<std::string> cells;
    std::stringstream row(line);
    for (std::string c; std::getline(row, c, ',');) cells.push_back(c);
    if (cells.size() >= 5 && cells[1] == cls) out[cells[2]] = cells[4];
  }
  return out;
}

}  // namespace

TEST(Cli, CheckDefaultContract) {
  const auto r = run("check " + default_contract_file());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("frame onset_guard"), std::string::npos);
  EXPECT_NE(r.out.find("lookahead="), std::string::npos);
}

TEST(Cli, MisspelledOperatorExitsTwoWithCaret) {
  const auto p = scratch() / "bad.contract";
  spit(p, "frame f : ref_onset - > pred_onset @ ref_onset\n");
  const auto r = run("check " + p.string());
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("line 1"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("^"), std::string::npos) << r.err;
}

TEST(Cli, UnknownAtomParsesButFailsBinding) {
  const auto p = scratch() / "atom.contract";
  spit(p, "frame f : ref_onset -> N[{tol}] pred_onsett @ ref_onset\n");
  EXPECT_EQ(run("check " + p.string()).code, 0);
  const auto r = run("monitor " + p.string() + " " + fixture("worked") + " -o " + (scratch() / "atom").string());
  EXPECT_EQ(r.code, 4);
  EXPECT_NE(r.err.find("pred_onsett"), std::string::npos) << r.err;
}

TEST(Cli, BadTraceExitsThree) {
  const auto p = scratch() / "bad.json";
  spit(p, R"({"frame_step": 0.02, "classes": {"a": {"ref": "10", "pred": "1"}}})");
  EXPECT_EQ(run("monitor " + default_contract_file() + " " + p.string() + " -o " + (scratch() / "bt").string()).code,
            3);
  EXPECT_EQ(run("monitor " + default_contract_file() + " /nonexistent.json -o " + (scratch() / "bt").string()).code,
            3);
}

TEST(Cli, WorkedTraceRows) {
  const auto dir = scratch() / "worked60";
  ASSERT_EQ(run("monitor " + default_contract_file() + " " + fixture("worked") + " --tolerance-ms 60 -o " +
                dir.string())
                .code,
            0);
  const auto g = guard_scores(dir / "guards.csv", "event");
  EXPECT_EQ(g.at("onset_guard"), "1");
  EXPECT_EQ(g.at("offset_guard"), "0");
  EXPECT_EQ(g.at("duration_guard"), "0");
  const auto head = slurp(dir / "guards.csv").substr(0, 11);
  EXPECT_EQ(head, "# manifest ");
}

TEST(Cli, IdenticalMasksScoreOne) {
  const auto dir = scratch() / "nominal";
  ASSERT_EQ(run("monitor " + default_contract_file() + " " + fixture("nominal") + " -o " + dir.string()).code, 0);
  for (const auto& [clause, score] : guard_scores(dir / "guards.csv", "event"))
    if (clause != "boundary_f1" && clause != "soft_boundary") EXPECT_EQ(score, "1") << clause;
}

TEST(Cli, MonitorIsByteDeterministic) {
  const auto a = scratch() / "det_a", b = scratch() / "det_b";
  const std::string inputs = default_contract_file() + " " + fixture("worked") + " " + fixture("bridge");
  ASSERT_EQ(run("monitor " + inputs + " --jobs 2 -o " + a.string()).code, 0);
  ASSERT_EQ(run("monitor " + inputs + " --jobs 1 -o " + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "guards.csv"), slurp(b / "guards.csv"));
  EXPECT_EQ(slurp(a / "witnesses.csv"), slurp(b / "witnesses.csv"));
}

TEST(Cli, SweepRowsPerTolerance) {
  const auto dir = scratch() / "sweep";
  ASSERT_EQ(run("sweep " + default_contract_file() + " " + fixture("worked") + " -o " + dir.string()).code, 0);
  const auto csv = slurp(dir / "sweep.csv");
  for (const char* t : {"\nworked,20,", "\nworked,40,", "\nworked,80,", "\nworked,120,", "\nworked,160,"})
    EXPECT_NE(csv.find(t), std::string::npos) << t;
  const auto formulas = slurp(dir / "sweep_formulas.csv");
  EXPECT_NE(formulas.find("N[0.02]"), std::string::npos);
  EXPECT_NE(formulas.find("N[0.16]"), std::string::npos);
  EXPECT_EQ(run("sweep " + default_contract_file() + " " + fixture("worked") + " --tolerances-ms 40,20 -o " +
                dir.string())
                .code,
            1);
}

TEST(Cli, MatchAuditBridge) {
  const auto dir = scratch() / "audit";
  ASSERT_EQ(run("match-audit " + fixture("bridge") + " " + fixture("nominal") + " -o " + dir.string()).code, 0);
  const auto csv = slurp(dir / "audit.csv");
  EXPECT_NE(csv.find("\nbridge,event,2,2,1,2,1,"), std::string::npos) << csv;
  EXPECT_NE(csv.find("\nnominal,event,2,2,2,2,0,"), std::string::npos) << csv;
  EXPECT_EQ(run("match-audit " + fixture("bridge") + " --bound 1 -o " + dir.string()).code, 0);
  EXPECT_EQ(run("match-audit " + fixture("bridge") + " --bound 1 --fatal -o " + dir.string()).code, 5);
}

TEST(Cli, SelectCalibration) {
  const auto cal = scratch() / "cal.json";
  ASSERT_EQ(run("fixture calibration -o " + cal.string()).code, 0);
  const auto r = run("select " + default_contract_file() + " " + cal.string() + " --tolerance-ms 80 -o " +
                     (scratch() / "sel").string());
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("certificate:"), std::string::npos);
  EXPECT_TRUE(fs::exists(scratch() / "sel" / "selection.csv"));

  const auto lone = scratch() / "lone.contract";
  spit(lone, "frame spur : pred_active -> ref_active @ pred_active\n");
  const auto bad = run("select " + lone.string() + " " + cal.string());
  EXPECT_EQ(bad.code, 6);
  EXPECT_NE(bad.out.find("infeasible"), std::string::npos);
}

TEST(Cli, StreamLagAndAgreement) {
  const auto p = scratch() / "near.contract";
  spit(p, "set tolerance = 0.04\nframe near : ref_active -> N[{tol}] pred_active @ ref_active\n"
          "frame now : ref_active -> pred_active @ ref_active\n");
  const auto r = run("stream " + p.string() + " " + fixture("worked") + " --clause near");
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("\n10,12,1,1,1\n"), std::string::npos);
  EXPECT_EQ(r.out.find(",0\n"), std::string::npos);  // no disagreement
  const auto now = run("stream " + p.string() + " " + fixture("worked") + " --clause now");
  EXPECT_NE(now.out.find("\n10,10,1,1,1\n"), std::string::npos);
  EXPECT_EQ(run("stream " + p.string() + " " + fixture("worked") + " --clause nope").code, 2);
}

TEST(Cli, CsvTraceNeedsFrameStep) {
  const auto p = scratch() / "t.csv";
  spit(p, "ref,pred\n0,0\n1,1\n1,1\n0,0\n");
  EXPECT_EQ(run("monitor " + default_contract_file() + " " + p.string() + " -o " + (scratch() / "csv").string()).code,
            3);
  EXPECT_EQ(run("monitor " + default_contract_file() + " " + p.string() + " --frame-step-ms 20 -o " +
                (scratch() / "csv").string())
                .code,
            0);
}

TEST(Cli, ClassesAddMacroRow) {
  const auto p = scratch() / "two.json";
  spit(p, R"({"item_id": "two", "frame_step": 0.02, "classes": {
      "a": {"ref": "0011110000", "pred": "0011110000"},
      "b": {"ref": "0000001100", "pred": "0000000000"}}})");
  const auto dir = scratch() / "classes";
  ASSERT_EQ(run("monitor " + default_contract_file() + " " + p.string() + " --classes -o " + dir.string()).code, 0);
  EXPECT_EQ(guard_scores(dir / "guards.csv", "macro").at("missing_guard"), "0.5");
  EXPECT_EQ(guard_scores(dir / "guards.csv", "a").at("missing_guard"), "1");
}

TEST(Cli, WitnessUnitFollowsPredicate) {
  const auto dir = scratch() / "frag";
  ASSERT_EQ(run("monitor " + default_contract_file() + " " + fixture("fragmented") + " -o " + dir.string()).code, 0);
  const auto csv = slurp(dir / "guards.csv");
  EXPECT_NE(csv.find("fragmentation_guard,event,0,1,0,1,2,count"), std::string::npos) << csv;
}
