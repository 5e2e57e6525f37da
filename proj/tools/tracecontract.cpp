#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

using namespace tracecontract::cli;

namespace {

void add_contract_flags(CLI::App* app, ContractOptions& o, bool matcher_flags) {
  app->add_option("--tolerance-ms", o.tolerance_ms, "Override the contract tolerance (milliseconds)");
  if (!matcher_flags) return;
  app->add_option("--matcher", o.matcher, "Interval matcher")->check(CLI::IsMember({"greedy", "exact"}));
  app->add_option("--soft-scale-ms", o.soft_scale_ms, "Soft boundary decay scale (milliseconds)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Boundary trace contracts: parse, monitor, sweep and audit reference/prediction masks."};
  app.set_version_flag("--version", kToolVersion);
  app.require_subcommand(1);

  ContractOptions check;
  auto* c_check = app.add_subcommand("check", "Parse a contract and list its clauses");
  c_check->add_option("contract", check.path, "Contract file")->required();
  add_contract_flags(c_check, check, true);

  MonitorOptions mon;
  auto* c_mon = app.add_subcommand("monitor", "Monitor trace files against a contract");
  c_mon->add_option("contract", mon.contract.path, "Contract file")->required();
  c_mon->add_option("traces", mon.traces, "Trace files (.json, or .csv with --frame-step-ms)")->required();
  c_mon->add_option("-o,--output", mon.output_dir, "Output directory")->required();
  c_mon->add_flag("--classes", mon.classes, "Report each class and the macro average");
  c_mon->add_option("--jobs", mon.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_mon->add_option("--frame-step-ms", mon.frame_step_ms, "Frame step for CSV traces");
  add_contract_flags(c_mon, mon.contract, true);

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "Re-instantiate the contract over a tolerance grid");
  c_sweep->add_option("contract", sweep.contract.path, "Contract file")->required();
  c_sweep->add_option("traces", sweep.traces, "Trace files")->required();
  c_sweep->add_option("-o,--output", sweep.output_dir, "Output directory")->required();
  c_sweep->add_option("--tolerances-ms", sweep.tolerances_ms, "Ascending tolerances")->delimiter(',');
  c_sweep->add_option("--jobs", sweep.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_sweep->add_option("--frame-step-ms", sweep.frame_step_ms, "Frame step for CSV traces");

  AuditOptions audit;
  auto* c_audit = app.add_subcommand("match-audit", "Compare greedy and exact interval matching");
  c_audit->add_option("traces", audit.traces, "Trace files")->required();
  c_audit->add_option("-o,--output", audit.output_dir, "Output directory")->required();
  c_audit->add_option("--epsilon-ms", audit.epsilon_ms, "Matching tolerance");
  c_audit->add_option("--bound", audit.bound, "Exact matcher bound (intervals per side)");
  c_audit->add_option("--merge-gap-ms", audit.merge_gap_ms, "Merge runs separated by at most this gap");
  c_audit->add_flag("--fatal", audit.fatal, "Exit 5 when any instance exceeds the bound");
  c_audit->add_flag("--classes", audit.classes, "Audit each class separately");
  c_audit->add_option("--jobs", audit.jobs, "Worker threads")->check(CLI::PositiveNumber);
  c_audit->add_option("--frame-step-ms", audit.frame_step_ms, "Frame step for CSV traces");

  SelectOptions sel;
  auto* c_sel = app.add_subcommand("select", "Select a separating contract from a candidate basis");
  c_sel->add_option("basis", sel.basis.path, "Candidate basis (contract file)")->required();
  c_sel->add_option("calibration", sel.calibration_path, "Calibration set (JSON)")->required();
  c_sel->add_option("-o,--output", sel.output_dir, "Write selection.csv into this directory");
  add_contract_flags(c_sel, sel.basis, true);

  StreamOptions stream;
  auto* c_stream = app.add_subcommand("stream", "Replay one trace frame by frame through a streaming monitor");
  c_stream->add_option("contract", stream.contract.path, "Contract file")->required();
  c_stream->add_option("trace", stream.trace, "Trace file")->required();
  c_stream->add_option("--clause", stream.clause, "Frame clause to stream")->required();
  c_stream->add_option("--class", stream.class_name, "Class to stream (default: merged)");
  c_stream->add_option("-o,--output", stream.output, "Output CSV (default: stdout)");
  c_stream->add_option("--frame-step-ms", stream.frame_step_ms, "Frame step for CSV traces");
  add_contract_flags(c_stream, stream.contract, false);

  std::string fixture_name, fixture_out;
  auto* c_fix = app.add_subcommand("fixture", "Write a built-in fixture");
  c_fix->add_option("name", fixture_name, "Fixture name")->required()->check(CLI::IsMember(fixture_names()));
  c_fix->add_option("-o,--output", fixture_out, "Output file (directory for stress)")->required();

  std::optional<double> default_tol;
  auto* c_def = app.add_subcommand("default-contract", "Print the default contract");
  c_def->add_option("--tolerance-ms", default_tol, "Instantiate at this tolerance");

  CLI11_PARSE(app, argc, argv);

  auto& out = std::cout;
  auto& err = std::cerr;
  if (*c_check) return cmd_check(check, out, err);
  if (*c_mon) return cmd_monitor(mon, out, err);
  if (*c_sweep) {
    sweep.contract.tolerance_ms.reset();
    return cmd_sweep(sweep, out, err);
  }
  if (*c_audit) return cmd_match_audit(audit, out, err);
  if (*c_sel) return cmd_select(sel, out, err);
  if (*c_stream) return cmd_stream(stream, out, err);
  if (*c_fix) return cmd_fixture(fixture_name, fixture_out, out, err);
  if (*c_def) return cmd_default_contract(default_tol, out, err);
  return kFailure;
}
