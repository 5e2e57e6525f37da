#pragma once

// Subcommand implementations. Each returns a process exit status and writes
// diagnostics to `err`; main() only parses flags.

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "manifest.hpp"
#include "tracecontract/audit.hpp"
#include "tracecontract/basis.hpp"
#include "tracecontract/contract_file.hpp"
#include "tracecontract/fixtures.hpp"
#include "tracecontract/io/report.hpp"
#include "tracecontract/io/trace_file.hpp"
#include "tracecontract/streaming.hpp"
#include "tracecontract/sweep.hpp"

namespace tracecontract::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
  kOk = 0,
  kFailure = 1,
  kContractError = 2,
  kTraceError = 3,
  kBindingError = 4,
  kBoundExceeded = 5,
  kInfeasible = 6,
};

/// Error with a chosen exit status and a plain message.
struct CliError : std::runtime_error {
  int code;
  CliError(int c, const std::string& msg) : std::runtime_error(msg), code(c) {}
};

inline std::string read_file(const std::string& path, int code) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CliError(code, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_file(const fs::path& path, const std::string& bytes) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CliError(kFailure, "cannot write '" + path.string() + "'");
  out << bytes;
}

/// Runs `body`, mapping library errors onto exit codes.
inline int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const CliError& e) {
    err << "error: " << e.what() << "\n";
    return e.code;
  } catch (const ContractError& e) {
    err << "contract error: " << e.render() << "\n";
    return kContractError;
  } catch (const io::TraceError& e) {
    err << "trace error: " << e.what() << "\n";
    return kTraceError;
  } catch (const BindingError& e) {
    err << "binding error: " << e.what() << "\n";
    return kBindingError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kFailure;
  }
}

/// Applies `fn` to every item on up to `jobs` threads. Results keep input
/// order; the first failing item (in input order) rethrows.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, std::size_t jobs, F fn) {
  using R = decltype(fn(items.front()));
  std::vector<std::optional<R>> results(items.size());
  std::vector<std::exception_ptr> errors(items.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < items.size();) {
      try {
        results[k] = fn(items[k]);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    }
  };
  jobs = std::max<std::size_t>(1, std::min(jobs, items.size()));
  std::vector<std::thread> pool;
  for (std::size_t t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  std::vector<R> out;
  for (std::size_t k = 0; k < items.size(); ++k) {
    if (errors[k]) std::rethrow_exception(errors[k]);
    out.push_back(std::move(*results[k]));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Shared loading

struct ContractOptions {
  std::string path;
  std::optional<double> tolerance_ms;
  std::optional<std::string> matcher;
  std::optional<double> soft_scale_ms;
};

struct LoadedContract {
  std::string text;
  Contract contract;
};

inline LoadedContract load_contract(const ContractOptions& o) {
  LoadedContract out;
  out.text = read_file(o.path, kContractError);
  std::optional<double> tol;
  if (o.tolerance_ms) {
    if (!(*o.tolerance_ms > 0.0)) throw CliError(kContractError, "tolerance must be positive");
    tol = *o.tolerance_ms / 1000.0;
  }
  out.contract = parse_contract(out.text, tol);
  auto& s = out.contract.settings;
  if (o.matcher) {
    try {
      s.matcher = parse_policy(*o.matcher);
    } catch (const std::exception& e) {
      throw CliError(kContractError, e.what());
    }
  }
  if (o.soft_scale_ms) s.soft_scale = *o.soft_scale_ms / 1000.0;
  try {
    out.contract.validate();
  } catch (const std::invalid_argument& e) {
    throw CliError(kContractError, e.what());
  }
  return out;
}

struct TraceInput {
  std::string path;
  std::string bytes;
  io::TraceFile trace;
};

inline TraceInput load_trace(const std::string& path, std::optional<double> csv_frame_step_ms) {
  TraceInput t;
  t.path = path;
  t.bytes = read_file(path, kTraceError);
  if (fs::path(path).extension() == ".csv") {
    if (!csv_frame_step_ms) throw CliError(kTraceError, path + ": CSV traces need --frame-step-ms");
    t.trace = io::read_trace_csv(t.bytes, *csv_frame_step_ms / 1000.0, fs::path(path).stem().string());
  } else {
    t.trace = io::read_trace_json(t.bytes, fs::path(path).stem().string());
  }
  return t;
}

inline std::vector<TraceInput> load_traces(const std::vector<std::string>& paths, std::optional<double> step_ms) {
  if (paths.empty()) throw CliError(kTraceError, "no trace files given");
  std::vector<TraceInput> out;
  for (const auto& p : paths) out.push_back(load_trace(p, step_ms));
  return out;
}

inline RunManifest make_manifest(const std::string& command, const std::string* contract_text,
                                 const ContractSettings& settings, const std::vector<TraceInput>& traces) {
  RunManifest m;
  m.command = command;
  if (contract_text) m.contract_sha256 = sha256_hex(*contract_text);
  m.settings = settings;
  for (const auto& t : traces) m.inputs.emplace_back(t.path, sha256_hex(t.bytes));
  m.timestamp = utc_timestamp();
  return m;
}

inline std::string manifest_line(const RunManifest& m) { return "# manifest " + m.hash() + "\n"; }

// ---------------------------------------------------------------------------
// check

inline int cmd_check(const ContractOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_contract(opts);
    const auto& c = loaded.contract;
    const auto& s = c.settings;
    out << "settings: tolerance=" << format_decimal(s.tolerance) << " s, silence_radius="
        << format_decimal(c.silence_radius()) << " s, merge_gap=" << format_decimal(s.merge_gap)
        << " s, matcher=" << to_string(s.matcher) << ", soft_scale=" << format_decimal(s.soft_scale) << " s\n";
    out << c.clauses.size() << " clauses\n";
    for (const auto& clause : c.clauses) {
      if (const auto* f = std::get_if<FrameClause>(&clause)) {
        out << "frame " << f->name << "\n"
            << "  formula:    " << format(f->formula) << "\n"
            << "  obligation: " << format(f->obligation) << "\n"
            << "  temporal_depth=" << temporal_depth(f->formula) << " radius_sum=" << format_decimal(radius_sum(f->formula))
            << " s lookahead=" << format_decimal(1000.0 * lookahead(f->formula)) << " ms\n";
        continue;
      }
      const auto& e = std::get<EventClause>(clause);
      out << "event " << e.name << "\n  " << to_string(e.predicate) << " @ " << to_string(e.obligation);
      for (const auto& [k, v] : e.params) out << " " << k << "=" << format_decimal(v);
      out << "\n";
    }
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// monitor

struct MonitorOptions {
  ContractOptions contract;
  std::vector<std::string> traces;
  std::string output_dir;
  bool classes = false;
  std::size_t jobs = 1;
  std::optional<double> frame_step_ms;  // CSV traces only
};

inline const std::vector<std::string>& guard_header() {
  static const std::vector<std::string> h{"item_id",  "class",     "clause",   "kind",         "score",
                                          "obligated", "satisfied", "violated", "witness_mean", "witness_unit"};
  return h;
}

// Coverage and purity witnesses count intervals; every other witness is a time.
inline bool counts_witness(const Contract& contract, const std::string& clause) {
  const auto* e = std::get_if<EventClause>(contract.find(clause));
  return e && (e->predicate == EventPredicate::singly_covered || e->predicate == EventPredicate::overlap_purity);
}

inline void guard_rows(std::string& csv, const std::string& item, const std::string& cls, const Contract& contract,
                       const GuardVector& g, const MonitorResult* companions) {
  for (const auto& c : g.coordinates) {
    const bool count_witness = counts_witness(contract, c.name);
    std::string unit;
    std::optional<double> w = c.witness_mean;
    if (w) {
      unit = count_witness ? "count" : "ms";
      if (!count_witness) *w *= 1000.0;
    }
    csv += io::csv_row({item, cls, c.name, c.kind == ClauseKind::frame ? "frame" : "event", io::num(c.score.score),
                        io::num(c.score.obligated), io::num(c.score.satisfied), io::num(c.score.violated), io::num(w),
                        unit});
  }
  auto summary = [&](const std::string& name, double v) {
    csv += io::csv_row({item, cls, name, "summary", io::num(v), "", "", "", "", ""});
  };
  if (!g.empty()) summary("mean_logic", mean_logic(g));
  if (companions) {
    summary("boundary_f1", companions->boundary_f1);
    summary("soft_boundary", companions->soft_boundary);
  }
}

inline const std::vector<std::string>& witness_header() {
  static const std::vector<std::string> h{"item_id",          "class",           "refs",           "preds",
                                          "matched",          "onset_mae_ms",    "offset_mae_ms",  "onset_excluded",
                                          "offset_excluded",  "duration_mae_ms", "fragment_excess"};
  return h;
}

inline void witness_row(std::string& csv, const std::string& item, const std::string& cls, const MonitorResult& r) {
  const auto& w = r.witnesses;
  std::optional<double> dur;
  if (!w.duration_abs_diffs.empty()) {
    double s = 0.0;
    for (double d : w.duration_abs_diffs) s += d;
    dur = 1000.0 * s / static_cast<double>(w.duration_abs_diffs.size());
  }
  std::size_t excess = 0;
  for (auto e : w.fragmentation_excess) excess += e;
  csv += io::csv_row({item, cls, io::num(r.refs.size()), io::num(r.preds.size()), io::num(r.matching.size()),
                      io::num(w.onset_mae_ms), io::num(w.offset_mae_ms), io::num(w.onset_excluded),
                      io::num(w.offset_excluded), io::num(dur), io::num(excess)});
}

inline int cmd_monitor(const MonitorOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_contract(opts.contract);
    const auto traces = load_traces(opts.traces, opts.frame_step_ms);
    const auto manifest = make_manifest("monitor", &loaded.text, loaded.contract.settings, traces);

    struct ItemRows {
      std::string guards, witnesses;
    };
    const auto rows = parallel_map(traces, opts.jobs, [&](const TraceInput& t) {
      ItemRows r;
      const auto& id = t.trace.item_id;
      const double h = t.trace.frame_step;
      if (opts.classes) {
        const auto res = monitor_classes(loaded.contract, t.trace.classes, h);
        for (const auto& [cls, mr] : res.per_class) {
          guard_rows(r.guards, id, cls, loaded.contract, mr.guards, &mr);
          witness_row(r.witnesses, id, cls, mr);
        }
        guard_rows(r.guards, id, "macro", loaded.contract, res.macro, nullptr);
      } else {
        const auto [cls, masks] = t.trace.merged();
        const auto mr = monitor(loaded.contract, masks.first, masks.second, h);
        guard_rows(r.guards, id, cls, loaded.contract, mr.guards, &mr);
        witness_row(r.witnesses, id, cls, mr);
      }
      return r;
    });

    std::string guards = manifest_line(manifest) + io::csv_row(guard_header());
    std::string witnesses = manifest_line(manifest) + io::csv_row(witness_header());
    for (const auto& r : rows) {
      guards += r.guards;
      witnesses += r.witnesses;
    }
    const fs::path dir(opts.output_dir);
    write_file(dir / "guards.csv", guards);
    write_file(dir / "witnesses.csv", witnesses);
    write_file(dir / "manifest.json", manifest.to_json());
    out << "monitored " << traces.size() << " item(s); reports in " << dir.string() << "\n";
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// sweep

struct SweepOptions {
  ContractOptions contract;
  std::vector<std::string> traces;
  std::string output_dir;
  std::vector<double> tolerances_ms{20, 40, 80, 120, 160};
  std::size_t jobs = 1;
  std::optional<double> frame_step_ms;
};

inline int cmd_sweep(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_contract(opts.contract);
    const auto traces = load_traces(opts.traces, opts.frame_step_ms);
    std::vector<double> tols;
    for (double ms : opts.tolerances_ms) tols.push_back(ms / 1000.0);
    for (std::size_t k = 0; k < tols.size(); ++k)
      if (!(tols[k] > 0.0) || (k && !(tols[k] > tols[k - 1])))
        throw CliError(kFailure, "tolerances must be positive and strictly ascending");

    const auto results = parallel_map(traces, opts.jobs, [&](const TraceInput& t) {
      const auto [cls, masks] = t.trace.merged();
      return tolerance_sweep(loaded.text, masks.first, masks.second, t.trace.frame_step, tols);
    });
    const auto manifest = make_manifest("sweep", &loaded.text, loaded.contract.settings, traces);

    std::vector<std::string> names;
    for (const auto& c : loaded.contract.clauses) names.push_back(clause_name(c));
    std::vector<std::string> header{"item_id", "tolerance_ms"};
    for (const auto& n : names) header.push_back(n);
    header.push_back("mean_logic");
    for (const auto& n : names) {
      header.push_back(n + "_integral");
      header.push_back(n + "_span");
    }
    header.push_back("mean_logic_integral");
    header.push_back("mean_logic_span");

    std::string csv = manifest_line(manifest) + io::csv_row(header);
    for (std::size_t item = 0; item < traces.size(); ++item) {
      const auto& sw = results[item];
      for (const auto& row : sw.rows) {
        std::vector<std::string> cells{traces[item].trace.item_id, io::num(1000.0 * row.tolerance)};
        for (const auto& c : row.result.guards.coordinates) cells.push_back(io::num(c.score.score));
        cells.push_back(io::num(row.mean_logic));
        for (const auto& n : names) {
          cells.push_back(io::num(sw.per_coordinate.at(n).integral));
          cells.push_back(io::num(sw.per_coordinate.at(n).span));
        }
        cells.push_back(io::num(sw.mean_logic.integral));
        cells.push_back(io::num(sw.mean_logic.span));
        csv += io::csv_row(cells);
      }
    }

    // The contract re-instantiated at each tolerance, as canonical text.
    std::string formulas = manifest_line(manifest) + io::csv_row({"tolerance_ms", "clause", "formula", "obligation"});
    for (double tol : tols) {
      const auto c = parse_contract(loaded.text, tol);
      for (const auto& clause : c.clauses)
        if (const auto* f = std::get_if<FrameClause>(&clause))
          formulas += io::csv_row({io::num(1000.0 * tol), f->name, format(f->formula), format(f->obligation)});
    }

    const fs::path dir(opts.output_dir);
    write_file(dir / "sweep.csv", csv);
    write_file(dir / "sweep_formulas.csv", formulas);
    write_file(dir / "manifest.json", manifest.to_json());
    out << "swept " << traces.size() << " item(s) over " << tols.size() << " tolerances; reports in " << dir.string()
        << "\n";
    return kOk;
  });
}

// ---------------------------------------------------------------------------
// match-audit

struct AuditOptions {
  std::vector<std::string> traces;
  std::string output_dir;
  double epsilon_ms = 40.0;
  std::size_t bound = kDefaultExactBound;
  bool fatal = false;
  bool classes = false;
  double merge_gap_ms = 0.0;
  std::size_t jobs = 1;
  std::optional<double> frame_step_ms;
};

inline int cmd_match_audit(const AuditOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!(opts.epsilon_ms > 0.0)) throw CliError(kFailure, "epsilon must be positive");
    const auto traces = load_traces(opts.traces, opts.frame_step_ms);
    ContractSettings settings;
    settings.tolerance = opts.epsilon_ms / 1000.0;
    settings.merge_gap = opts.merge_gap_ms / 1000.0;
    settings.matcher = MatcherPolicy::exact;
    settings.exact_bound = opts.bound;
    const auto manifest = make_manifest("match-audit", nullptr, settings, traces);

    struct Row {
      std::string csv;
      bool out_of_bound = false;
    };
    const auto rows = parallel_map(traces, opts.jobs, [&](const TraceInput& t) {
      Row r;
      std::vector<std::pair<std::string, std::pair<Mask, Mask>>> parts;
      if (opts.classes)
        for (const auto& [cls, m] : t.trace.classes) parts.emplace_back(cls, m);
      else
        parts.push_back(t.trace.merged());
      for (const auto& [cls, m] : parts) {
        const auto a = matcher_audit(m.first, m.second, t.trace.frame_step, settings.tolerance, opts.bound,
                                     settings.merge_gap);
        r.out_of_bound = r.out_of_bound || !a.within_bound;
        auto exact = [&](double v) { return a.within_bound ? io::num(v) : std::string(); };
        r.csv += io::csv_row({t.trace.item_id, cls, io::num(a.ref_count), io::num(a.pred_count),
                              io::num(a.greedy.size()), a.within_bound ? io::num(a.exact.size()) : "",
                              a.within_bound ? (a.changed ? "1" : "0") : "", io::num(a.bf1_greedy),
                              exact(a.bf1_exact), exact(a.delta_bf1()), io::num(a.duration_greedy),
                              exact(a.duration_exact), io::num(a.fragmentation_greedy), exact(a.fragmentation_exact),
                              exact(a.delta_event()), a.within_bound ? "1" : "0"});
      }
      return r;
    });

    std::string csv = manifest_line(manifest) +
                      io::csv_row({"item_id", "class", "refs", "preds", "greedy_matches", "exact_matches", "changed",
                                   "bf1_greedy", "bf1_exact", "delta_bf1", "duration_greedy", "duration_exact",
                                   "fragmentation_greedy", "fragmentation_exact", "delta_event", "within_bound"});
    bool any_out = false;
    for (const auto& r : rows) {
      csv += r.csv;
      any_out = any_out || r.out_of_bound;
    }
    const fs::path dir(opts.output_dir);
    write_file(dir / "audit.csv", csv);
    write_file(dir / "manifest.json", manifest.to_json());
    out << "audited " << traces.size() << " item(s); reports in " << dir.string() << "\n";
    if (any_out) {
      err << "warning: some instances exceed the exact matcher bound of " << opts.bound << " intervals per side\n";
      if (opts.fatal) return static_cast<int>(kBoundExceeded);
    }
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------
// select

struct SelectOptions {
  ContractOptions basis;
  std::string calibration_path;
  std::optional<std::string> output_dir;
};

inline int cmd_select(const SelectOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_contract(opts.basis);
    const auto cal_bytes = read_file(opts.calibration_path, kTraceError);
    const auto cases = io::read_calibration_json(cal_bytes, opts.calibration_path);
    const auto basis = CandidateBasis::from_contract(loaded.contract);

    std::string csv = io::csv_row({"section", "item", "detail"});
    out << "calibration cases: " << cases.size() << "\n";

    out << "equivalence classes:\n";
    for (const auto& c : observational_classes(basis, cases)) {
      std::string members;
      for (auto m : c.members) members += (members.empty() ? "" : ";") + basis.clauses[m].name();
      out << "  {" << members << "}" << (c.constant ? " constant" : "") << "\n";
      csv += io::csv_row({"class", members, c.constant ? "constant" : "varying"});
    }

    const auto retained = retained_basis(basis, cases);
    out << "retained basis:";
    for (const auto& c : retained.clauses) {
      out << " " << c.name();
      csv += io::csv_row({"retained", c.name(), ""});
    }
    out << "\n";

    const auto sel = select_contract(retained, cases);
    if (!sel.feasible) {
      if (sel.unseparated) {
        const auto& [u, v] = *sel.unseparated;
        out << "infeasible: no clause scores '" << cases[u].id << "' (risk " << format_decimal(cases[u].risk)
            << ") above '" << cases[v].id << "' (risk " << format_decimal(cases[v].risk) << ")\n";
        csv += io::csv_row({"infeasible", cases[u].id + " < " + cases[v].id, ""});
      } else {
        out << "infeasible\n";
      }
      if (opts.output_dir) write_file(fs::path(*opts.output_dir) / "selection.csv", csv);
      return static_cast<int>(kInfeasible);
    }
    out << "selected (cost " << sel.total_cost << "):";
    for (auto k : sel.selected) {
      out << " " << retained.clauses[k].name();
      csv += io::csv_row({"selected", retained.clauses[k].name(), io::num(retained.clauses[k].cost)});
    }
    out << "\ncertificate:\n";
    for (const auto& w : sel.certificate) {
      const std::string pair = cases[w.lower].id + " < " + cases[w.higher].id;
      out << "  " << pair << " by " << retained.clauses[w.clause].name() << "\n";
      csv += io::csv_row({"certificate", pair, retained.clauses[w.clause].name()});
    }
    if (opts.output_dir) write_file(fs::path(*opts.output_dir) / "selection.csv", csv);
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------
// stream

struct StreamOptions {
  ContractOptions contract;
  std::string trace;
  std::string clause;
  std::optional<std::string> class_name;
  std::optional<std::string> output;
  std::optional<double> frame_step_ms;
};

inline int cmd_stream(const StreamOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto loaded = load_contract(opts.contract);
    const Clause* clause = loaded.contract.find(opts.clause);
    if (!clause) throw CliError(kContractError, "no clause named '" + opts.clause + "'");
    const auto* frame = std::get_if<FrameClause>(clause);
    if (!frame) throw CliError(kContractError, "clause '" + opts.clause + "' is an event clause; stream needs a frame clause");

    const auto t = load_trace(opts.trace, opts.frame_step_ms);
    std::pair<Mask, Mask> masks;
    if (opts.class_name) {
      auto it = t.trace.classes.find(*opts.class_name);
      if (it == t.trace.classes.end()) throw CliError(kTraceError, "no class named '" + *opts.class_name + "'");
      masks = it->second;
    } else {
      masks = t.trace.merged().second;
    }
    const auto env = derive_edge_atoms(masks.first, masks.second, t.trace.frame_step);
    const Mask offline = evaluate(frame->formula, env);
    const auto records = replay(frame->formula, env);
    const auto manifest = make_manifest("stream", &loaded.text, loaded.contract.settings, {t});

    std::string csv = manifest_line(manifest) + io::csv_row({"frame", "emitted_at", "verdict", "offline", "agree"});
    std::size_t disagreements = 0;
    for (const auto& r : records) {
      const bool agree = r.verdict == static_cast<bool>(offline.at(r.frame));
      disagreements += !agree;
      csv += io::csv_row({io::num(r.frame), io::num(r.emitted_at), r.verdict ? "1" : "0", offline[r.frame] ? "1" : "0",
                          agree ? "1" : "0"});
    }
    if (opts.output) write_file(*opts.output, csv);
    else out << csv;
    if (disagreements) {
      err << "error: " << disagreements << " streamed verdicts differ from offline evaluation\n";
      return static_cast<int>(kFailure);
    }
    return static_cast<int>(kOk);
  });
}

// ---------------------------------------------------------------------------
// fixture and default-contract

inline io::TraceFile as_trace_file(const TracePair& p) {
  io::TraceFile t;
  t.item_id = p.id;
  t.frame_step = p.frame_step;
  t.classes["event"] = {p.ref, p.pred};
  return t;
}

inline const std::vector<std::string>& fixture_names() {
  static const std::vector<std::string> names{"worked", "fragmented", "bridge", "split", "nominal", "stress",
                                              "calibration"};
  return names;
}

/// Writes a named fixture. `stress` writes one file per case into a directory.
inline int cmd_fixture(const std::string& name, const std::string& output, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    auto dump = [](const io::TraceFile& t) { return trace_to_json(t).dump(2) + "\n"; };
    if (name == "calibration") {
      write_file(output, io::calibration_to_json(calibration_cases()).dump(2) + "\n");
    } else if (name == "stress") {
      for (const auto& p : stress_family()) write_file(fs::path(output) / (p.id + ".json"), dump(as_trace_file(p)));
    } else {
      static const std::map<std::string, TracePair (*)()> single{{"worked", worked_trace},
                                                                 {"fragmented", fragmented_trace},
                                                                 {"bridge", bridge_trace},
                                                                 {"split", split_trace},
                                                                 {"nominal", nominal_trace}};
      auto it = single.find(name);
      if (it == single.end()) throw CliError(kFailure, "unknown fixture '" + name + "'");
      write_file(output, dump(as_trace_file(it->second())));
    }
    out << "wrote " << name << " to " << output << "\n";
    return static_cast<int>(kOk);
  });
}

inline int cmd_default_contract(std::optional<double> tolerance_ms, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (tolerance_ms) out << render_contract(default_contract(*tolerance_ms / 1000.0));
    else out << default_contract_source();
    return static_cast<int>(kOk);
  });
}

}  // namespace tracecontract::cli
