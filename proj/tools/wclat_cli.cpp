#include <chrono>
#include <filesystem>
#include <iostream>

#include "CLI11.hpp"
#include "wclat/analysis.hpp"
#include "wclat/model_io.hpp"

using namespace wclat;

namespace {

constexpr int kOk = 0;
constexpr int kDiagnostics = 1;
constexpr int kUsage = 2;
constexpr int kLimit = 3;

struct ModelArgs {
  std::string path;
  std::optional<Tick> horizon;
  std::optional<std::int64_t> slack;
  bool strict_safety = false;

  void attach(CLI::App* cmd, bool time_flags) {
    cmd->add_option("model", path, "Model file (JSON)")->required();
    cmd->add_flag("--strict-safety", strict_safety, "Use the safe union for equal offsets");
    if (time_flags) {
      cmd->add_option("--horizon", horizon, "Last analyzed tick (overrides the model)");
      cmd->add_option("--slack", slack, "LCM multiple for the derived horizon")->check(CLI::PositiveNumber);
    }
  }
  NetworkModel load() const { return load_model(path, {strict_safety, horizon, slack}); }
};

int print_diagnostics(const NetworkModel& net) {
  auto diags = validate(net);
  for (const auto& d : diags) std::cout << d.element << ": " << d.rule << ": " << d.message << "\n";
  return diags.empty() ? kOk : kDiagnostics;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Worst-case signal latency analysis for bus clusters"};
  app.require_subcommand(1);

  ModelArgs validate_args;
  auto* validate_cmd = app.add_subcommand("validate", "Check a model and list every violation");
  validate_args.attach(validate_cmd, false);

  ModelArgs analyze_args;
  std::vector<std::string> signals;
  bool all = false;
  double time_limit = 0;
  std::int64_t memory_limit = 0;
  int jobs = 1;
  std::string out_dir = "wclat-out";
  auto* analyze_cmd = app.add_subcommand("analyze", "Maximize the latency of objective signals");
  analyze_args.attach(analyze_cmd, true);
  auto* sig_opt = analyze_cmd->add_option("--signal", signals, "Objective signal id (repeatable)");
  auto* all_opt = analyze_cmd->add_flag("--all", all, "Analyze every objective listed in the model");
  sig_opt->excludes(all_opt);
  analyze_cmd->add_option("--time-limit", time_limit, "Seconds per signal (0 = none)")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--memory-limit", memory_limit, "Peak resident MiB (0 = none)")->check(CLI::NonNegativeNumber);
  analyze_cmd->add_option("--jobs", jobs, "Signals analyzed concurrently")->check(CLI::PositiveNumber);
  analyze_cmd->add_option("--out", out_dir, "Directory for report.json and witnesses");

  ModelArgs sim_args;
  std::string scenario_path, trace_path;
  auto* sim_cmd = app.add_subcommand("simulate", "Replay one scenario and print the trace");
  sim_args.attach(sim_cmd, true);
  sim_cmd->add_option("--scenario", scenario_path, "Scenario file (JSON)")->required();
  sim_cmd->add_option("--trace", trace_path, "Also write the trace to this file");

  ModelArgs enum_args;
  std::string enum_signal, enum_witness;
  Tick step = 1;
  double cap = 1e6;
  auto* enum_cmd = app.add_subcommand("enumerate", "Exhaustive worst case over the scenario grid");
  enum_args.attach(enum_cmd, true);
  enum_cmd->add_option("--signal", enum_signal, "Objective signal id")->required();
  enum_cmd->add_option("--step", step, "Grid step in ticks")->check(CLI::PositiveNumber);
  enum_cmd->add_option("--cap", cap, "Refuse above this many scenarios")->check(CLI::PositiveNumber);
  enum_cmd->add_option("-o,--witness", enum_witness, "Write the worst scenario here");

  ModelArgs export_args;
  std::string export_signal, export_out;
  auto* export_cmd = app.add_subcommand("export", "Write the constraint problem in neutral text form");
  export_args.attach(export_cmd, true);
  export_cmd->add_option("--signal", export_signal, "Objective signal id")->required();
  export_cmd->add_option("-o,--output", export_out, "Output file")->required();

  std::string report_path, report_format = "table";
  auto* report_cmd = app.add_subcommand("report", "Render a report.json written by analyze");
  report_cmd->add_option("report", report_path, "report.json")->required();
  report_cmd->add_option("--format", report_format, "table or json")->check(CLI::IsMember({"table", "json"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*validate_cmd) {
      NetworkModel net = validate_args.load();
      int rc = print_diagnostics(net);
      if (rc == kOk) std::cout << "ok\n";
      return rc;
    }

    if (*analyze_cmd) {
      if (!all && signals.empty()) {
        std::cerr << "analyze: give --signal <id> or --all\n";
        return kUsage;
      }
      NetworkModel net = analyze_args.load();
      if (print_diagnostics(net) != kOk) return kDiagnostics;
      if (all) signals = net.objectives;
      AnalysisOptions opt;
      if (time_limit > 0)
        opt.limits.time = std::chrono::milliseconds(static_cast<std::int64_t>(time_limit * 1000));
      if (memory_limit > 0) opt.limits.memory_mb = memory_limit;
      opt.jobs = jobs;
      opt.witness_dir = (std::filesystem::path(out_dir) / "witnesses").string();
      AnalysisReport rep = analyze(net, signals, opt);
      std::filesystem::create_directories(out_dir);
      write_file((std::filesystem::path(out_dir) / "report.json").string(), report_json(rep));
      std::cout << render_table(rep);
      int rc = kOk;
      for (const auto& row : rep.rows) {
        if (row.status == "infeasible") rc = std::max(rc, kDiagnostics);
        if (row.status == "timeout" || row.status == "incumbent") rc = kLimit;
      }
      return rc;
    }

    if (*sim_cmd) {
      NetworkModel net = sim_args.load();
      if (print_diagnostics(net) != kOk) return kDiagnostics;
      Scenario sc = load_scenario(scenario_path);
      Trace tr = simulate(net, sc);
      std::string text = format_trace(tr);
      if (!trace_path.empty()) write_file(trace_path, text);
      std::cout << text;
      for (const auto& [id, outs] : tr.signals) {
        for (std::size_t j = 0; j < outs.size(); ++j) {
          std::cout << "# latency " << id << " " << tr.signal_first.at(id) + static_cast<std::int64_t>(j) << " ";
          if (outs[j].latency)
            std::cout << *outs[j].latency << "\n";
          else
            std::cout << "none\n";
        }
      }
      return kOk;
    }

    if (*enum_cmd) {
      NetworkModel net = enum_args.load();
      if (print_diagnostics(net) != kOk) return kDiagnostics;
      try {
        EnumerationResult r = worst_case_enumerate(net, enum_signal, step, cap);
        std::cout << "signal " << enum_signal << " latency ";
        if (r.latency)
          std::cout << *r.latency;
        else
          std::cout << "none";
        std::cout << " scenarios " << r.scenarios << (r.exact ? " exact" : " approximate (grid step > 1)") << "\n";
        if (!enum_witness.empty()) write_file(enum_witness, dump_scenario(r.witness));
        return kOk;
      } catch (const EnumerationRefused& e) {
        std::cerr << e.what() << "\n";
        return kLimit;
      }
    }

    if (*export_cmd) {
      NetworkModel net = export_args.load();
      if (print_diagnostics(net) != kOk) return kDiagnostics;
      Encoding enc = analysis_problem(net, export_signal);
      write_file(export_out, export_neutral(enc.problem));
      return kOk;
    }

    if (*report_cmd) {
      AnalysisReport rep = parse_report(read_file(report_path), report_path);
      std::cout << (report_format == "json" ? report_json(rep) : render_table(rep));
      return kOk;
    }
  } catch (const FormatError& e) {
    std::cerr << e.what() << "\n";
    return kUsage;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario rejected: " << e.what() << "\n";
    return kDiagnostics;
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kDiagnostics;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDiagnostics;
  }
  return kUsage;
}
