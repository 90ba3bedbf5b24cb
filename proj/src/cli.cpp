// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/cli.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>

#include "xrbench/analysis.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/grader.hpp"
#include "xrbench/objectives.hpp"
#include "xrbench/orchestrator.hpp"
#include "xrbench/plan.hpp"
#include "xrbench/quality.hpp"
#include "xrbench/report.hpp"
#include "xrbench/store.hpp"

namespace xrbench {

using nlohmann::json;

namespace {

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("write failed for " + path);
}

json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError(path + ": not valid JSON");
  return j;
}

int plan_validate(const std::string& path) {
  const auto plan = load_plan(path);
  const auto problems = validate_plan(plan);
  for (const auto& p : problems) std::cerr << path << ": " << p << "\n";
  if (!problems.empty()) return 1;
  std::cout << path << ": ok (" << plan.models.size() << " models, " << plan.devices.size() << " devices, "
            << plan.tests.size() << " test cases)\n";
  return 0;
}

struct RunArgs {
  std::string plan, out;
  bool resume = false, mock = false;
  std::optional<std::uint64_t> seed;
};

int run_command(const RunArgs& a) {
  const auto plan = load_plan(a.plan);
  if (!a.resume && std::filesystem::exists(a.out) && std::filesystem::file_size(a.out) > 0)
    throw ValidationError("store " + a.out + " already exists; pass --resume to continue it");
  ResultStore store(a.out);
  RunOptions opts;
  opts.force_mock = a.mock;
  opts.seed = a.seed;
  const auto s = run_plan(plan, store, opts);
  json summary = {{"scheduled", s.scheduled},
                  {"completed", s.completed},
                  {"errors", s.errors},
                  {"skipped", s.skipped},
                  {"discarded_attempts", s.discarded_attempts},
                  {"battery_windows", s.battery_windows},
                  {"interrupted", s.interrupted}};
  std::cout << summary.dump() << "\n";
  return 0;
}

int analyze_command(const std::string& store_path, const std::string& out) {
  const auto snapshot = read_store(store_path);
  write_text(out, metrics_to_json(analyze(snapshot)).dump(2) + "\n");
  return 0;
}

int pareto_command(const std::string& metrics, const std::string& objectives, const std::string& quality,
                   const std::string& out) {
  const auto pairs = metrics_from_json(read_json(metrics));
  const auto config = objectives.empty() ? default_objectives() : objectives_from_json(read_json(objectives));
  const auto q = quality.empty() ? std::vector<QualityRecord>{} : load_quality_table(quality);
  const auto build = build_objectives(pairs, q, config);
  const auto result = pareto_front(build.vectors);
  for (const auto& w : build.warnings) std::cerr << "warning: " << w << "\n";
  for (const auto& e : build.excluded) std::cerr << "excluded " << e.pair.str() << ": " << e.reason << "\n";
  write_text(out, pareto_to_json(build, result).dump(2) + "\n");
  return 0;
}

int grade_command(const std::string& task, const std::string& responses, const std::string& out) {
  const auto kind = task == "geovis" ? GradeTask::GeoVis : GradeTask::Voice;
  write_text(out, grade_responses(kind, load_responses(responses)).dump(2) + "\n");
  return 0;
}

int report_command(const std::vector<std::string>& inputs, const std::string& format, const std::string& plots,
                   const std::string& out) {
  ReportOptions opts;
  opts.format = format == "json" ? ReportFormat::Json : ReportFormat::Csv;
  if (!plots.empty()) opts.plots_dir = plots;
  const auto text = emit_report_files(inputs, opts);
  if (out.empty())
    std::cout << text;
  else
    write_text(out, text);
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"On-device LLM benchmarking for XR devices"};
  app.name("xrbench");
  app.require_subcommand(1);

  auto* plan_cmd = app.add_subcommand("plan", "Experiment plan tools");
  plan_cmd->require_subcommand(1);
  auto* validate_cmd = plan_cmd->add_subcommand("validate", "Check a plan file");
  std::string plan_file;
  validate_cmd->add_option("file", plan_file, "Plan JSON")->required();

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Execute a plan into a results store");
  run_cmd->add_option("--plan", run_args.plan, "Plan JSON")->required();
  run_cmd->add_option("--out", run_args.out, "Results store (JSON lines)")->required();
  run_cmd->add_flag("--resume", run_args.resume, "Continue an existing store");
  run_cmd->add_option("--seed", run_args.seed, "Override the plan seed");
  run_cmd->add_flag("--mock", run_args.mock, "Use the mock backend on every device");

  std::string store_path, metrics_out;
  auto* analyze_cmd = app.add_subcommand("analyze", "Derive per-pair metrics from a store");
  analyze_cmd->add_option("--store", store_path, "Results store")->required();
  analyze_cmd->add_option("--out", metrics_out, "Metrics JSON")->required();

  std::string metrics_in, objectives_in, quality_in, pareto_out;
  auto* pareto_cmd = app.add_subcommand("pareto", "Score objectives and compute the Pareto front");
  pareto_cmd->add_option("--metrics", metrics_in, "Metrics JSON")->required();
  pareto_cmd->add_option("--objectives", objectives_in, "Objective weights JSON");
  pareto_cmd->add_option("--quality", quality_in, "Quality table (JSON lines)");
  pareto_cmd->add_option("--out", pareto_out, "Pareto JSON")->required();

  std::string task, responses, grades_out;
  auto* grade_cmd = app.add_subcommand("grade", "Grade interactive-task responses");
  grade_cmd->add_option("--task", task, "geovis or voice")->required()->check(CLI::IsMember({"geovis", "voice"}));
  grade_cmd->add_option("--responses", responses, "Responses (JSON lines)")->required();
  grade_cmd->add_option("--out", grades_out, "Grades JSON")->required();

  std::vector<std::string> report_inputs;
  std::string format = "csv", plots_dir, report_out;
  auto* report_cmd = app.add_subcommand("report", "Emit summary tables and plot series");
  report_cmd->add_option("--inputs", report_inputs, "Metrics, pareto and grades files")->required();
  report_cmd->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  report_cmd->add_option("--plots", plots_dir, "Directory for plot-ready CSV series");
  report_cmd->add_option("--out", report_out, "Write the summary here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return 1;
  }

  try {
    if (*validate_cmd) return plan_validate(plan_file);
    if (*run_cmd) return run_command(run_args);
    if (*analyze_cmd) return analyze_command(store_path, metrics_out);
    if (*pareto_cmd) return pareto_command(metrics_in, objectives_in, quality_in, pareto_out);
    if (*grade_cmd) return grade_command(task, responses, grades_out);
    if (*report_cmd) return report_command(report_inputs, format, plots_dir, report_out);
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 1;
}

}  // namespace xrbench
