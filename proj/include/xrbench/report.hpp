#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace xrbench {

enum class ReportFormat { Csv, Json };

struct ReportOptions {
  ReportFormat format = ReportFormat::Csv;
  std::optional<std::string> plots_dir;  // plot-ready CSV series go here
};

inline const std::vector<std::string>& summary_columns() {
  static const std::vector<std::string> cols = {
      "model_id", "device_id", "pp_mean", "tg_mean", "cv_pp", "cv_tg", "errors", "memory_gb",
      "battery_pct", "quality", "performance", "stability", "on_front"};
  return cols;
}

/// Builds the per-pair summary from any mix of metrics, pareto and grades
/// documents (told apart by their "schema" field) and returns the rendered
/// CSV or JSON text. Throws ValidationError naming the field on a bad input.
std::string emit_report(const std::vector<nlohmann::json>& inputs, const ReportOptions& options);

/// Reads each path as JSON and calls emit_report.
std::string emit_report_files(const std::vector<std::string>& paths, const ReportOptions& options);

}  // namespace xrbench
