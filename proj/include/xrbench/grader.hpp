#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

// Rubric scoring for the interactive tasks: map-coordinate answers (GeoVis)
// and voice commands (VOICE). Accuracy is a human label, only formatting is
// graded here.

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

namespace xrbench {

struct LatLon {
  double lat = 0;
  double lon = 0;
};

struct ParsedLatLon {
  std::optional<LatLon> coords;
  double formatting = 0;  // 0, 50, 75 or 100
};

/// 100 for an exact "[lat, lon]", 75 when a single character edit gets there,
/// 50 when two numbers can still be pulled out, 0 otherwise.
ParsedLatLon parse_latlon(std::string_view response);

/// Weighted score 0.2 * formatting + 0.8 * accuracy, forced to 0 when
/// formatting is 0. Accepts any value in [0, 100] so per-query means can be
/// passed through.
double geovis_score(double formatting, double accuracy);

struct GeoVisGrade {
  std::string query_id;
  double formatting = 0;
  double accuracy = 0;
  double score = 0;
};

struct VoiceGrade {
  std::string query_id;
  bool correct = false;
  double score = 0;
};

/// Validates that formatting and accuracy are rubric values.
GeoVisGrade make_geovis_grade(std::string query_id, double formatting, double accuracy);
VoiceGrade make_voice_grade(std::string query_id, bool correct);

struct ColumnStats {
  double mean = 0;
  double std_dev = 0;  // population
};

struct GradeSummary {
  std::size_t queries = 0;
  std::optional<ColumnStats> formatting;
  std::optional<ColumnStats> accuracy;
  ColumnStats score;
};

/// Throws ArityError on an empty list.
GradeSummary aggregate_grades(const std::vector<GeoVisGrade>& grades);
GradeSummary aggregate_grades(const std::vector<VoiceGrade>& grades);

struct ResponseRecord {
  std::string query_id;
  std::string response_text;
  std::optional<double> accuracy;
  std::optional<bool> correct;
};

std::vector<ResponseRecord> parse_responses(std::string_view text, const std::string& source = "<input>");
std::vector<ResponseRecord> load_responses(const std::string& path);

enum class GradeTask { GeoVis, Voice };

/// Grades a responses file. GeoVis rows need `accuracy`, VOICE rows need `correct`.
nlohmann::json grade_responses(GradeTask task, const std::vector<ResponseRecord>& responses);

}  // namespace xrbench
