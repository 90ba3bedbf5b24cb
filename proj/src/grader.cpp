// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/grader.hpp"

#include <cmath>
#include <fstream>
#include <regex>
#include <set>
#include <sstream>

#include "xrbench/errors.hpp"

namespace xrbench {

using nlohmann::json;

namespace {

const std::regex& exact_pattern() {
  static const std::regex re(R"(^\[(-?\d+(?:\.\d+)?), (-?\d+(?:\.\d+)?)\]$)");
  return re;
}

std::optional<LatLon> match_exact(const std::string& s) {
  std::smatch m;
  if (!std::regex_match(s, m, exact_pattern())) return std::nullopt;
  LatLon ll{std::stod(m[1].str()), std::stod(m[2].str())};
  if (!std::isfinite(ll.lat) || !std::isfinite(ll.lon)) return std::nullopt;
  return ll;
}

// Longer answers are prose, not a near miss of the bracket format.
constexpr std::size_t kMaxRepairLength = 64;
constexpr std::string_view kRepairAlphabet = "[], .-0123456789";

std::optional<LatLon> match_one_edit(const std::string& s) {
  if (s.size() > kMaxRepairLength) return std::nullopt;
  std::string c;
  for (std::size_t i = 0; i < s.size(); ++i) {
    c = s;
    c.erase(i, 1);
    if (auto ll = match_exact(c)) return ll;
  }
  for (std::size_t i = 0; i < s.size(); ++i)
    for (char ch : kRepairAlphabet) {
      if (s[i] == ch) continue;
      c = s;
      c[i] = ch;
      if (auto ll = match_exact(c)) return ll;
    }
  for (std::size_t i = 0; i <= s.size(); ++i)
    for (char ch : kRepairAlphabet) {
      c = s;
      c.insert(i, 1, ch);
      if (auto ll = match_exact(c)) return ll;
    }
  return std::nullopt;
}

std::optional<LatLon> match_two_numbers(const std::string& s) {
  static const std::regex num(R"(-?\d+(?:\.\d+)?)");
  std::vector<double> values;
  for (auto it = std::sregex_iterator(s.begin(), s.end(), num); it != std::sregex_iterator(); ++it)
    values.push_back(std::stod(it->str()));
  if (values.size() != 2) return std::nullopt;
  return LatLon{values[0], values[1]};
}

bool rubric_value(double v, std::initializer_list<double> allowed) {
  for (double a : allowed)
    if (v == a) return true;
  return false;
}

ColumnStats column_stats(const std::vector<double>& xs) {
  double sum = 0;
  for (double x : xs) sum += x;
  const double mean = sum / static_cast<double>(xs.size());
  double ss = 0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return {mean, std::sqrt(ss / static_cast<double>(xs.size()))};
}

json stats_json(const ColumnStats& s) { return {{"mean", s.mean}, {"std_dev", s.std_dev}}; }

}  // namespace

ParsedLatLon parse_latlon(std::string_view response) {
  const auto first = response.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = response.find_last_not_of(" \t\r\n");
  const std::string s(response.substr(first, last - first + 1));

  if (auto ll = match_exact(s)) return {ll, 100};
  if (auto ll = match_one_edit(s)) return {ll, 75};
  if (auto ll = match_two_numbers(s)) return {ll, 50};
  return {};
}

double geovis_score(double formatting, double accuracy) {
  if (!(formatting >= 0 && formatting <= 100))
    throw ValidationError("formatting must be within [0, 100], got " + std::to_string(formatting));
  if (!(accuracy >= 0 && accuracy <= 100))
    throw ValidationError("accuracy must be within [0, 100], got " + std::to_string(accuracy));
  if (formatting == 0) return 0;
  return 0.2 * formatting + 0.8 * accuracy;
}

GeoVisGrade make_geovis_grade(std::string query_id, double formatting, double accuracy) {
  if (!rubric_value(formatting, {0, 50, 75, 100}))
    throw ValidationError("query '" + query_id + "': formatting must be 0, 50, 75 or 100");
  if (!rubric_value(accuracy, {0, 20, 100}))
    throw ValidationError("query '" + query_id + "': accuracy must be 0, 20 or 100");
  return {std::move(query_id), formatting, accuracy, geovis_score(formatting, accuracy)};
}

VoiceGrade make_voice_grade(std::string query_id, bool correct) {
  return {std::move(query_id), correct, correct ? 100.0 : 0.0};
}

GradeSummary aggregate_grades(const std::vector<GeoVisGrade>& grades) {
  if (grades.empty()) throw ArityError("no grades to aggregate");
  std::vector<double> f, a, s;
  for (const auto& g : grades) {
    f.push_back(g.formatting);
    a.push_back(g.accuracy);
    s.push_back(g.score);
  }
  return {grades.size(), column_stats(f), column_stats(a), column_stats(s)};
}

GradeSummary aggregate_grades(const std::vector<VoiceGrade>& grades) {
  if (grades.empty()) throw ArityError("no grades to aggregate");
  std::vector<double> s;
  for (const auto& g : grades) s.push_back(g.score);
  return {grades.size(), std::nullopt, std::nullopt, column_stats(s)};
}

std::vector<ResponseRecord> parse_responses(std::string_view text, const std::string& source) {
  std::vector<ResponseRecord> out;
  std::set<std::string> seen;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(where + ": not a JSON object");
    if (!j.contains("query_id") || !j["query_id"].is_string())
      throw ValidationError(where + ": field 'query_id' missing or not a string");
    if (!j.contains("response_text") || !j["response_text"].is_string())
      throw ValidationError(where + ": field 'response_text' missing or not a string");
    ResponseRecord r;
    r.query_id = j["query_id"].get<std::string>();
    r.response_text = j["response_text"].get<std::string>();
    if (j.contains("accuracy") && !j["accuracy"].is_null()) {
      if (!j["accuracy"].is_number()) throw ValidationError(where + ": field 'accuracy' must be a number");
      r.accuracy = j["accuracy"].get<double>();
    }
    if (j.contains("correct") && !j["correct"].is_null()) {
      if (!j["correct"].is_boolean()) throw ValidationError(where + ": field 'correct' must be a boolean");
      r.correct = j["correct"].get<bool>();
    }
    if (!seen.insert(r.query_id).second)
      throw DuplicateKeyError(where + ": duplicate query_id '" + r.query_id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<ResponseRecord> load_responses(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open responses file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_responses(ss.str(), path);
}

json grade_responses(GradeTask task, const std::vector<ResponseRecord>& responses) {
  json rows = json::array();
  json summary;
  if (task == GradeTask::GeoVis) {
    std::vector<GeoVisGrade> grades;
    for (const auto& r : responses) {
      if (!r.accuracy) throw ValidationError("query '" + r.query_id + "': field 'accuracy' is required for geovis");
      const auto parsed = parse_latlon(r.response_text);
      auto g = make_geovis_grade(r.query_id, parsed.formatting, *r.accuracy);
      json row = {{"query_id", g.query_id}, {"formatting", g.formatting}, {"accuracy", g.accuracy}, {"score", g.score}};
      if (parsed.coords) row["coords"] = {parsed.coords->lat, parsed.coords->lon};
      rows.push_back(row);
      grades.push_back(std::move(g));
    }
    const auto s = aggregate_grades(grades);
    summary = {{"queries", s.queries},
               {"formatting", stats_json(*s.formatting)},
               {"accuracy", stats_json(*s.accuracy)},
               {"score", stats_json(s.score)}};
  } else {
    std::vector<VoiceGrade> grades;
    for (const auto& r : responses) {
      if (!r.correct) throw ValidationError("query '" + r.query_id + "': field 'correct' is required for voice");
      auto g = make_voice_grade(r.query_id, *r.correct);
      rows.push_back({{"query_id", g.query_id}, {"correct", g.correct}, {"score", g.score}});
      grades.push_back(std::move(g));
    }
    const auto s = aggregate_grades(grades);
    summary = {{"queries", s.queries}, {"score", stats_json(s.score)}};
  }
  return {{"schema", "xrbench.grades"},
          {"version", 1},
          {"task", task == GradeTask::GeoVis ? "geovis" : "voice"},
          {"grades", rows},
          {"summary", summary}};
}

}  // namespace xrbench
