// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/report.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "xrbench/analysis.hpp"
#include "xrbench/errors.hpp"

namespace xrbench {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct PairRow {
  PairId pair;
  std::map<std::string, double> metrics;
  std::map<std::string, double> scores;
  std::optional<bool> on_front;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string safe_name(const std::string& s) {
  std::string out = s;
  for (char& c : out)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.' || c == '@')) c = '_';
  return out;
}

void write_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
}

std::string require_schema(const json& doc) {
  if (!doc.is_object() || !doc.contains("schema") || !doc["schema"].is_string())
    throw ValidationError("report input: field 'schema' missing or not a string");
  return doc["schema"].get<std::string>();
}

struct Collected {
  std::vector<PairRow> rows;
  std::vector<PairMetrics> metrics;
  std::vector<std::string> objectives;
  std::vector<json> grades;
};

PairRow& row_for(Collected& c, const PairId& p) {
  for (auto& r : c.rows)
    if (r.pair == p) return r;
  c.rows.push_back({p, {}, {}, std::nullopt});
  return c.rows.back();
}

void collect_pareto(Collected& c, const json& doc) {
  try {
    if (c.objectives.empty()) c.objectives = doc.at("objectives").get<std::vector<std::string>>();
    for (const auto& pj : doc.at("pairs")) {
      PairId p{pj.at("model_id").get<std::string>(), pj.at("device_id").get<std::string>()};
      auto& row = row_for(c, p);
      for (const auto& [name, v] : pj.at("scores").items()) row.scores[name] = v.get<double>();
      row.on_front = pj.at("on_front").get<bool>();
    }
  } catch (const json::exception& e) {
    throw ValidationError(std::string("pareto input: ") + e.what());
  }
}

void collect_grades(Collected& c, const json& doc) {
  for (const char* field : {"task", "grades", "summary"})
    if (!doc.contains(field)) throw ValidationError(std::string("grades input: field '") + field + "' missing");
  c.grades.push_back(doc);
}

Collected collect(const std::vector<json>& inputs) {
  Collected c;
  std::set<PairId> seen_metrics;
  // Metrics first so the row order follows the metrics file.
  for (const auto& doc : inputs) {
    if (require_schema(doc) != "xrbench.metrics") continue;
    for (auto& pm : metrics_from_json(doc)) {
      if (!seen_metrics.insert(pm.pair).second)
        throw DuplicateKeyError("metrics input: pair '" + pm.pair.str() + "' appears twice");
      row_for(c, pm.pair).metrics = pm.values;
      c.metrics.push_back(std::move(pm));
    }
  }
  for (const auto& doc : inputs) {
    const auto schema = require_schema(doc);
    if (schema == "xrbench.metrics") continue;
    if (schema == "xrbench.pareto")
      collect_pareto(c, doc);
    else if (schema == "xrbench.grades")
      collect_grades(c, doc);
    else
      throw ValidationError("report input: field 'schema' has unknown value \"" + schema + "\"");
  }
  return c;
}

// Cell text per summary column, empty when the value is not known.
std::vector<std::string> csv_cells(const PairRow& r) {
  auto metric = [&](const char* name, double scale, int digits) -> std::string {
    auto it = r.metrics.find(name);
    return it == r.metrics.end() ? "" : fixed(it->second * scale, digits);
  };
  auto score = [&](const char* name) -> std::string {
    auto it = r.scores.find(name);
    return it == r.scores.end() ? "" : fixed(it->second, 4);
  };
  std::string errors;
  if (auto it = r.metrics.find("error_count"); it != r.metrics.end()) errors = fixed(it->second, 0);
  return {r.pair.model_id,
          r.pair.device_id,
          metric("pp_mean", 1, 2),
          metric("tg_mean", 1, 2),
          metric("cv_pp", 100, 2),
          metric("cv_tg", 100, 2),
          errors,
          metric("memory_bytes", 1e-9, 2),
          metric("battery_delta", 1, 2),
          score("quality"),
          score("performance"),
          score("stability"),
          r.on_front ? (*r.on_front ? "true" : "false") : ""};
}

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string join_line(const std::vector<std::string>& cells) {
  std::string line;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) line += ',';
    line += csv_quote(cells[i]);
  }
  return line + "\n";
}

void emit_plots(const Collected& c, const fs::path& dir) {
  fs::create_directories(dir);
  for (const auto& pm : c.metrics) {
    const auto base = safe_name(pm.pair.str());
    for (const auto& [phase, pc] : pm.consistency) {
      std::string text = "rank,speed\n";
      for (std::size_t i = 0; i < pc.sorted_means.size(); ++i)
        text += std::to_string(i + 1) + "," + fixed(pc.sorted_means[i], 2) + "\n";
      write_file(dir / ("consistency_" + base + "_" + phase + ".csv"), text);
    }
    for (const auto& [dim, series] : pm.sweeps) {
      std::string text = "x,speed\n";
      for (const auto& [x, y] : series) text += fixed(x, 0) + "," + fixed(y, 2) + "\n";
      write_file(dir / ("sweep_" + base + "_" + dim + ".csv"), text);
    }
  }

  std::string frt = "model_id,device_id,cold_s,warm_s\n";
  for (const auto& pm : c.metrics) {
    auto cold = pm.values.find("frt_cold");
    auto warm = pm.values.find("frt_warm");
    if (cold == pm.values.end() && warm == pm.values.end()) continue;
    frt += join_line({pm.pair.model_id, pm.pair.device_id,
                      cold == pm.values.end() ? "" : fixed(cold->second, 3),
                      warm == pm.values.end() ? "" : fixed(warm->second, 3)});
  }
  write_file(dir / "first_response.csv", frt);

  if (!c.objectives.empty()) {
    std::vector<std::string> header = {"model_id", "device_id"};
    header.insert(header.end(), c.objectives.begin(), c.objectives.end());
    header.push_back("on_front");
    std::string text = join_line(header);
    for (const auto& r : c.rows) {
      if (!r.on_front) continue;
      std::vector<std::string> cells = {r.pair.model_id, r.pair.device_id};
      for (const auto& o : c.objectives) {
        auto it = r.scores.find(o);
        cells.push_back(it == r.scores.end() ? "" : fixed(it->second, 4));
      }
      cells.push_back(*r.on_front ? "true" : "false");
      text += join_line(cells);
    }
    write_file(dir / "pareto_points.csv", text);
  }

  for (const auto& g : c.grades) {
    const auto task = g["task"].get<std::string>();
    std::string text = task == "geovis" ? "query_id,formatting,accuracy,score\n" : "query_id,correct,score\n";
    for (const auto& row : g["grades"]) {
      if (task == "geovis")
        text += join_line({row["query_id"].get<std::string>(), fixed(row["formatting"].get<double>(), 2),
                           fixed(row["accuracy"].get<double>(), 2), fixed(row["score"].get<double>(), 2)});
      else
        text += join_line({row["query_id"].get<std::string>(), row["correct"].get<bool>() ? "true" : "false",
                           fixed(row["score"].get<double>(), 2)});
    }
    write_file(dir / ("grades_" + safe_name(task) + ".csv"), text);
  }
}

}  // namespace

std::string emit_report(const std::vector<json>& inputs, const ReportOptions& options) {
  const auto c = collect(inputs);
  if (options.plots_dir) emit_plots(c, *options.plots_dir);

  if (options.format == ReportFormat::Csv) {
    std::string out = join_line(summary_columns());
    for (const auto& r : c.rows) out += join_line(csv_cells(r));
    return out;
  }

  json pairs = json::array();
  for (const auto& r : c.rows) {
    const auto cells = csv_cells(r);
    json row = json::object();
    for (std::size_t i = 0; i < cells.size(); ++i) {
      const auto& col = summary_columns()[i];
      if (cells[i].empty())
        row[col] = nullptr;
      else if (col == "model_id" || col == "device_id")
        row[col] = cells[i];
      else if (col == "on_front")
        row[col] = cells[i] == "true";
      else
        row[col] = std::stod(cells[i]);
    }
    pairs.push_back(row);
  }
  json grades = json::array();
  for (const auto& g : c.grades) grades.push_back({{"task", g["task"]}, {"summary", g["summary"]}});
  json doc = {{"schema", "xrbench.report"}, {"version", 1}, {"columns", summary_columns()}, {"pairs", pairs},
              {"grades", grades}};
  return doc.dump(2) + "\n";
}

std::string emit_report_files(const std::vector<std::string>& paths, const ReportOptions& options) {
  std::vector<json> docs;
  for (const auto& p : paths) {
    std::ifstream in(p);
    if (!in) throw ValidationError("cannot open report input " + p);
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw ValidationError("report input " + p + ": not valid JSON");
    docs.push_back(std::move(j));
  }
  return emit_report(docs, options);
}

}  // namespace xrbench
