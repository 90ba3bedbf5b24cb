// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/quality.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "xrbench/errors.hpp"

namespace xrbench {

namespace {

double number_field(const nlohmann::json& j, const char* field, const std::string& where) {
  if (!j.contains(field)) throw ValidationError(where + ": missing field '" + field + "'");
  if (!j[field].is_number()) throw ValidationError(where + ": field '" + field + "' is not a number");
  return j[field].get<double>();
}

void check_accuracy(double v, const char* field, const std::string& where) {
  if (!std::isfinite(v) || v < 0 || v > 100)
    throw ValidationError(where + ": field '" + field + "' = " + std::to_string(v) +
                          " outside [0, 100]");
}

void validate_at(const QualityRecord& r, const std::string& where) {
  if (r.model_id.empty()) throw ValidationError(where + ": field 'model_id' is empty");
  check_accuracy(r.hellaswag, "hellaswag", where);
  check_accuracy(r.mmlu, "mmlu", where);
  check_accuracy(r.arc, "arc", where);
  check_accuracy(r.truthfulqa, "truthfulqa", where);
  check_accuracy(r.winogrande, "winogrande", where);
  if (!std::isfinite(r.wikitext2_perplexity) || !(r.wikitext2_perplexity > 0))
    throw ValidationError(where + ": field 'wikitext2_perplexity' must be positive");
}

}  // namespace

void validate(const QualityRecord& rec) { validate_at(rec, rec.model_id); }

std::vector<QualityRecord> parse_quality_table(const std::string& text, const std::string& source) {
  std::vector<QualityRecord> out;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = source + ":" + std::to_string(lineno);
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw ValidationError(where + ": not a JSON object");
    if (!j.contains("model_id") || !j["model_id"].is_string())
      throw ValidationError(where + ": field 'model_id' missing or not a string");

    QualityRecord r;
    r.model_id = j["model_id"].get<std::string>();
    r.hellaswag = number_field(j, "hellaswag", where);
    r.mmlu = number_field(j, "mmlu", where);
    r.arc = number_field(j, "arc", where);
    r.truthfulqa = number_field(j, "truthfulqa", where);
    r.winogrande = number_field(j, "winogrande", where);
    r.wikitext2_perplexity = number_field(j, "wikitext2_perplexity", where);
    validate_at(r, where);
    if (!seen.insert(r.model_id).second)
      throw DuplicateKeyError(where + ": duplicate model_id '" + r.model_id + "'");
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<QualityRecord> load_quality_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open quality table " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_quality_table(ss.str(), path);
}

}  // namespace xrbench
