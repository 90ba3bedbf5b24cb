// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/bench_output.hpp"

#include <cmath>
#include <cstdio>
#include <optional>
#include <sstream>

#include <json.hpp>

#include "xrbench/errors.hpp"

namespace xrbench {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_lines(std::string_view raw) {
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start <= raw.size()) {
    auto end = raw.find('\n', start);
    if (end == std::string_view::npos) end = raw.size();
    lines.push_back(raw.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

std::vector<std::string_view> split_cells(std::string_view line) {
  line = trim(line);
  if (!line.empty() && line.front() == '|') line.remove_prefix(1);
  if (!line.empty() && line.back() == '|') line.remove_suffix(1);
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    auto end = line.find('|', start);
    if (end == std::string_view::npos) {
      cells.push_back(trim(line.substr(start)));
      break;
    }
    cells.push_back(trim(line.substr(start, end - start)));
    start = end + 1;
  }
  return cells;
}

bool is_separator_row(const std::vector<std::string_view>& cells) {
  for (auto c : cells) {
    if (c.empty()) return false;
    for (char ch : c)
      if (ch != '-' && ch != ':') return false;
  }
  return true;
}

std::optional<double> leading_number(std::string_view s) {
  std::string buf(trim(s));
  if (buf.empty()) return std::nullopt;
  char* end = nullptr;
  double v = std::strtod(buf.c_str(), &end);
  if (end == buf.c_str()) return std::nullopt;
  // The rest must be empty or the "± stdev" suffix.
  std::string_view rest = trim(std::string_view(end));
  if (!rest.empty() && rest.find("\xC2\xB1") == std::string_view::npos && rest.find("+/-") == std::string_view::npos)
    return std::nullopt;
  return v;
}

std::optional<int> positive_int(std::string_view s) {
  if (s.empty()) return std::nullopt;
  int v = 0;
  for (char c : s) {
    if (c < '0' || c > '9') return std::nullopt;
    v = v * 10 + (c - '0');
    if (v > 1'000'000'000) return std::nullopt;
  }
  return v > 0 ? std::optional<int>(v) : std::nullopt;
}

TimingSample<double> make_sample(Phase phase, int length, double speed, std::string_view line) {
  if (!(speed > 0) || !std::isfinite(speed))
    throw ParseFailure("non-positive or non-finite speed", std::string(line));
  return TimingSample<double>{length, static_cast<double>(length) / speed, phase};
}

std::vector<TimingSample<double>> parse_markdown(const std::vector<std::string_view>& lines,
                                                 std::size_t header_at) {
  auto header = split_cells(lines[header_at]);
  std::optional<std::size_t> test_col, ts_col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "test") test_col = i;
    if (header[i] == "t/s") ts_col = i;
  }
  if (!test_col || !ts_col)
    throw ParseFailure("markdown header lacks test or t/s column", std::string(lines[header_at]));

  std::vector<TimingSample<double>> out;
  for (std::size_t i = header_at + 1; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty() || line.front() != '|') {
      if (!out.empty() || line.empty()) continue;
      throw ParseFailure("unexpected line inside bench table", std::string(lines[i]));
    }
    auto cells = split_cells(line);
    if (is_separator_row(cells)) continue;
    if (cells.size() != header.size())
      throw ParseFailure("row has " + std::to_string(cells.size()) + " cells, header has " +
                             std::to_string(header.size()),
                         std::string(lines[i]));
    auto test = cells[*test_col];
    Phase phase;
    if (test.starts_with("pp"))
      phase = Phase::PromptProcessing;
    else if (test.starts_with("tg"))
      phase = Phase::TokenGeneration;
    else
      throw ParseFailure("unsupported test label", std::string(lines[i]));
    auto length = positive_int(test.substr(2));
    if (!length) throw ParseFailure("malformed token count in test label", std::string(lines[i]));
    auto speed = leading_number(cells[*ts_col]);
    if (!speed) throw ParseFailure("malformed t/s field", std::string(lines[i]));
    out.push_back(make_sample(phase, *length, *speed, lines[i]));
  }
  if (out.empty()) throw ParseFailure("bench table has no rows", std::string(lines[header_at]));
  return out;
}

std::vector<TimingSample<double>> parse_jsonl(const std::vector<std::string_view>& lines) {
  std::vector<TimingSample<double>> out;
  for (auto raw_line : lines) {
    auto line = trim(raw_line);
    if (line.empty()) continue;
    if (line.front() != '{') {
      if (out.empty()) continue;  // log noise before the first record
      throw ParseFailure("unexpected line in jsonl bench output", std::string(raw_line));
    }
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object() || !j.contains("avg_ts") || !j["avg_ts"].is_number() ||
        !j.contains("n_prompt") || !j.contains("n_gen") || !j["n_prompt"].is_number_integer() ||
        !j["n_gen"].is_number_integer())
      throw ParseFailure("malformed jsonl bench record", std::string(raw_line));
    const int n_prompt = j["n_prompt"].get<int>();
    const int n_gen = j["n_gen"].get<int>();
    Phase phase;
    int length;
    if (n_prompt > 0 && n_gen == 0) {
      phase = Phase::PromptProcessing;
      length = n_prompt;
    } else if (n_gen > 0 && n_prompt == 0) {
      phase = Phase::TokenGeneration;
      length = n_gen;
    } else {
      throw ParseFailure("unsupported combined pp+tg record", std::string(raw_line));
    }
    out.push_back(make_sample(phase, length, j["avg_ts"].get<double>(), raw_line));
  }
  return out;
}

}  // namespace

std::vector<TimingSample<double>> parse_bench_output(std::string_view raw) {
  auto lines = split_lines(raw);
  std::optional<std::string_view> first_nonblank;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    auto line = trim(lines[i]);
    if (line.empty()) continue;
    if (!first_nonblank) first_nonblank = lines[i];
    if (line.front() == '|') return parse_markdown(lines, i);
    if (line.front() == '{') {
      auto out = parse_jsonl(lines);
      if (!out.empty()) return out;
      break;
    }
  }
  if (!first_nonblank) throw ParseFailure("empty bench output", "");
  throw ParseFailure("unrecognized bench output format", std::string(*first_nonblank));
}

std::string render_bench_output(std::span<const TimingSample<double>> samples,
                                std::string_view model_label) {
  std::ostringstream os;
  os << "| model | test | t/s |\n";
  os << "| ----- | ---: | --: |\n";
  for (const auto& s : samples) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f \xC2\xB1 0.00", instantaneous_speed(s));
    os << "| " << model_label << " | " << to_string(s.kind) << s.string_length << " | " << buf
       << " |\n";
  }
  return os.str();
}

}  // namespace xrbench
