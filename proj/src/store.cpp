// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/store.hpp"

#include <filesystem>

#include "xrbench/errors.hpp"

namespace xrbench {

using nlohmann::json;

const char* to_string(RecordStatus s) {
  switch (s) {
    case RecordStatus::Consistent: return "consistent";
    case RecordStatus::Unstable: return "unstable";
    case RecordStatus::Ok: return "ok";
    case RecordStatus::Crash: return "crash";
    case RecordStatus::Timeout: return "timeout";
    case RecordStatus::ParseFailure: return "parse_failure";
  }
  return "?";
}

RecordStatus record_status_from_string(const std::string& s) {
  for (auto st : {RecordStatus::Consistent, RecordStatus::Unstable, RecordStatus::Ok,
                  RecordStatus::Crash, RecordStatus::Timeout, RecordStatus::ParseFailure})
    if (s == to_string(st)) return st;
  throw StoreError("unknown record status '" + s + "'");
}

namespace {

json timing_json(const FirstResponseTiming& t) {
  return {{"load_time", t.load_time}, {"first_token_latency", t.first_token_latency}};
}

FirstResponseTiming timing_from(const json& j, FirstResponseMode mode) {
  return {j.at("load_time").get<double>(), j.at("first_token_latency").get<double>(), mode};
}

}  // namespace

json to_json(const RunRecord& r) {
  const auto& c = r.test_case;
  json j = {{"type", "run"},
            {"model_id", r.model_id},
            {"device_id", r.device_id},
            {"case_index", r.case_index},
            {"case",
             {{"kind", to_string(c.kind)},
              {"pp_tokens", c.pp_tokens},
              {"tg_tokens", c.tg_tokens},
              {"batch_size", c.batch_size},
              {"threads", c.threads},
              {"repetitions", c.repetitions}}},
            {"run_index", r.run_index},
            {"attempt", r.attempt},
            {"status", to_string(r.status)},
            {"raw_output", r.raw_output},
            {"started_at", r.started_at},
            {"plan_seed", r.plan_seed}};
  if (r.gated) {
    std::vector<double> samples(r.gated->samples.data(), r.gated->samples.data() + r.gated->samples.size());
    j["samples"] = samples;
    j["mean"] = r.gated->mean;
    j["std_dev"] = r.gated->std_dev;
    j["cv"] = r.gated->cv;
  }
  if (r.memory_peak) j["memory_peak"] = *r.memory_peak;
  if (r.cold) j["cold"] = timing_json(*r.cold);
  if (r.warm) j["warm"] = timing_json(*r.warm);
  return j;
}

json to_json(const BatteryRecord& r) {
  return {{"type", "battery"},
          {"model_id", r.model_id},
          {"device_id", r.device_id},
          {"window_index", r.window_index},
          {"start_level", r.window.start_level},
          {"end_level", r.window.end_level},
          {"duration", r.window.duration},
          {"delta", r.window.delta},
          {"valid", r.window.valid},
          {"started_at", r.started_at},
          {"plan_seed", r.plan_seed}};
}

RunRecord run_record_from_json(const json& j) {
  RunRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.device_id = j.at("device_id").get<std::string>();
  r.case_index = j.at("case_index").get<std::size_t>();
  const auto& c = j.at("case");
  r.test_case = TestCase{test_kind_from_string(c.at("kind").get<std::string>()),
                         c.at("pp_tokens").get<int>(),
                         c.at("tg_tokens").get<int>(),
                         c.at("batch_size").get<int>(),
                         c.at("threads").get<int>(),
                         c.at("repetitions").get<int>()};
  r.run_index = j.at("run_index").get<std::size_t>();
  r.attempt = j.at("attempt").get<std::size_t>();
  r.status = record_status_from_string(j.at("status").get<std::string>());
  r.raw_output = j.value("raw_output", std::vector<std::string>{});
  r.started_at = j.value("started_at", 0.0);
  r.plan_seed = j.value("plan_seed", std::uint64_t{0});
  if (j.contains("samples")) {
    const auto samples = j["samples"].get<std::vector<double>>();
    if (samples.size() != kGateSamples) throw StoreError("run record with a wrong sample count");
    GatedSpeed<double> g;
    for (std::size_t i = 0; i < kGateSamples; ++i) g.samples(static_cast<Eigen::Index>(i)) = samples[i];
    g.mean = j.at("mean").get<double>();
    g.std_dev = j.at("std_dev").get<double>();
    g.cv = j.at("cv").get<double>();
    g.status = r.status == RecordStatus::Unstable ? RunStatus::Unstable : RunStatus::Consistent;
    r.gated = g;
  }
  if (j.contains("memory_peak")) r.memory_peak = j["memory_peak"].get<std::uint64_t>();
  if (j.contains("cold")) r.cold = timing_from(j["cold"], FirstResponseMode::Cold);
  if (j.contains("warm")) r.warm = timing_from(j["warm"], FirstResponseMode::Warm);
  return r;
}

BatteryRecord battery_record_from_json(const json& j) {
  BatteryRecord r;
  r.model_id = j.at("model_id").get<std::string>();
  r.device_id = j.at("device_id").get<std::string>();
  r.window_index = j.at("window_index").get<std::size_t>();
  r.window.start_level = j.at("start_level").get<double>();
  r.window.end_level = j.at("end_level").get<double>();
  r.window.duration = j.at("duration").get<double>();
  r.window.delta = j.at("delta").get<double>();
  r.window.valid = j.at("valid").get<bool>();
  r.started_at = j.value("started_at", 0.0);
  r.plan_seed = j.value("plan_seed", std::uint64_t{0});
  return r;
}

StoreSnapshot read_store(const std::string& path) {
  StoreSnapshot snap;
  std::ifstream in(path);
  if (!in) return snap;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = json::parse(line, nullptr, false);
    const std::string where = path + ":" + std::to_string(lineno);
    if (j.is_discarded() || !j.is_object()) throw StoreError(where + ": not a JSON object");
    if (lineno == 1) {
      if (j.value("schema", "") != "xrbench.store") throw StoreError(where + ": missing store header");
      if (j.value("version", 0) != kStoreVersion)
        throw StoreError(where + ": unsupported store version");
      continue;
    }
    try {
      const auto type = j.at("type").get<std::string>();
      if (type == "run")
        snap.runs.push_back(run_record_from_json(j));
      else if (type == "battery")
        snap.battery.push_back(battery_record_from_json(j));
      else
        throw StoreError(where + ": unknown record type '" + type + "'");
    } catch (const json::exception& e) {
      throw StoreError(where + ": " + e.what());
    }
  }
  return snap;
}

ResultStore::ResultStore(std::string path) : path_(std::move(path)) {
  data_ = read_store(path_);
  const bool fresh = !std::filesystem::exists(path_) || std::filesystem::file_size(path_) == 0;
  out_.open(path_, std::ios::app | std::ios::binary);
  if (!out_) throw StoreError("cannot open store " + path_ + " for writing");
  if (fresh) write_line({{"schema", "xrbench.store"}, {"version", kStoreVersion}});
}

void ResultStore::write_line(const json& j) {
  out_ << j.dump() << '\n';
  out_.flush();
  if (!out_) throw StoreError("write to " + path_ + " failed");
}

void ResultStore::append(const RunRecord& r) {
  std::lock_guard lock(mutex_);
  write_line(to_json(r));
  data_.runs.push_back(r);
}

void ResultStore::append(const BatteryRecord& r) {
  std::lock_guard lock(mutex_);
  write_line(to_json(r));
  data_.battery.push_back(r);
}

}  // namespace xrbench
