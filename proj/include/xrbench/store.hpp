#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

/**
 * @file store.hpp
 * @brief Append-only JSON-lines results store.
 *
 * Line 1 is a header {"schema":"xrbench.store","version":1}. Every following
 * line is one record, tagged by "type": "run" or "battery". Writes are
 * serialized and flushed per line, so an interrupted campaign leaves a valid
 * prefix that run_plan can resume from.
 */

#include <cstdint>
#include <fstream>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrbench/backend.hpp"
#include "xrbench/metrics.hpp"
#include "xrbench/samplers.hpp"
#include "xrbench/types.hpp"

namespace xrbench {

inline constexpr int kStoreVersion = 1;

enum class RecordStatus { Consistent, Unstable, Ok, Crash, Timeout, ParseFailure };

const char* to_string(RecordStatus s);
RecordStatus record_status_from_string(const std::string& s);

struct RunRecord {
  std::string model_id;
  std::string device_id;
  std::size_t case_index = 0;
  TestCase test_case;
  std::size_t run_index = 0;
  std::size_t attempt = 0;
  RecordStatus status = RecordStatus::Consistent;
  std::optional<GatedSpeed<double>> gated;  // Consistent and Unstable
  std::optional<std::uint64_t> memory_peak;
  std::optional<FirstResponseTiming> cold;  // first-response cases
  std::optional<FirstResponseTiming> warm;
  std::vector<std::string> raw_output;
  double started_at = 0;
  std::uint64_t plan_seed = 0;

  // Counts towards statistics (a consistent gated run or a successful probe).
  bool usable() const { return status == RecordStatus::Consistent || status == RecordStatus::Ok; }
  bool error() const { return !usable(); }
};

struct BatteryRecord {
  std::string model_id;
  std::string device_id;
  std::size_t window_index = 0;
  BatteryWindow window;
  double started_at = 0;
  std::uint64_t plan_seed = 0;
};

nlohmann::json to_json(const RunRecord& r);
nlohmann::json to_json(const BatteryRecord& r);
RunRecord run_record_from_json(const nlohmann::json& j);
BatteryRecord battery_record_from_json(const nlohmann::json& j);

struct StoreSnapshot {
  std::vector<RunRecord> runs;
  std::vector<BatteryRecord> battery;
};

/// Reads a whole store file. A missing or empty file is an empty snapshot.
StoreSnapshot read_store(const std::string& path);

class ResultStore {
 public:
  // Opens (creating if needed) the file at `path` and loads existing records.
  explicit ResultStore(std::string path);

  void append(const RunRecord& r);
  void append(const BatteryRecord& r);

  const StoreSnapshot& snapshot() const { return data_; }
  const std::string& path() const { return path_; }

 private:
  void write_line(const nlohmann::json& j);

  std::string path_;
  StoreSnapshot data_;
  std::ofstream out_;
  std::mutex mutex_;
};

}  // namespace xrbench
