#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "xrbench/backend.hpp"
#include "xrbench/types.hpp"

namespace xrbench {

struct BatteryProbeConfig {
  enum class Type { None, Sysfs, Replay } type = Type::None;
  std::string supply = "BAT0";  // sysfs
  std::string path;             // replay file
};

struct DeviceSpec {
  std::string id;
  std::string name;
  std::string compute_tag;  // e.g. "CPU", "GPU"
  BackendConfig backend;
  BatteryProbeConfig battery;
};

struct ExperimentPlan {
  std::vector<ModelSpec> models;
  std::vector<DeviceSpec> devices;
  std::vector<TestCase> tests;
  int consistency_runs = 20;
  double intra_model_cooldown = 120;  // seconds between runs of one model
  double inter_model_cooldown = 600;  // seconds between models
  double battery_window = 600;
  int battery_runs = 3;
  std::optional<std::vector<std::string>> battery_models;  // default: smallest and largest per series
  int max_retries = 2;
  std::uint64_t seed = 0;
  bool custom_sweeps = false;  // lift the sweep-membership checks
  std::string probe_prompt = kDefaultProbePrompt;
  // Simulator settings for devices forced onto the mock by --mock. Mock
  // devices keep their own settings; the injections here apply to them too.
  MockConfig mock;
};

inline const std::vector<int> kStringLengthSweep = {64, 128, 256, 512, 1024};
inline const std::vector<int> kBatchSweep = {128, 256, 512, 1024};
inline const std::vector<int> kThreadSweep = {1, 2, 4, 8, 16, 32};

/// Human-readable violations; empty means the plan is valid.
std::vector<std::string> validate_plan(const ExperimentPlan& plan);

ExperimentPlan plan_from_json(const nlohmann::json& j);
nlohmann::json plan_to_json(const ExperimentPlan& plan);
ExperimentPlan load_plan(const std::string& path);

/// Models that get battery windows: the explicit list, or the smallest and
/// largest model (by parameter count, then file size) of every series.
std::vector<std::string> battery_model_ids(const ExperimentPlan& plan);

struct ScheduledAction {
  enum class Kind { Run, Cooldown, Battery } kind = Kind::Run;
  std::size_t device = 0;  // indices into the plan
  std::size_t model = 0;
  std::size_t test = 0;    // Run only
  std::size_t index = 0;   // run index, or battery window index
  double at = 0;           // seconds from the start of this device's timeline
  double duration = 0;     // Cooldown and Battery
};

/// Per-device sequential timeline: devices, then models, then cases, then runs,
/// in plan order. Runs take zero planned time; cooldowns and battery windows
/// advance the clock.
std::vector<ScheduledAction> schedule(const ExperimentPlan& plan);

}  // namespace xrbench
