#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xrbench/plan.hpp"
#include "xrbench/store.hpp"

namespace xrbench {

struct RunOptions {
  bool force_mock = false;               // replace every device backend with the mock
  std::optional<std::uint64_t> seed;     // overrides plan.seed
  std::optional<std::size_t> stop_after; // stop after this many attempts (interrupt simulation)
  Waiter wait;                           // real-time waits; defaults to sleeping
  // Optional hook to supply backends, e.g. a test double per device.
  std::function<std::unique_ptr<Backend>(const DeviceSpec&, const MockConfig&)> make_backend;
};

// Slot = one (device, model, case, run index). Each slot ends completed, in
// error after all retries, or skipped because the store already finished it.
struct RunSummary {
  std::size_t scheduled = 0;  // total slots in the plan
  std::size_t completed = 0;
  std::size_t errors = 0;
  std::size_t skipped = 0;
  std::size_t discarded_attempts = 0;  // every error record written (unstable, crash, ...)
  std::size_t battery_windows = 0;
  bool interrupted = false;
};

/// Executes the plan into the store. Already finished slots are skipped, so a
/// second call over the same store is a no-op and an interrupted campaign
/// resumes where it stopped.
RunSummary run_plan(const ExperimentPlan& plan, ResultStore& store, const RunOptions& options = {});

enum class SweepDimension { PromptLength, GenerationLength, Batch, Threads };

/// (x, mean of consistent S_c) in ascending x for one pair.
std::vector<std::pair<double, double>> sweep_series(const std::vector<RunRecord>& runs,
                                                    const std::string& model_id,
                                                    const std::string& device_id,
                                                    SweepDimension dimension);

}  // namespace xrbench
