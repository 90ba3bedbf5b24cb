#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

/**
 * @file samplers.hpp
 * @brief Resident-memory and battery probes.
 *
 * Memory: the per-run statistic is the peak RSS seen while polling the
 * inference process; the per-pair statistic is the mean of per-run peaks.
 * Battery: level read at the start and at the end of a fixed window; the
 * window is flagged invalid when the level went up (device was charging).
 */

#include <sys/types.h>

#include <chrono>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace xrbench {

struct MemorySample {
  std::uint64_t rss_bytes = 0;
  std::chrono::steady_clock::time_point at;
};

// Something whose resident set size can be polled. read() returns nullopt once
// the process is gone.
class RssSource {
 public:
  virtual ~RssSource() = default;
  virtual std::optional<std::uint64_t> read() = 0;
};

// Reads VmRSS from /proc/<pid>/status.
class ProcRssSource : public RssSource {
 public:
  explicit ProcRssSource(pid_t pid) : pid_(pid) {}
  std::optional<std::uint64_t> read() override;

 private:
  pid_t pid_;
};

/// Polls every `cadence` seconds for at most `window` seconds, stopping early
/// when the process exits. Throws NoSampleError if not even one reading succeeds.
std::vector<MemorySample> sample_memory_trace(RssSource& source, double cadence, double window);

std::uint64_t peak_rss(std::span<const MemorySample> trace);

/// Peak RSS over the window.
std::uint64_t sample_memory(RssSource& source, double cadence = 0.1, double window = 600.0);

/// Mean of per-run peaks; the pair-level memory statistic.
double mean_of_peaks(std::span<const double> peaks);

struct BatteryWindow {
  double start_level = 0;  // percent
  double end_level = 0;
  double duration = 600;   // seconds
  double delta = 0;        // start - end
  bool valid = true;       // false when the level increased
};

// Battery level source. `at` is seconds since the start of the session; real
// probes ignore it and read the current level.
class BatteryProbe {
 public:
  virtual ~BatteryProbe() = default;
  virtual double level(double at) = 0;
};

// Replays a "timestamp level" text file (one pair per line, '#' comments).
// The level at time t is the last entry with timestamp <= t.
class ReplayBatteryProbe : public BatteryProbe {
 public:
  explicit ReplayBatteryProbe(const std::string& path);
  double level(double at) override;

 private:
  std::vector<std::pair<double, double>> points_;
};

// Linear drain from `initial` at `rate` percent per 600 s; never below 0.
class DrainBatteryProbe : public BatteryProbe {
 public:
  DrainBatteryProbe(double initial, double percent_per_600s)
      : initial_(initial), rate_(percent_per_600s) {}
  double level(double at) override;

 private:
  double initial_;
  double rate_;
};

// Reads /sys/class/power_supply/<name>/capacity.
class SysfsBatteryProbe : public BatteryProbe {
 public:
  explicit SysfsBatteryProbe(std::string supply = "BAT0") : supply_(std::move(supply)) {}
  double level(double at) override;

 private:
  std::string supply_;
};

// Waits `seconds`; real campaigns sleep, simulated ones just advance a clock.
using Waiter = std::function<void(double seconds)>;

Waiter sleeping_waiter();

/// Reads the level, waits `duration`, reads again.
BatteryWindow battery_delta(BatteryProbe& probe, double duration, const Waiter& wait,
                            double start_at = 0.0);

}  // namespace xrbench
