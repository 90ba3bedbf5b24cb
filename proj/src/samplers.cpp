// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <thread>

#include "xrbench/errors.hpp"

namespace xrbench {

std::optional<std::uint64_t> ProcRssSource::read() {
  std::ifstream in("/proc/" + std::to_string(pid_) + "/status");
  if (!in) return std::nullopt;
  std::string line;
  while (std::getline(in, line)) {
    if (line.rfind("VmRSS:", 0) == 0) {
      std::istringstream fields(line.substr(6));
      std::uint64_t kb = 0;
      fields >> kb;
      return kb * 1024;
    }
  }
  // Zombies have a status file without VmRSS.
  return std::nullopt;
}

std::vector<MemorySample> sample_memory_trace(RssSource& source, double cadence, double window) {
  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  const auto limit = start + std::chrono::duration_cast<clock::duration>(
                                 std::chrono::duration<double>(std::max(window, 0.0)));
  std::vector<MemorySample> trace;
  while (true) {
    auto rss = source.read();
    if (!rss) break;
    trace.push_back({*rss, clock::now()});
    if (clock::now() >= limit) break;
    if (cadence > 0) std::this_thread::sleep_for(std::chrono::duration<double>(cadence));
  }
  if (trace.empty()) throw NoSampleError("process exited before the first memory sample");
  return trace;
}

std::uint64_t peak_rss(std::span<const MemorySample> trace) {
  std::uint64_t peak = 0;
  for (const auto& s : trace) peak = std::max(peak, s.rss_bytes);
  return peak;
}

std::uint64_t sample_memory(RssSource& source, double cadence, double window) {
  auto trace = sample_memory_trace(source, cadence, window);
  return peak_rss(trace);
}

double mean_of_peaks(std::span<const double> peaks) {
  if (peaks.empty()) throw ArityError("no memory peaks to average");
  return std::accumulate(peaks.begin(), peaks.end(), 0.0) / static_cast<double>(peaks.size());
}

ReplayBatteryProbe::ReplayBatteryProbe(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ProbeError("cannot open battery replay file " + path);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    double ts, level;
    if (!(fields >> ts)) continue;
    if (!(fields >> level) || level < 0 || level > 100)
      throw ProbeError(path + ":" + std::to_string(lineno) + ": expected 'timestamp level'");
    points_.emplace_back(ts, level);
  }
  if (points_.empty()) throw ProbeError("battery replay file " + path + " has no samples");
  std::stable_sort(points_.begin(), points_.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
}

double ReplayBatteryProbe::level(double at) {
  if (at < points_.front().first) throw ProbeError("no battery sample before t=" + std::to_string(at));
  auto it = std::upper_bound(points_.begin(), points_.end(), at,
                             [](double t, const auto& p) { return t < p.first; });
  return std::prev(it)->second;
}

double DrainBatteryProbe::level(double at) {
  return std::max(0.0, initial_ - rate_ * at / 600.0);
}

double SysfsBatteryProbe::level(double) {
  std::ifstream in("/sys/class/power_supply/" + supply_ + "/capacity");
  double v;
  if (!in || !(in >> v)) throw ProbeError("cannot read battery capacity of " + supply_);
  return v;
}

Waiter sleeping_waiter() {
  return [](double seconds) {
    if (seconds > 0) std::this_thread::sleep_for(std::chrono::duration<double>(seconds));
  };
}

BatteryWindow battery_delta(BatteryProbe& probe, double duration, const Waiter& wait,
                            double start_at) {
  if (!(duration > 0)) throw ValidationError("battery window duration must be positive");
  BatteryWindow w;
  w.duration = duration;
  w.start_level = probe.level(start_at);
  wait(duration);
  w.end_level = probe.level(start_at + duration);
  for (double v : {w.start_level, w.end_level})
    if (!std::isfinite(v) || v < 0 || v > 100) throw ProbeError("battery level outside [0, 100]");
  w.delta = w.start_level - w.end_level;
  w.valid = w.delta >= 0;
  return w;
}

}  // namespace xrbench
