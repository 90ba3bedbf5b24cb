#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "xrbench/metrics.hpp"
#include "xrbench/pareto.hpp"
#include "xrbench/store.hpp"

namespace xrbench {

// Consistency summary of one phase (the shortest PP or TG case of the pair).
struct PhaseConsistency {
  std::size_t runs = 0;
  std::size_t error_count = 0;
  std::optional<SpeedSummary<double>> summary;
  std::vector<double> sorted_means;  // ascending, for the sorted-runs plot
};

// Per-pair raw metrics derived from a results store.
//
// Metric names: pp_mean, tg_mean (mean consistent speed over the string-length
// sweep), cv_pp, cv_tg, cv_mean, error_count (PP+TG error records),
// memory_bytes (mean of per-run peaks over the batch sweep), battery_delta
// (mean percent per window), frt_cold, frt_warm. Missing data = missing key.
struct PairMetrics {
  PairId pair;
  std::map<std::string, double> values;
  std::map<std::string, PhaseConsistency> consistency;  // "pp", "tg"
  std::map<std::string, std::vector<std::pair<double, double>>> sweeps;  // pp_length, tg_length, batch, threads
};

std::vector<PairMetrics> analyze(const StoreSnapshot& store);

nlohmann::json metrics_to_json(const std::vector<PairMetrics>& pairs);
std::vector<PairMetrics> metrics_from_json(const nlohmann::json& j);

}  // namespace xrbench
