#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <string>
#include <vector>

#include <json.hpp>

#include "xrbench/analysis.hpp"
#include "xrbench/pareto.hpp"
#include "xrbench/quality.hpp"

namespace xrbench {

struct ObjectiveSet {
  std::vector<ObjectiveConfig> objectives;
  // Pairs left out before normalization: "m1", "d4", or "m1@d4".
  std::vector<std::string> exclude;

  void validate() const;
};

/// quality: six metrics at 1/6 each; performance: pp_mean 0.35, tg_mean 0.35,
/// memory_bytes 0.2, battery_delta 0.1; stability: cv_mean 0.7, error_count 0.3.
ObjectiveSet default_objectives();

ObjectiveSet objectives_from_json(const nlohmann::json& j);
nlohmann::json objectives_to_json(const ObjectiveSet& set);

struct Exclusion {
  PairId pair;
  std::string reason;
};

struct ObjectiveBuild {
  std::vector<std::string> objective_names;
  std::vector<ObjectiveVector<double>> vectors;
  std::vector<Exclusion> excluded;
  std::vector<std::string> warnings;  // degenerate columns
};

/// Merges quality metrics into each pair by model id, drops pairs that are
/// excluded or lack a required metric, min-max normalizes each metric column
/// over the remaining pairs and scores every objective.
ObjectiveBuild build_objectives(const std::vector<PairMetrics>& pairs,
                                const std::vector<QualityRecord>& quality,
                                const ObjectiveSet& config);

nlohmann::json pareto_to_json(const ObjectiveBuild& build, const ParetoResult& result);

}  // namespace xrbench
