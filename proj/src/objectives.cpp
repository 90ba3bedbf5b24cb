// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "xrbench/errors.hpp"

namespace xrbench {

using nlohmann::json;

void ObjectiveSet::validate() const {
  if (objectives.empty()) throw ValidationError("objective set is empty");
  std::set<std::string> names;
  for (const auto& o : objectives) {
    o.validate();
    if (!names.insert(o.name).second) throw ValidationError("duplicate objective '" + o.name + "'");
  }
}

ObjectiveSet default_objectives() {
  ObjectiveSet set;
  ObjectiveConfig quality{"quality", {}};
  for (const auto& name : kQualityMetricNames)
    quality.metrics.push_back({name, Orientation::HigherBetter, 1.0 / 6.0});
  set.objectives.push_back(std::move(quality));
  set.objectives.push_back({"performance",
                            {{"pp_mean", Orientation::HigherBetter, 0.35},
                             {"tg_mean", Orientation::HigherBetter, 0.35},
                             {"memory_bytes", Orientation::LowerBetter, 0.2},
                             {"battery_delta", Orientation::LowerBetter, 0.1}}});
  set.objectives.push_back({"stability",
                            {{"cv_mean", Orientation::LowerBetter, 0.7},
                             {"error_count", Orientation::LowerBetter, 0.3}}});
  return set;
}

ObjectiveSet objectives_from_json(const json& j) {
  ObjectiveSet set;
  try {
    for (const auto& oj : j.at("objectives")) {
      ObjectiveConfig cfg;
      cfg.name = oj.at("name").get<std::string>();
      for (const auto& mj : oj.at("metrics")) {
        WeightedMetric m;
        m.metric = mj.at("metric").get<std::string>();
        const auto o = mj.value("orientation", std::string("higher"));
        if (o == "higher")
          m.orientation = Orientation::HigherBetter;
        else if (o == "lower")
          m.orientation = Orientation::LowerBetter;
        else
          throw ValidationError("metric '" + m.metric + "': orientation must be 'higher' or 'lower'");
        m.weight = mj.at("weight").get<double>();
        cfg.metrics.push_back(std::move(m));
      }
      set.objectives.push_back(std::move(cfg));
    }
    set.exclude = j.value("exclude", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ValidationError(std::string("objective config: ") + e.what());
  }
  set.validate();
  return set;
}

json objectives_to_json(const ObjectiveSet& set) {
  json objs = json::array();
  for (const auto& o : set.objectives) {
    json metrics = json::array();
    for (const auto& m : o.metrics)
      metrics.push_back({{"metric", m.metric}, {"orientation", to_string(m.orientation)}, {"weight", m.weight}});
    objs.push_back({{"name", o.name}, {"metrics", metrics}});
  }
  return {{"objectives", objs}, {"exclude", set.exclude}};
}

ObjectiveBuild build_objectives(const std::vector<PairMetrics>& pairs,
                                const std::vector<QualityRecord>& quality,
                                const ObjectiveSet& config) {
  config.validate();
  ObjectiveBuild build;
  for (const auto& o : config.objectives) build.objective_names.push_back(o.name);

  std::map<std::string, const QualityRecord*> quality_by_model;
  for (const auto& q : quality) quality_by_model[q.model_id] = &q;

  auto excluded_by_config = [&](const PairId& p) {
    for (const auto& e : config.exclude)
      if (e == p.model_id || e == p.device_id || e == p.str()) return true;
    return false;
  };

  // Raw metric maps of the pairs that survive.
  std::vector<std::pair<PairId, std::map<std::string, double>>> kept;
  for (const auto& pm : pairs) {
    if (excluded_by_config(pm.pair)) {
      build.excluded.push_back({pm.pair, "excluded by configuration"});
      continue;
    }
    auto values = pm.values;
    if (auto it = quality_by_model.find(pm.pair.model_id); it != quality_by_model.end()) {
      const auto q = quality_metric_vector(*it->second);
      for (std::size_t i = 0; i < kQualityMetricNames.size(); ++i)
        values[kQualityMetricNames[i]] = q(static_cast<Eigen::Index>(i));
    }
    std::string missing;
    for (const auto& o : config.objectives)
      for (const auto& m : o.metrics) {
        auto it = values.find(m.metric);
        if ((it == values.end() || !std::isfinite(it->second)) && missing.empty()) missing = m.metric;
      }
    if (!missing.empty()) {
      build.excluded.push_back({pm.pair, "missing metric '" + missing + "'"});
      continue;
    }
    kept.emplace_back(pm.pair, std::move(values));
  }

  const auto n = static_cast<Eigen::Index>(kept.size());
  Eigen::MatrixXd scores(n, static_cast<Eigen::Index>(config.objectives.size()));
  for (std::size_t o = 0; o < config.objectives.size(); ++o) {
    const auto& cfg = config.objectives[o];
    Eigen::MatrixXd normalized(n, static_cast<Eigen::Index>(cfg.metrics.size()));
    for (std::size_t m = 0; m < cfg.metrics.size(); ++m) {
      MetricColumn<double> col{cfg.metrics[m].metric, cfg.metrics[m].orientation, Column<double>(n)};
      for (Eigen::Index i = 0; i < n; ++i) col.values(i) = kept[static_cast<std::size_t>(i)].second.at(col.name);
      bool degenerate = false;
      normalized.col(static_cast<Eigen::Index>(m)) = normalize(col, &degenerate);
      if (degenerate && n > 0)
        build.warnings.push_back("objective '" + cfg.name + "': metric '" + col.name +
                                 "' is constant across pairs; normalized to 0.5");
    }
    scores.col(static_cast<Eigen::Index>(o)) = objective_scores(cfg, normalized);
  }

  for (Eigen::Index i = 0; i < n; ++i)
    build.vectors.push_back({kept[static_cast<std::size_t>(i)].first, scores.row(i).transpose()});
  return build;
}

json pareto_to_json(const ObjectiveBuild& build, const ParetoResult& result) {
  json pairs = json::array();
  json front = json::array();
  for (std::size_t i = 0; i < build.vectors.size(); ++i) {
    const auto& v = build.vectors[i];
    json scores = json::object();
    for (std::size_t o = 0; o < build.objective_names.size(); ++o)
      scores[build.objective_names[o]] = v.scores(static_cast<Eigen::Index>(o));
    json witnesses = json::array();
    if (auto it = result.dominated_by.find(i); it != result.dominated_by.end())
      for (auto w : it->second) witnesses.push_back(build.vectors[w].pair.str());
    const bool on = result.on_front(i);
    if (on) front.push_back(v.pair.str());
    pairs.push_back({{"model_id", v.pair.model_id},
                     {"device_id", v.pair.device_id},
                     {"scores", scores},
                     {"on_front", on},
                     {"dominated_by", witnesses}});
  }
  json excluded = json::array();
  for (const auto& e : build.excluded) excluded.push_back({{"pair", e.pair.str()}, {"reason", e.reason}});
  return {{"schema", "xrbench.pareto"},
          {"version", 1},
          {"objectives", build.objective_names},
          {"pairs", pairs},
          {"front", front},
          {"excluded", excluded},
          {"warnings", build.warnings}};
}

}  // namespace xrbench
