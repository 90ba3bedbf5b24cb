// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/analysis.hpp"

#include <algorithm>
#include <numeric>

#include "xrbench/errors.hpp"
#include "xrbench/orchestrator.hpp"

namespace xrbench {

using nlohmann::json;

namespace {

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

bool same_pair(const RunRecord& r, const PairId& p) {
  return r.model_id == p.model_id && r.device_id == p.device_id;
}

// Consistency of the shortest case of the given kind.
std::optional<PhaseConsistency> phase_consistency(const std::vector<const RunRecord*>& runs, TestKind kind) {
  std::optional<int> shortest;
  for (const auto* r : runs) {
    if (r->test_case.kind != kind) continue;
    const int len = r->test_case.measured_tokens();
    if (!shortest || len < *shortest) shortest = len;
  }
  if (!shortest) return std::nullopt;

  std::vector<GatedSpeed<double>> gated;
  std::size_t failures = 0;  // crash, timeout, parse failure
  for (const auto* r : runs) {
    if (r->test_case.kind != kind || r->test_case.measured_tokens() != *shortest) continue;
    if (r->gated)
      gated.push_back(*r->gated);
    else
      ++failures;
  }
  PhaseConsistency pc;
  pc.runs = gated.size() + failures;
  pc.error_count = failures;
  if (!gated.empty()) {
    auto stats = consistency_stats(gated);
    pc.error_count += stats.error_count;
    pc.summary = stats.summary;
    pc.sorted_means = stats.run_means;
    std::sort(pc.sorted_means.begin(), pc.sorted_means.end());
  }
  return pc;
}

json summary_json(const PhaseConsistency& pc) {
  json j = {{"runs", pc.runs}, {"error_count", pc.error_count}, {"sorted_means", pc.sorted_means}};
  if (pc.summary) {
    j["mu"] = pc.summary->mu;
    j["sigma"] = pc.summary->sigma;
    j["cv"] = pc.summary->cv;
    j["max"] = pc.summary->max_speed;
    j["min"] = pc.summary->min_speed;
  }
  return j;
}

PhaseConsistency summary_from_json(const json& j) {
  PhaseConsistency pc;
  pc.runs = j.at("runs").get<std::size_t>();
  pc.error_count = j.at("error_count").get<std::size_t>();
  pc.sorted_means = j.at("sorted_means").get<std::vector<double>>();
  if (j.contains("mu"))
    pc.summary = SpeedSummary<double>{j.at("mu").get<double>(), j.at("sigma").get<double>(),
                                      j.at("cv").get<double>(), j.at("max").get<double>(),
                                      j.at("min").get<double>()};
  return pc;
}

}  // namespace

std::vector<PairMetrics> analyze(const StoreSnapshot& store) {
  std::vector<PairId> order;
  auto note = [&](const std::string& m, const std::string& d) {
    PairId p{m, d};
    if (std::find(order.begin(), order.end(), p) == order.end()) order.push_back(p);
  };
  for (const auto& r : store.runs) note(r.model_id, r.device_id);
  for (const auto& b : store.battery) note(b.model_id, b.device_id);

  std::vector<PairMetrics> out;
  for (const auto& pair : order) {
    PairMetrics pm;
    pm.pair = pair;
    std::vector<const RunRecord*> runs;
    for (const auto& r : store.runs)
      if (same_pair(r, pair)) runs.push_back(&r);

    const std::pair<const char*, SweepDimension> dims[] = {
        {"pp_length", SweepDimension::PromptLength},
        {"tg_length", SweepDimension::GenerationLength},
        {"batch", SweepDimension::Batch},
        {"threads", SweepDimension::Threads}};
    for (const auto& [name, dim] : dims) {
      auto series = sweep_series(store.runs, pair.model_id, pair.device_id, dim);
      if (!series.empty()) pm.sweeps[name] = std::move(series);
    }
    auto sweep_mean = [&](const char* name) -> std::optional<double> {
      auto it = pm.sweeps.find(name);
      if (it == pm.sweeps.end()) return std::nullopt;
      std::vector<double> ys;
      for (const auto& xy : it->second) ys.push_back(xy.second);
      return mean(ys);
    };
    if (auto v = sweep_mean("pp_length")) pm.values["pp_mean"] = *v;
    if (auto v = sweep_mean("tg_length")) pm.values["tg_mean"] = *v;

    auto pp = phase_consistency(runs, TestKind::PromptProcessing);
    auto tg = phase_consistency(runs, TestKind::TokenGeneration);
    if (pp) {
      if (pp->summary) pm.values["cv_pp"] = pp->summary->cv;
      pm.consistency["pp"] = *pp;
    }
    if (tg) {
      if (tg->summary) pm.values["cv_tg"] = tg->summary->cv;
      pm.consistency["tg"] = *tg;
    }
    if (pm.values.count("cv_pp") && pm.values.count("cv_tg"))
      pm.values["cv_mean"] = 0.5 * (pm.values["cv_pp"] + pm.values["cv_tg"]);

    std::size_t errors = 0;
    bool any_speed_case = false;
    for (const auto* r : runs) {
      if (r->test_case.kind != TestKind::PromptProcessing && r->test_case.kind != TestKind::TokenGeneration)
        continue;
      any_speed_case = true;
      if (r->error()) ++errors;
    }
    if (any_speed_case) pm.values["error_count"] = static_cast<double>(errors);

    std::vector<double> peaks, batch_peaks;
    for (const auto* r : runs) {
      if (!r->usable() || !r->memory_peak) continue;
      peaks.push_back(static_cast<double>(*r->memory_peak));
      if (r->test_case.kind == TestKind::BatchTest) batch_peaks.push_back(static_cast<double>(*r->memory_peak));
    }
    if (!batch_peaks.empty())
      pm.values["memory_bytes"] = mean_of_peaks(batch_peaks);
    else if (!peaks.empty())
      pm.values["memory_bytes"] = mean_of_peaks(peaks);

    std::vector<double> deltas;
    for (const auto& b : store.battery)
      if (b.model_id == pair.model_id && b.device_id == pair.device_id && b.window.valid)
        deltas.push_back(b.window.delta);
    if (!deltas.empty()) pm.values["battery_delta"] = mean(deltas);

    std::vector<double> cold, warm;
    for (const auto* r : runs) {
      if (r->status != RecordStatus::Ok) continue;
      if (r->cold) cold.push_back(r->cold->total());
      if (r->warm) warm.push_back(r->warm->total());
    }
    if (!cold.empty()) pm.values["frt_cold"] = mean(cold);
    if (!warm.empty()) pm.values["frt_warm"] = mean(warm);

    out.push_back(std::move(pm));
  }
  return out;
}

json metrics_to_json(const std::vector<PairMetrics>& pairs) {
  json arr = json::array();
  for (const auto& p : pairs) {
    json consistency = json::object();
    for (const auto& [phase, pc] : p.consistency) consistency[phase] = summary_json(pc);
    json sweeps = json::object();
    for (const auto& [name, series] : p.sweeps) {
      json s = json::array();
      for (const auto& [x, y] : series) s.push_back({x, y});
      sweeps[name] = s;
    }
    arr.push_back({{"model_id", p.pair.model_id},
                   {"device_id", p.pair.device_id},
                   {"metrics", p.values},
                   {"consistency", consistency},
                   {"sweeps", sweeps}});
  }
  return {{"schema", "xrbench.metrics"}, {"version", 1}, {"pairs", arr}};
}

std::vector<PairMetrics> metrics_from_json(const json& j) {
  if (!j.is_object() || j.value("schema", "") != "xrbench.metrics")
    throw ValidationError("metrics file: field 'schema' must be \"xrbench.metrics\"");
  if (!j.contains("pairs") || !j["pairs"].is_array())
    throw ValidationError("metrics file: field 'pairs' missing or not an array");
  std::vector<PairMetrics> out;
  for (const auto& pj : j["pairs"]) {
    PairMetrics p;
    try {
      p.pair = {pj.at("model_id").get<std::string>(), pj.at("device_id").get<std::string>()};
      p.values = pj.at("metrics").get<std::map<std::string, double>>();
      const json consistency = pj.value("consistency", json::object());
      for (const auto& [phase, cj] : consistency.items()) p.consistency[phase] = summary_from_json(cj);
      const json sweeps = pj.value("sweeps", json::object());
      for (const auto& [name, sj] : sweeps.items()) {
        auto& series = p.sweeps[name];
        for (const auto& xy : sj) series.emplace_back(xy.at(0).get<double>(), xy.at(1).get<double>());
      }
    } catch (const json::exception& e) {
      throw ValidationError(std::string("metrics file: malformed pair entry: ") + e.what());
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace xrbench
