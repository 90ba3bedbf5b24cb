// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/plan.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <set>

#include "xrbench/errors.hpp"

namespace xrbench {

using nlohmann::json;

namespace {

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  if (!j.contains(key) || j[key].is_null()) return fallback;
  try {
    return j[key].get<T>();
  } catch (const json::exception&) {
    throw ValidationError(std::string("plan field '") + key + "' has the wrong type");
  }
}

std::vector<int> int_list(const json& j, const char* key, int fallback) {
  if (!j.contains(key) || j[key].is_null()) return {fallback};
  if (j[key].is_array()) {
    std::vector<int> out;
    for (const auto& v : j[key]) {
      if (!v.is_number_integer()) throw ValidationError(std::string("plan field '") + key + "' must hold integers");
      out.push_back(v.get<int>());
    }
    if (out.empty()) throw ValidationError(std::string("plan field '") + key + "' is an empty list");
    return out;
  }
  if (!j[key].is_number_integer()) throw ValidationError(std::string("plan field '") + key + "' must be an integer");
  return {j[key].get<int>()};
}

MockInjection injection_from_json(const json& j) {
  MockInjection inj;
  if (j.contains("model")) inj.model_id = j["model"].get<std::string>();
  if (j.contains("device")) inj.device_id = j["device"].get<std::string>();
  if (j.contains("kind")) inj.kind = test_kind_from_string(j["kind"].get<std::string>());
  if (j.contains("pp_tokens")) inj.pp_tokens = j["pp_tokens"].get<int>();
  if (j.contains("tg_tokens")) inj.tg_tokens = j["tg_tokens"].get<int>();
  if (j.contains("run")) inj.run_index = j["run"].get<std::size_t>();
  if (j.contains("attempt")) inj.attempt = j["attempt"].get<std::size_t>();
  const auto effect = get_or<std::string>(j, "effect", "cv");
  if (effect == "cv")
    inj.effect = MockInjection::Effect::Cv;
  else if (effect == "crash")
    inj.effect = MockInjection::Effect::Crash;
  else if (effect == "hang")
    inj.effect = MockInjection::Effect::Hang;
  else
    throw ValidationError("unknown mock injection effect '" + effect + "'");
  inj.cv = get_or<double>(j, "cv", inj.cv);
  return inj;
}

json injection_to_json(const MockInjection& inj) {
  json j = json::object();
  if (inj.model_id) j["model"] = *inj.model_id;
  if (inj.device_id) j["device"] = *inj.device_id;
  if (inj.kind) j["kind"] = to_string(*inj.kind);
  if (inj.pp_tokens) j["pp_tokens"] = *inj.pp_tokens;
  if (inj.tg_tokens) j["tg_tokens"] = *inj.tg_tokens;
  if (inj.run_index) j["run"] = *inj.run_index;
  if (inj.attempt) j["attempt"] = *inj.attempt;
  j["effect"] = inj.effect == MockInjection::Effect::Cv      ? "cv"
                : inj.effect == MockInjection::Effect::Crash ? "crash"
                                                             : "hang";
  if (inj.effect == MockInjection::Effect::Cv) j["cv"] = inj.cv;
  return j;
}

MockConfig mock_from_json(const json& j) {
  MockConfig m;
  if (j.is_null()) return m;
  m.noise_cv = get_or(j, "noise_cv", m.noise_cv);
  m.speed_factor = get_or(j, "speed_factor", m.speed_factor);
  m.load_time = get_or(j, "load_time", m.load_time);
  m.first_token_latency = get_or(j, "first_token_latency", m.first_token_latency);
  m.battery_drain = get_or(j, "battery_drain", m.battery_drain);
  m.pp_rate = get_or(j, "pp_rate", m.pp_rate);
  m.tg_rate = get_or(j, "tg_rate", m.tg_rate);
  if (j.contains("injections"))
    for (const auto& inj : j["injections"]) m.injections.push_back(injection_from_json(inj));
  return m;
}

json mock_to_json(const MockConfig& m) {
  json inj = json::array();
  for (const auto& i : m.injections) inj.push_back(injection_to_json(i));
  return {{"noise_cv", m.noise_cv},       {"speed_factor", m.speed_factor},
          {"load_time", m.load_time},     {"first_token_latency", m.first_token_latency},
          {"battery_drain", m.battery_drain}, {"pp_rate", m.pp_rate},
          {"tg_rate", m.tg_rate},         {"injections", inj}};
}

BackendConfig backend_from_json(const json& j) {
  BackendConfig b;
  if (j.is_null()) return b;
  const auto type = get_or<std::string>(j, "type", "mock");
  if (type == "mock")
    b.type = BackendType::Mock;
  else if (type == "subprocess")
    b.type = BackendType::Subprocess;
  else if (type == "http")
    b.type = BackendType::Http;
  else
    throw ValidationError("unknown backend type '" + type + "'");
  b.command = get_or(j, "command", b.command);
  b.first_response_command = get_or(j, "first_response_command", b.first_response_command);
  b.endpoint = get_or(j, "endpoint", b.endpoint);
  b.api_path = get_or(j, "api_path", b.api_path);
  b.api_key_env = get_or(j, "api_key_env", b.api_key_env);
  b.memory_cadence = get_or(j, "memory_cadence", b.memory_cadence);
  if (j.contains("mock")) b.mock = mock_from_json(j["mock"]);
  return b;
}

json backend_to_json(const BackendConfig& b) {
  const char* type = b.type == BackendType::Mock ? "mock" : b.type == BackendType::Subprocess ? "subprocess" : "http";
  json j = {{"type", type}};
  if (b.type == BackendType::Subprocess) {
    j["command"] = b.command;
    if (!b.first_response_command.empty()) j["first_response_command"] = b.first_response_command;
  }
  if (b.type == BackendType::Http) {
    j["endpoint"] = b.endpoint;
    j["api_path"] = b.api_path;
    j["api_key_env"] = b.api_key_env;
  }
  if (b.type == BackendType::Mock) j["mock"] = mock_to_json(b.mock);
  j["memory_cadence"] = b.memory_cadence;
  return j;
}

std::vector<TestCase> expand_tests(const json& j) {
  const auto kind = test_kind_from_string(get_or<std::string>(j, "kind", ""));
  const bool bt_tt = kind == TestKind::BatchTest || kind == TestKind::ThreadTest;
  const auto pps = int_list(j, "pp_tokens", bt_tt ? 64 : (kind == TestKind::PromptProcessing ? 64 : 0));
  const auto tgs = int_list(j, "tg_tokens", kind == TestKind::TokenGeneration ? 64 : 0);
  const auto batches = int_list(j, "batch_size", 512);
  const auto threads = int_list(j, "threads", 4);
  const auto reps = int_list(j, "repetitions", static_cast<int>(kGateSamples));
  std::vector<TestCase> out;
  for (int pp : pps)
    for (int tg : tgs)
      for (int b : batches)
        for (int t : threads)
          for (int r : reps) out.push_back(TestCase{kind, pp, tg, b, t, r});
  return out;
}

bool in(const std::vector<int>& set, int v) { return std::find(set.begin(), set.end(), v) != set.end(); }

}  // namespace

ExperimentPlan plan_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("plan must be a JSON object");
  ExperimentPlan p;
  for (const auto& m : j.value("models", json::array())) {
    ModelSpec s;
    s.id = get_or<std::string>(m, "id", "");
    s.name = get_or<std::string>(m, "name", s.id);
    s.series = get_or<std::string>(m, "series", "");
    s.quantization = get_or<std::string>(m, "quantization", "");
    s.layers = get_or(m, "layers", 0);
    s.params = get_or(m, "params", 0.0);
    s.file_size = get_or<std::uint64_t>(m, "file_size", 0);
    s.path = get_or<std::string>(m, "path", "");
    p.models.push_back(std::move(s));
  }
  for (const auto& d : j.value("devices", json::array())) {
    DeviceSpec s;
    s.id = get_or<std::string>(d, "id", "");
    s.name = get_or<std::string>(d, "name", s.id);
    s.compute_tag = get_or<std::string>(d, "compute_tag", "");
    s.backend = backend_from_json(d.value("backend", json()));
    if (d.contains("battery")) {
      const auto& b = d["battery"];
      const auto type = get_or<std::string>(b, "type", "none");
      if (type == "sysfs")
        s.battery.type = BatteryProbeConfig::Type::Sysfs;
      else if (type == "replay")
        s.battery.type = BatteryProbeConfig::Type::Replay;
      else if (type != "none")
        throw ValidationError("unknown battery probe type '" + type + "'");
      s.battery.supply = get_or(b, "supply", s.battery.supply);
      s.battery.path = get_or(b, "path", s.battery.path);
    }
    p.devices.push_back(std::move(s));
  }
  for (const auto& t : j.value("tests", json::array())) {
    auto cases = expand_tests(t);
    p.tests.insert(p.tests.end(), cases.begin(), cases.end());
  }
  p.consistency_runs = get_or(j, "consistency_runs", p.consistency_runs);
  p.intra_model_cooldown = get_or(j, "intra_model_cooldown", p.intra_model_cooldown);
  p.inter_model_cooldown = get_or(j, "inter_model_cooldown", p.inter_model_cooldown);
  p.battery_window = get_or(j, "battery_window", p.battery_window);
  p.battery_runs = get_or(j, "battery_runs", p.battery_runs);
  if (j.contains("battery_models") && !j["battery_models"].is_null())
    p.battery_models = j["battery_models"].get<std::vector<std::string>>();
  p.max_retries = get_or(j, "max_retries", p.max_retries);
  p.seed = get_or<std::uint64_t>(j, "seed", p.seed);
  p.custom_sweeps = get_or(j, "custom_sweeps", p.custom_sweeps);
  p.probe_prompt = get_or(j, "probe_prompt", p.probe_prompt);
  if (j.contains("mock")) p.mock = mock_from_json(j["mock"]);
  return p;
}

json plan_to_json(const ExperimentPlan& p) {
  json models = json::array(), devices = json::array(), tests = json::array();
  for (const auto& m : p.models)
    models.push_back({{"id", m.id}, {"name", m.name}, {"series", m.series},
                      {"quantization", m.quantization}, {"layers", m.layers},
                      {"params", m.params}, {"file_size", m.file_size}, {"path", m.path}});
  for (const auto& d : p.devices) {
    json dj = {{"id", d.id}, {"name", d.name}, {"compute_tag", d.compute_tag},
               {"backend", backend_to_json(d.backend)}};
    if (d.battery.type == BatteryProbeConfig::Type::Sysfs)
      dj["battery"] = {{"type", "sysfs"}, {"supply", d.battery.supply}};
    else if (d.battery.type == BatteryProbeConfig::Type::Replay)
      dj["battery"] = {{"type", "replay"}, {"path", d.battery.path}};
    devices.push_back(std::move(dj));
  }
  for (const auto& t : p.tests)
    tests.push_back({{"kind", to_string(t.kind)}, {"pp_tokens", t.pp_tokens},
                     {"tg_tokens", t.tg_tokens}, {"batch_size", t.batch_size},
                     {"threads", t.threads}, {"repetitions", t.repetitions}});
  json j = {{"schema", "xrbench.plan"},
            {"version", 1},
            {"models", models},
            {"devices", devices},
            {"tests", tests},
            {"consistency_runs", p.consistency_runs},
            {"intra_model_cooldown", p.intra_model_cooldown},
            {"inter_model_cooldown", p.inter_model_cooldown},
            {"battery_window", p.battery_window},
            {"battery_runs", p.battery_runs},
            {"max_retries", p.max_retries},
            {"seed", p.seed},
            {"custom_sweeps", p.custom_sweeps},
            {"probe_prompt", p.probe_prompt},
            {"mock", mock_to_json(p.mock)}};
  if (p.battery_models) j["battery_models"] = *p.battery_models;
  return j;
}

ExperimentPlan load_plan(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open plan " + path);
  auto j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError(path + ": not valid JSON");
  return plan_from_json(j);
}

std::vector<std::string> validate_plan(const ExperimentPlan& plan) {
  std::vector<std::string> v;
  if (plan.models.empty()) v.push_back("plan has no models");
  if (plan.devices.empty()) v.push_back("plan has no devices");
  if (plan.tests.empty()) v.push_back("plan has no tests");

  std::set<std::string> ids;
  for (const auto& m : plan.models) {
    if (m.id.empty()) v.push_back("model with empty id");
    else if (!ids.insert(m.id).second) v.push_back("duplicate model id '" + m.id + "'");
  }
  ids.clear();
  for (const auto& d : plan.devices) {
    if (d.id.empty()) v.push_back("device with empty id");
    else if (!ids.insert(d.id).second) v.push_back("duplicate device id '" + d.id + "'");
    if (d.backend.type == BackendType::Subprocess && d.backend.command.empty())
      v.push_back("device '" + d.id + "': subprocess backend needs a command");
    if (d.backend.type == BackendType::Http && d.backend.endpoint.empty())
      v.push_back("device '" + d.id + "': http backend needs an endpoint");
  }

  if (plan.consistency_runs < 1) v.push_back("consistency_runs must be >= 1");
  if (plan.intra_model_cooldown < 0) v.push_back("intra_model_cooldown must be >= 0");
  if (plan.inter_model_cooldown < 0) v.push_back("inter_model_cooldown must be >= 0");
  if (!(plan.battery_window > 0)) v.push_back("battery_window must be > 0");
  if (plan.battery_runs < 0) v.push_back("battery_runs must be >= 0");
  if (plan.max_retries < 0) v.push_back("max_retries must be >= 0");

  std::set<std::string> model_ids;
  for (const auto& m : plan.models) model_ids.insert(m.id);
  if (plan.battery_models)
    for (const auto& id : *plan.battery_models)
      if (!model_ids.count(id)) v.push_back("battery model '" + id + "' is not in the plan");

  const bool sweeps = !plan.custom_sweeps;
  for (std::size_t i = 0; i < plan.tests.size(); ++i) {
    const auto& c = plan.tests[i];
    const std::string where = "test " + std::to_string(i) + " (" + label(c) + ")";
    if (c.pp_tokens < 0 || c.tg_tokens < 0) v.push_back(where + ": negative token count");
    if (c.batch_size < 1) v.push_back(where + ": batch_size must be >= 1");
    if (c.threads < 1) v.push_back(where + ": threads must be >= 1");
    if (c.repetitions < 1) v.push_back(where + ": repetitions must be >= 1");
    if (c.gated() && c.repetitions != static_cast<int>(kGateSamples))
      v.push_back(where + ": gated cases need exactly " + std::to_string(kGateSamples) + " repetitions");
    switch (c.kind) {
      case TestKind::PromptProcessing:
        if (c.tg_tokens != 0) v.push_back(where + ": pp case must have tg_tokens = 0");
        if (c.pp_tokens < 1) v.push_back(where + ": pp case needs pp_tokens > 0");
        if (sweeps && !in(kStringLengthSweep, c.pp_tokens))
          v.push_back(where + ": pp_tokens " + std::to_string(c.pp_tokens) + " not in the string-length sweep");
        break;
      case TestKind::TokenGeneration:
        if (c.pp_tokens != 0) v.push_back(where + ": tg case must have pp_tokens = 0");
        if (c.tg_tokens < 1) v.push_back(where + ": tg case needs tg_tokens > 0");
        if (sweeps && !in(kStringLengthSweep, c.tg_tokens))
          v.push_back(where + ": tg_tokens " + std::to_string(c.tg_tokens) + " not in the string-length sweep");
        break;
      case TestKind::BatchTest:
        if (c.tg_tokens != 0) v.push_back(where + ": batch test must have tg_tokens = 0");
        if (sweeps && c.pp_tokens != 64) v.push_back(where + ": batch test must have pp_tokens = 64");
        if (sweeps && !in(kBatchSweep, c.batch_size))
          v.push_back(where + ": batch_size " + std::to_string(c.batch_size) + " not in the batch sweep");
        break;
      case TestKind::ThreadTest:
        if (c.tg_tokens != 0) v.push_back(where + ": thread test must have tg_tokens = 0");
        if (sweeps && c.pp_tokens != 64) v.push_back(where + ": thread test must have pp_tokens = 64");
        if (sweeps && !in(kThreadSweep, c.threads))
          v.push_back(where + ": threads " + std::to_string(c.threads) + " not in the thread sweep");
        break;
      case TestKind::FirstResponse:
        break;
    }
  }
  return v;
}

std::vector<std::string> battery_model_ids(const ExperimentPlan& plan) {
  if (plan.battery_runs == 0) return {};
  if (plan.battery_models) return *plan.battery_models;
  std::map<std::string, std::pair<const ModelSpec*, const ModelSpec*>> by_series;
  auto smaller = [](const ModelSpec* a, const ModelSpec* b) {
    return std::tie(a->params, a->file_size) < std::tie(b->params, b->file_size);
  };
  for (const auto& m : plan.models) {
    auto [it, fresh] = by_series.try_emplace(m.series, &m, &m);
    if (fresh) continue;
    if (smaller(&m, it->second.first)) it->second.first = &m;
    if (smaller(it->second.second, &m)) it->second.second = &m;
  }
  std::set<std::string> chosen;
  for (const auto& [series, pair] : by_series) {
    chosen.insert(pair.first->id);
    chosen.insert(pair.second->id);
  }
  std::vector<std::string> out;
  for (const auto& m : plan.models)
    if (chosen.count(m.id)) out.push_back(m.id);
  return out;
}

std::vector<ScheduledAction> schedule(const ExperimentPlan& plan) {
  using Kind = ScheduledAction::Kind;
  const auto battery = battery_model_ids(plan);
  std::vector<ScheduledAction> out;
  for (std::size_t d = 0; d < plan.devices.size(); ++d) {
    double clock = 0;
    bool first_on_device = true;
    for (std::size_t m = 0; m < plan.models.size(); ++m) {
      bool first_of_model = true;
      auto gap = [&](double seconds) {
        if (first_on_device) return;
        const double cool = first_of_model ? plan.inter_model_cooldown : seconds;
        if (cool <= 0) return;
        out.push_back({Kind::Cooldown, d, m, 0, 0, clock, cool});
        clock += cool;
      };
      auto advance = [&] {
        first_on_device = false;
        first_of_model = false;
      };
      for (std::size_t t = 0; t < plan.tests.size(); ++t) {
        for (int r = 0; r < plan.consistency_runs; ++r) {
          gap(plan.intra_model_cooldown);
          out.push_back({Kind::Run, d, m, t, static_cast<std::size_t>(r), clock, 0});
          advance();
        }
      }
      if (std::find(battery.begin(), battery.end(), plan.models[m].id) != battery.end()) {
        for (int w = 0; w < plan.battery_runs; ++w) {
          // Battery windows are separated by the longer break.
          gap(w == 0 ? plan.intra_model_cooldown : plan.inter_model_cooldown);
          out.push_back({Kind::Battery, d, m, 0, static_cast<std::size_t>(w), clock, plan.battery_window});
          clock += plan.battery_window;
          advance();
        }
      }
    }
  }
  return out;
}

}  // namespace xrbench
