// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <doctest.h>

#include <algorithm>

#include "support.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/plan.hpp"

using namespace xrbench;
using Kind = ScheduledAction::Kind;

namespace {

ExperimentPlan canonical() { return load_plan(XRBENCH_SOURCE_DIR "/plans/canonical.json"); }

ExperimentPlan tiny() {
  ExperimentPlan p;
  p.models = {{"a", "a", "s1", "Q4", 24, 1e9, 1000}, {"b", "b", "s1", "Q8", 24, 1e9, 2000}};
  p.devices = {{"d1", "d1", "cpu", {}, {}}};
  p.tests = {TestCase{TestKind::PromptProcessing, 64, 0}, TestCase{TestKind::TokenGeneration, 0, 64}};
  p.consistency_runs = 3;
  return p;
}

bool has_violation(const ExperimentPlan& p, const std::string& needle) {
  for (const auto& v : validate_plan(p))
    if (v.find(needle) != std::string::npos) return true;
  return false;
}

double end_of(const ScheduledAction& a) { return a.kind == Kind::Battery ? a.at + a.duration : a.at; }

}  // namespace

TEST_CASE("canonical plan validates") {
  auto p = canonical();
  CHECK(validate_plan(p).empty());
  CHECK(p.models.size() == 17);
  CHECK(p.devices.size() == 4);
  CHECK(p.consistency_runs == 20);
  CHECK(p.intra_model_cooldown == 120);
  CHECK(p.inter_model_cooldown == 600);
}

TEST_CASE("plan violations") {
  auto p = tiny();
  CHECK(validate_plan(p).empty());

  auto dup = p;
  dup.models[1].id = "a";
  CHECK(has_violation(dup, "duplicate model id 'a'"));

  auto reps = p;
  reps.tests[0].repetitions = 3;
  CHECK(has_violation(reps, "exactly 5 repetitions"));

  auto len = p;
  len.tests[0].pp_tokens = 100;
  CHECK(has_violation(len, "not in the string-length sweep"));
  len.custom_sweeps = true;
  CHECK(validate_plan(len).empty());

  auto bt = p;
  bt.tests.push_back(TestCase{TestKind::BatchTest, 128, 0, 256});
  CHECK(has_violation(bt, "pp_tokens = 64"));

  auto neg = p;
  neg.intra_model_cooldown = -1;
  CHECK(has_violation(neg, "intra_model_cooldown"));

  auto bat = p;
  bat.battery_models = std::vector<std::string>{"zz"};
  CHECK(has_violation(bat, "battery model 'zz'"));

  auto sp = p;
  sp.devices[0].backend.type = BackendType::Subprocess;
  CHECK(has_violation(sp, "needs a command"));

  CHECK(has_violation(ExperimentPlan{}, "no models"));
}

TEST_CASE("plan JSON round trip") {
  auto p = canonical();
  auto q = plan_from_json(plan_to_json(p));
  CHECK(plan_to_json(q) == plan_to_json(p));
  CHECK(q.tests == p.tests);
  CHECK_THROWS_AS(plan_from_json(nlohmann::json::array()), ValidationError);
  CHECK_THROWS_AS(plan_from_json({{"tests", {{{"kind", "zz"}}}}}), ValidationError);
}

TEST_CASE("test entries expand over arrays") {
  auto p = canonical();
  std::size_t pp = 0, tg = 0, bt = 0, tt = 0, frt = 0;
  for (const auto& c : p.tests) {
    pp += c.kind == TestKind::PromptProcessing;
    tg += c.kind == TestKind::TokenGeneration;
    bt += c.kind == TestKind::BatchTest;
    tt += c.kind == TestKind::ThreadTest;
    frt += c.kind == TestKind::FirstResponse;
  }
  CHECK(pp == 5);
  CHECK(tg == 5);
  CHECK(bt == 4);
  CHECK(tt == 6);
  CHECK(frt == 1);
}

TEST_CASE("default battery models: smallest and largest of every series") {
  auto ids = battery_model_ids(canonical());
  CHECK(ids == std::vector<std::string>{"m1", "m2", "m5", "m6", "m11", "m12", "m13", "m14", "m17"});
  auto p = tiny();
  p.battery_runs = 0;
  CHECK(battery_model_ids(p).empty());
}

TEST_CASE("canonical schedule spacing") {
  const auto plan = canonical();
  const auto actions = schedule(plan);
  std::size_t runs = 0;
  std::optional<ScheduledAction> prev;
  for (const auto& a : actions) {
    if (a.kind == Kind::Cooldown) continue;
    if (a.kind == Kind::Run) ++runs;
    if (prev && prev->device == a.device) {
      const double gap = a.at - end_of(*prev);
      const bool boundary = prev->model != a.model || (a.kind == Kind::Battery && a.index > 0);
      CHECK(gap == (boundary ? 600.0 : 120.0));
    } else {
      CHECK(a.at == 0.0);
    }
    prev = a;
  }
  CHECK(runs == 4 * 17 * 21 * 20);
}

TEST_CASE("schedule is sequential per device and follows plan order") {
  auto plan = tiny();
  plan.devices.push_back({"d2", "d2", "cpu", {}, {}});
  const auto actions = schedule(plan);
  std::map<std::size_t, double> clock;
  std::vector<std::tuple<std::size_t, std::size_t, std::size_t, std::size_t>> order;
  for (const auto& a : actions) {
    CHECK(a.at >= clock[a.device]);  // nothing overlaps on one device
    clock[a.device] = a.at + a.duration;
    if (a.kind == Kind::Run) order.emplace_back(a.device, a.model, a.test, a.index);
  }
  CHECK(std::is_sorted(order.begin(), order.end()));
  CHECK(order.size() == 2 * 2 * 2 * 3);
}

TEST_CASE("zero cooldowns give a back-to-back schedule") {
  auto plan = tiny();
  plan.intra_model_cooldown = 0;
  plan.inter_model_cooldown = 0;
  plan.battery_runs = 0;
  for (const auto& a : schedule(plan)) {
    CHECK(a.kind == Kind::Run);
    CHECK(a.at == 0.0);
  }
}

TEST_CASE("battery windows follow the model's runs") {
  auto plan = tiny();
  plan.battery_runs = 2;
  plan.battery_models = std::vector<std::string>{"a"};
  const auto actions = schedule(plan);
  std::vector<ScheduledAction> windows;
  for (const auto& a : actions)
    if (a.kind == Kind::Battery) windows.push_back(a);
  REQUIRE(windows.size() == 2);
  CHECK(windows[0].model == 0);
  CHECK(windows[0].duration == 600);
  // 6 runs of model a, 5 intra gaps, then the intra gap before the first window.
  CHECK(windows[0].at == 6 * 120.0);
  CHECK(windows[1].at == windows[0].at + 600 + 600);
}
