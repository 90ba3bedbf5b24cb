// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <doctest.h>

#include <random>

#include "support.hpp"
#include "xrbench/analysis.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/objectives.hpp"

using namespace xrbench;

namespace {

std::vector<PairMetrics> fixture_pairs() {
  return metrics_from_json(nlohmann::json::parse(testutil::slurp(XRBENCH_FIXTURES "/pareto_4.json")));
}

std::vector<QualityRecord> fixture_quality() { return load_quality_table(XRBENCH_FIXTURES "/quality_4.jsonl"); }

// Plain min-max, independent of the library.
double norm(double v, double lo, double hi, bool higher) {
  if (hi == lo) return 0.5;
  return higher ? (v - lo) / (hi - lo) : (hi - v) / (hi - lo);
}

RunRecord gated_record(const std::string& m, const std::string& d, TestCase c, std::size_t run,
                       std::vector<double> speeds) {
  RunRecord r;
  r.model_id = m;
  r.device_id = d;
  r.test_case = c;
  r.run_index = run;
  r.gated = gate_speed(speeds);
  r.status = r.gated->consistent() ? RecordStatus::Consistent : RecordStatus::Unstable;
  return r;
}

}  // namespace

TEST_CASE("default objective set") {
  auto set = default_objectives();
  CHECK_NOTHROW(set.validate());
  REQUIRE(set.objectives.size() == 3);
  CHECK(set.objectives[0].name == "quality");
  CHECK(set.objectives[0].metrics.size() == 6);
  CHECK(set.objectives[1].weights()(0) == 0.35);
  CHECK(set.objectives[1].weights()(3) == 0.1);
  CHECK(set.objectives[2].weights()(0) == 0.7);
  CHECK(set.objectives[2].weights()(1) == 0.3);
  auto again = objectives_from_json(objectives_to_json(set));
  CHECK(objectives_to_json(again) == objectives_to_json(set));
}

TEST_CASE("objective config errors") {
  CHECK_THROWS_AS(objectives_from_json({{"objectives", nlohmann::json::array()}}), ValidationError);
  nlohmann::json bad = {{"objectives", {{{"name", "p"}, {"metrics", {{{"metric", "pp_mean"}, {"weight", 0.9}}}}}}}};
  CHECK_THROWS_AS(objectives_from_json(bad), ValidationError);
  bad["objectives"][0]["metrics"][0]["weight"] = 1.0;
  bad["objectives"][0]["metrics"][0]["orientation"] = "sideways";
  CHECK_THROWS_AS(objectives_from_json(bad), ValidationError);
  CHECK_THROWS_AS(objectives_from_json({{"nothing", 1}}), ValidationError);
}

TEST_CASE("scores on the four-pair fixture match a hand computation") {
  auto pairs = fixture_pairs();
  auto build = build_objectives(pairs, fixture_quality(), default_objectives());
  REQUIRE(build.vectors.size() == 4);
  CHECK(build.excluded.empty());
  CHECK(build.objective_names == std::vector<std::string>{"quality", "performance", "stability"});

  auto column = [&](const char* name) {
    std::vector<double> v;
    for (const auto& p : pairs) v.push_back(p.values.at(name));
    return v;
  };
  auto perf = [&](std::size_t i) {
    auto pp = column("pp_mean"), tg = column("tg_mean"), mem = column("memory_bytes"), bat = column("battery_delta");
    auto mm = [](const std::vector<double>& v) { return std::minmax_element(v.begin(), v.end()); };
    auto [pl, ph] = mm(pp);
    auto [tl, th] = mm(tg);
    auto [ml, mh] = mm(mem);
    auto [bl, bh] = mm(bat);
    return 0.35 * norm(pp[i], *pl, *ph, true) + 0.35 * norm(tg[i], *tl, *th, true) +
           0.2 * norm(mem[i], *ml, *mh, false) + 0.1 * norm(bat[i], *bl, *bh, false);
  };
  for (std::size_t i = 0; i < 4; ++i) CHECK(build.vectors[i].scores(1) == doctest::Approx(perf(i)).epsilon(1e-12));

  auto res = pareto_front(build.vectors);
  std::vector<std::vector<double>> pts;
  for (const auto& v : build.vectors) pts.push_back({v.scores(0), v.scores(1), v.scores(2)});
  CHECK(res.front == oracle::pareto_front(pts));
}

TEST_CASE("exclusions and missing metrics") {
  auto pairs = fixture_pairs();
  auto set = default_objectives();
  set.exclude = {"m2", "m11@mq3"};
  auto build = build_objectives(pairs, fixture_quality(), set);
  CHECK(build.vectors.size() == 2);
  CHECK(build.excluded.size() == 2);

  set.exclude = {"avp"};
  CHECK(build_objectives(pairs, fixture_quality(), set).vectors.size() == 2);

  auto no_quality = build_objectives(pairs, {}, default_objectives());
  CHECK(no_quality.vectors.empty());
  REQUIRE(no_quality.excluded.size() == 4);
  CHECK(no_quality.excluded[0].reason == "missing metric 'hellaswag'");
}

TEST_CASE("constant metric warns and scores one half") {
  auto pairs = fixture_pairs();
  for (auto& p : pairs) p.values["error_count"] = 0;
  auto build = build_objectives(pairs, fixture_quality(), default_objectives());
  REQUIRE(build.warnings.size() == 1);
  CHECK(build.warnings[0].find("error_count") != std::string::npos);
}

TEST_CASE("affine changes to a raw column leave scores and front unchanged") {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.0, 100.0), a_dist(0.001, 1000.0);
  const auto quality = fixture_quality();
  for (int trial = 0; trial < 50; ++trial) {
    auto pairs = fixture_pairs();
    for (auto& p : pairs)
      for (auto& [k, v] : p.values) v = u(rng);
    const std::vector<std::string> names = {"pp_mean", "tg_mean", "memory_bytes", "battery_delta", "cv_mean", "error_count"};
    const auto& target = names[rng() % names.size()];
    const double a = a_dist(rng), b = u(rng) - 50.0;
    auto moved = pairs;
    for (auto& p : moved) p.values[target] = a * p.values[target] + b;

    auto x = build_objectives(pairs, quality, default_objectives());
    auto y = build_objectives(moved, quality, default_objectives());
    for (std::size_t i = 0; i < x.vectors.size(); ++i)
      CHECK((x.vectors[i].scores - y.vectors[i].scores).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(pareto_front(x.vectors).front == pareto_front(y.vectors).front);
  }
}

TEST_CASE("analyze derives per-pair metrics from records") {
  StoreSnapshot s;
  const TestCase pp64{TestKind::PromptProcessing, 64, 0}, pp128{TestKind::PromptProcessing, 128, 0};
  const TestCase tg64{TestKind::TokenGeneration, 0, 64};
  s.runs.push_back(gated_record("m1", "d1", pp64, 0, {10, 10, 10, 10, 10}));
  s.runs.push_back(gated_record("m1", "d1", pp64, 1, {20, 20, 20, 20, 20}));
  s.runs.push_back(gated_record("m1", "d1", pp64, 2, {5, 50, 5, 50, 5}));  // unstable
  s.runs.push_back(gated_record("m1", "d1", pp128, 0, {9, 9, 9, 9, 9}));
  s.runs.push_back(gated_record("m1", "d1", tg64, 0, {4, 4, 4, 4, 4}));
  s.runs.push_back(gated_record("m1", "d1", tg64, 1, {6, 6, 6, 6, 6}));
  RunRecord crash;
  crash.model_id = "m1";
  crash.device_id = "d1";
  crash.test_case = tg64;
  crash.run_index = 2;
  crash.status = RecordStatus::Crash;
  s.runs.push_back(crash);
  RunRecord bt = gated_record("m1", "d1", TestCase{TestKind::BatchTest, 64, 0, 256}, 0, {8, 8, 8, 8, 8});
  bt.memory_peak = 3000;
  s.runs.push_back(bt);
  bt.test_case.batch_size = 512;
  bt.memory_peak = 5000;
  s.runs.push_back(bt);
  s.battery.push_back({"m1", "d1", 0, {100, 97, 600, 3, true}, 0, 0});
  s.battery.push_back({"m1", "d1", 1, {97, 98, 600, -1, false}, 0, 0});

  auto pairs = analyze(s);
  REQUIRE(pairs.size() == 1);
  const auto& v = pairs[0].values;
  CHECK(v.at("pp_mean") == doctest::Approx((15.0 + 9.0) / 2));
  CHECK(v.at("tg_mean") == doctest::Approx(5.0));
  CHECK(v.at("cv_pp") == doctest::Approx(5.0 / 15.0));
  CHECK(v.at("cv_tg") == doctest::Approx(1.0 / 5.0));
  CHECK(v.at("cv_mean") == doctest::Approx((5.0 / 15.0 + 0.2) / 2));
  CHECK(v.at("error_count") == 2);
  CHECK(v.at("memory_bytes") == 4000);
  CHECK(v.at("battery_delta") == 3);
  CHECK(pairs[0].consistency.at("pp").error_count == 1);
  CHECK(pairs[0].consistency.at("tg").error_count == 1);
  CHECK(pairs[0].consistency.at("pp").sorted_means == std::vector<double>{10, 20});

  auto back = metrics_from_json(metrics_to_json(pairs));
  CHECK(metrics_to_json(back) == metrics_to_json(pairs));
  CHECK(analyze(StoreSnapshot{}).empty());
  CHECK_THROWS_AS(metrics_from_json({{"schema", "xrbench.pareto"}}), ValidationError);
}
