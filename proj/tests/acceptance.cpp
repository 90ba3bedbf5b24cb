// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <random>
#include <set>

#include "support.hpp"
#include "xrbench/analysis.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/grader.hpp"
#include "xrbench/objectives.hpp"
#include "xrbench/orchestrator.hpp"

using namespace xrbench;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double v) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome pareto_oracle() {
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::size_t mismatches = 0;
  const auto t0 = Clock::now();
  for (int trial = 0; trial < 500; ++trial) {
    const auto n = static_cast<Eigen::Index>(2 + rng() % 199);
    const auto d = static_cast<Eigen::Index>(2 + rng() % 2);
    // A third of the instances sit on a coarse grid so ties and duplicates occur.
    const int grid = trial % 3 == 0 ? static_cast<int>(2 + rng() % 8) : 0;
    Eigen::MatrixXd pts(n, d);
    std::vector<std::vector<double>> rows(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index k = 0; k < d; ++k) {
        const double v = grid ? std::floor(u(rng) * (grid + 1)) / grid : u(rng);
        pts(i, k) = v;
        rows[static_cast<std::size_t>(i)].push_back(v);
      }
    if (pareto_front(pts).front != oracle::pareto_front(rows)) ++mismatches;
  }
  const double elapsed = seconds_since(t0);
  return {mismatches == 0 && elapsed < 5.0,
          std::to_string(mismatches) + " mismatches in 500 instances, " + fmt("%.3f s", elapsed)};
}

Outcome performance_score() {
  ObjectiveConfig perf{"performance",
                       {{"pp_mean", Orientation::HigherBetter, 0.35},
                        {"tg_mean", Orientation::HigherBetter, 0.35},
                        {"memory_bytes", Orientation::LowerBetter, 0.2},
                        {"battery_delta", Orientation::LowerBetter, 0.1}}};
  const double s = objective_score(perf, Eigen::Vector4d(0.5, 1.0, 0.0, 1.0));
  ObjectiveConfig stability{"stability",
                            {{"cv_mean", Orientation::LowerBetter, 0.7}, {"error_count", Orientation::LowerBetter, 0.3}}};
  bool sum_ok = true;
  try {
    stability.validate();
  } catch (const ValidationError&) {
    sum_ok = false;
  }
  bool sum_enforced = false;
  stability.metrics[1].weight = 0.31;
  try {
    stability.validate();
  } catch (const ValidationError&) {
    sum_enforced = true;
  }
  const bool pass = std::abs(s - 0.625) <= 1e-12 && sum_ok && sum_enforced;
  return {pass, fmt("score %.15f", s) + ", (0.7, 0.3) accepted " + (sum_ok ? "yes" : "no") +
                    ", (0.7, 0.31) rejected " + (sum_enforced ? "yes" : "no")};
}

Outcome perplexity_constant() {
  double worst = 0;
  for (double p : {1.0, 0.5, 0.25, 0.1})
    for (std::size_t n : {1u, 10u, 100u}) {
      const std::vector<double> probs(n, p);
      worst = std::max(worst, std::abs(perplexity(probs) - 1.0 / p));
    }
  return {worst <= 1e-9, fmt("max |ppl - 1/p| = %.3g", worst)};
}

Outcome cv_gate() {
  ModelSpec model{"m1", "qwen", "Qwen", "Q4", 24, 0.5e9, 942000000};
  const TestCase c{TestKind::PromptProcessing, 128, 0};
  std::size_t wrong = 0, checked = 0;
  for (double cv : {0.32, 0.33, 0.34})
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      MockConfig cfg;
      cfg.seed = seed;
      MockInjection inj;
      inj.cv = cv;
      cfg.injections.push_back(inj);
      MockBackend mock(cfg);
      std::vector<double> speeds;
      for (std::size_t rep = 0; rep < kGateSamples; ++rep) {
        ExecutionContext ctx{"dev", 0, seed, 0, rep, 600};
        speeds.push_back(instantaneous_speed(*mock.execute(model, c, ctx).timing));
      }
      const auto g = gate_speed(speeds);
      const auto expected = cv < 0.33 ? RunStatus::Consistent : RunStatus::Unstable;
      wrong += g.status != expected;
      ++checked;
    }
  // Exactly representable boundary set: sd 33 over mean 100.
  const auto exact = gate_speed(std::vector<double>{35.5, 103.5, 116.5, 120.0, 124.5});
  const bool boundary = classify_cv(0.33) == RunStatus::Unstable;
  return {wrong == 0 && boundary && exact.cv == 0.33 && exact.status == RunStatus::Unstable,
          std::to_string(checked - wrong) + "/" + std::to_string(checked) +
              " seeded runs classified as injected (0.32 consistent, 0.33 and 0.34 unstable); exact cv " +
              fmt("%.17g", exact.cv) + " unstable " + (exact.status == RunStatus::Unstable ? "yes" : "no")};
}

Outcome geovis_rows() {
  const double a = geovis_score(40.00, 55.00);
  const double b = geovis_score(54.17, 87.33);
  return {std::abs(a - 52.00) <= 0.01 && std::abs(b - 80.70) <= 0.01, fmt("%.4f", a) + " and " + fmt("%.4f", b)};
}

std::vector<PairMetrics> random_campaign(std::mt19937_64& rng, bool dyadic) {
  std::uniform_int_distribution<int> k(0, 4096);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  const std::size_t n = 2 + rng() % 29;
  std::vector<PairMetrics> pairs;
  for (std::size_t i = 0; i < n; ++i) {
    PairMetrics p;
    p.pair = {"m" + std::to_string(i % 17 + 1), "d" + std::to_string(i / 17)};
    for (const char* name : {"pp_mean", "tg_mean", "memory_bytes", "battery_delta", "cv_mean", "error_count"})
      p.values[name] = dyadic ? k(rng) / 64.0 : u(rng);
    pairs.push_back(std::move(p));
  }
  return pairs;
}

std::vector<QualityRecord> random_quality(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> acc(20, 80), ppl(5, 30);
  std::vector<QualityRecord> out;
  for (int i = 1; i <= 17; ++i)
    out.push_back({"m" + std::to_string(i), acc(rng), acc(rng), acc(rng), acc(rng), acc(rng), ppl(rng)});
  return out;
}

Outcome affine_invariance() {
  std::mt19937_64 rng(90);
  const std::vector<std::string> names = {"pp_mean", "tg_mean", "memory_bytes", "battery_delta", "cv_mean", "error_count"};
  std::size_t bit_failures = 0, tol_failures = 0, front_failures = 0;
  double worst = 0;
  for (int trial = 0; trial < 400; ++trial) {
    const bool dyadic = trial % 2 == 0;
    auto pairs = random_campaign(rng, dyadic);
    const auto quality = random_quality(rng);
    const auto& target = names[rng() % names.size()];
    double a, b;
    if (dyadic) {
      a = std::ldexp(1.0, static_cast<int>(rng() % 21) - 10);
      b = static_cast<double>(static_cast<int>(rng() % 2001) - 1000);
    } else {
      a = std::exp(std::uniform_real_distribution<double>(-4.6, 4.6)(rng));
      b = std::uniform_real_distribution<double>(-100, 100)(rng);
    }
    auto moved = pairs;
    for (auto& p : moved) p.values[target] = a * p.values[target] + b;

    const auto x = build_objectives(pairs, quality, default_objectives());
    const auto y = build_objectives(moved, quality, default_objectives());
    double diff = 0;
    for (std::size_t i = 0; i < x.vectors.size(); ++i)
      diff = std::max(diff, (x.vectors[i].scores - y.vectors[i].scores).cwiseAbs().maxCoeff());
    // Normalized column itself.
    Eigen::VectorXd raw(static_cast<Eigen::Index>(pairs.size())), shifted(raw.size());
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      raw(static_cast<Eigen::Index>(i)) = pairs[i].values.at(target);
      shifted(static_cast<Eigen::Index>(i)) = moved[i].values.at(target);
    }
    for (auto o : {Orientation::HigherBetter, Orientation::LowerBetter})
      diff = std::max(diff, (normalize(raw, o) - normalize(shifted, o)).cwiseAbs().maxCoeff());

    if (dyadic && diff != 0.0) ++bit_failures;
    if (!dyadic) {
      worst = std::max(worst, diff);
      if (diff > 1e-12) ++tol_failures;
    }
    if (pareto_front(x.vectors).front != pareto_front(y.vectors).front) ++front_failures;
  }
  return {bit_failures == 0 && tol_failures == 0 && front_failures == 0,
          "exact-arithmetic maps bit-identical in " + std::to_string(200 - bit_failures) +
              "/200; arbitrary maps max drift " + fmt("%.3g", worst) + " (bound 1e-12); front changed in " +
              std::to_string(front_failures) + "/400"};
}

std::string q(const fs::path& p) { return "'" + p.string() + "'"; }

Outcome cli_determinism() {
  const std::string cli = XRBENCH_CLI;
  const std::string src = XRBENCH_SOURCE_DIR;
  std::vector<std::map<std::string, std::string>> outputs;
  double slowest = 0;
  bool ok = true;
  for (int round = 0; round < 2; ++round) {
    const auto dir = testutil::scratch_dir("accept");
    const auto t0 = Clock::now();
    const std::string quiet = " >/dev/null 2>&1";
    ok = ok && testutil::shell(cli + " run --mock --seed 11 --plan " + src + "/plans/mock_small.json --out " +
                               q(dir / "store.jsonl") + quiet) == 0;
    ok = ok && testutil::shell(cli + " analyze --store " + q(dir / "store.jsonl") + " --out " +
                               q(dir / "metrics.json") + quiet) == 0;
    ok = ok && testutil::shell(cli + " pareto --metrics " + q(dir / "metrics.json") + " --quality " + src +
                               "/data/quality_example.jsonl --out " + q(dir / "pareto.json") + quiet) == 0;
    ok = ok && testutil::shell(cli + " report --inputs " + q(dir / "metrics.json") + " " + q(dir / "pareto.json") +
                               " --format csv --plots " + q(dir / "plots") + " --out " + q(dir / "summary.csv") +
                               quiet) == 0;
    slowest = std::max(slowest, seconds_since(t0));
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
      if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = testutil::slurp(e.path());
    outputs.push_back(std::move(files));
    fs::remove_all(dir);
  }
  const bool same = outputs[0] == outputs[1];
  return {ok && same && slowest < 10.0 && outputs[0].size() > 4,
          std::to_string(outputs[0].size()) + " files, identical " + (same ? "yes" : "no") + ", slowest pipeline " +
              fmt("%.3f s", slowest)};
}

ExperimentPlan conservation_plan(std::mt19937_64& rng) {
  ExperimentPlan p;
  p.models = {{"m2", "gemma-q3", "Vikhr-Gemma", "Q3", 26, 2.61e9, 1360000000},
              {"m8", "phi-q4", "Phi-3.1", "Q4", 20, 3.82e9, 2300000000},
              {"m17", "mistral-iq4", "Mistral-7B", "IQ4", 28, 7.25e9, 3640000000}};
  p.devices = {{"ml2", "Magic Leap 2", "cpu", {}, {}}, {"mq3", "Meta Quest 3", "cpu", {}, {}}};
  for (int len : {64, 256, 1024}) p.tests.push_back(TestCase{TestKind::PromptProcessing, len, 0});
  for (int len : {64, 256}) p.tests.push_back(TestCase{TestKind::TokenGeneration, 0, len});
  p.consistency_runs = 4;
  p.battery_runs = 0;
  p.seed = rng();
  // Consistency is read from the shortest case of each phase (tests 0 and 3).
  // Unstable sets go there; crashes and hangs go on the longer cases.
  for (int i = 0; i < 8; ++i) {
    MockInjection inj;
    inj.model_id = p.models[rng() % 3].id;
    inj.device_id = p.devices[rng() % 2].id;
    const int kind = static_cast<int>(rng() % 4);
    const std::size_t shortest[] = {0, 3}, longer[] = {1, 2, 4};
    const auto& t = p.tests[kind < 2 ? longer[rng() % 3] : shortest[rng() % 2]];
    inj.kind = t.kind;
    if (t.kind == TestKind::PromptProcessing)
      inj.pp_tokens = t.pp_tokens;
    else
      inj.tg_tokens = t.tg_tokens;
    inj.run_index = rng() % 4;
    if (kind == 0) {
      inj.effect = MockInjection::Effect::Crash;
    } else if (kind == 1) {
      inj.effect = MockInjection::Effect::Hang;
      inj.attempt = 0;
    } else {
      inj.cv = std::uniform_real_distribution<double>(0.2, 0.6)(rng);
    }
    p.mock.injections.push_back(inj);
  }
  return p;
}

Outcome conservation() {
  std::mt19937_64 rng(8);
  std::size_t campaigns = 0, balance_failures = 0, count_failures = 0, injected_total = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const auto dir = testutil::scratch_dir("accept");
    const auto plan = conservation_plan(rng);
    std::vector<MockBackend*> mocks;
    RunOptions opts;
    opts.make_backend = [&](const DeviceSpec&, const MockConfig& cfg) {
      auto m = std::make_unique<MockBackend>(cfg);
      mocks.push_back(m.get());
      return m;
    };
    // Every other campaign is interrupted and resumed.
    RunSummary s;
    std::size_t injected = 0;
    if (trial % 2) {
      RunOptions first = opts;
      first.stop_after = 1 + rng() % 100;
      {
        ResultStore store((dir / "s.jsonl").string());
        auto part = run_plan(plan, store, first);
        if (part.completed + part.errors + part.skipped > part.scheduled) ++balance_failures;
      }
      for (auto* m : mocks) injected += m->injected_unstable();
      mocks.clear();
    }
    {
      ResultStore store((dir / "s.jsonl").string());
      s = run_plan(plan, store, opts);
    }
    for (auto* m : mocks) injected += m->injected_unstable();
    if (s.completed + s.errors + s.skipped != s.scheduled || s.interrupted) ++balance_failures;

    std::size_t counted = 0;
    for (const auto& pm : analyze(read_store((dir / "s.jsonl").string())))
      for (const auto& [phase, pc] : pm.consistency) counted += pc.error_count;
    if (counted != injected) ++count_failures;
    injected_total += injected;
    ++campaigns;
    fs::remove_all(dir);
  }
  return {balance_failures == 0 && count_failures == 0 && injected_total > 0,
          std::to_string(campaigns) + " campaigns (half resumed), balance failures " +
              std::to_string(balance_failures) + ", error_count mismatches " + std::to_string(count_failures) +
              ", injected unstable runs " + std::to_string(injected_total)};
}

Outcome canonical_schedule() {
  using Kind = ScheduledAction::Kind;
  const auto plan = load_plan(XRBENCH_SOURCE_DIR "/plans/canonical.json");
  const auto actions = schedule(plan);
  std::size_t intra = 0, inter = 0, bad = 0;
  std::optional<ScheduledAction> prev;
  for (const auto& a : actions) {
    if (a.kind == Kind::Cooldown) continue;
    if (prev && prev->device == a.device) {
      const double end = prev->kind == Kind::Battery ? prev->at + prev->duration : prev->at;
      const double gap = a.at - end;
      const bool boundary = prev->model != a.model || (a.kind == Kind::Battery && a.index > 0);
      if (boundary) {
        ++inter;
        bad += gap != 600.0;
      } else {
        ++intra;
        bad += gap != 120.0;
      }
    }
    prev = a;
  }
  return {bad == 0 && intra > 0 && inter > 0,
          std::to_string(intra) + " same-model gaps of 120 s, " + std::to_string(inter) +
              " model-boundary gaps of 600 s, " + std::to_string(bad) + " off"};
}

Outcome cold_warm() {
  std::size_t configs = 0, bad = 0;
  double worst = 0;
  for (double load : {0.0, 0.25, 1.0, 2.0, 7.5})
    for (double latency : {0.05, 0.5, 1.3}) {
      const auto dir = testutil::scratch_dir("accept");
      ExperimentPlan p;
      p.models = {{"m2", "gemma-q3", "Vikhr-Gemma", "Q3", 26, 2.61e9, 1360000000},
                  {"m17", "mistral-iq4", "Mistral-7B", "IQ4", 28, 7.25e9, 3640000000}};
      p.devices = {{"ml2", "Magic Leap 2", "cpu", {}, {}}};
      p.tests = {TestCase{TestKind::FirstResponse, 0, 0, 512, 4, 1}};
      p.consistency_runs = 3;
      p.battery_runs = 0;
      p.devices[0].backend.mock.load_time = load;
      p.devices[0].backend.mock.first_token_latency = latency;
      {
        ResultStore store((dir / "s.jsonl").string());
        run_plan(p, store);
      }
      for (const auto& r : read_store((dir / "s.jsonl").string()).runs) {
        if (!r.cold || !r.warm) {
          ++bad;
          continue;
        }
        const double gap = r.cold->total() - r.warm->total();
        worst = std::max(worst, std::abs(gap - load));
        bad += r.warm->total() > r.cold->total() || std::abs(gap - load) > 1e-3;
      }
      ++configs;
      fs::remove_all(dir);
    }
  return {bad == 0, std::to_string(configs) + " mock configurations, max |cold - warm - load| = " +
                        fmt("%.3g s", worst) + ", violations " + std::to_string(bad)};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"pareto front equals brute-force oracle", pareto_oracle},
      {"performance score and weight sum check", performance_score},
      {"perplexity of a constant sequence", perplexity_constant},
      {"speed gate on seeded mock cv", cv_gate},
      {"geovis combined score rows", geovis_rows},
      {"affine invariance of normalization, scores and front", affine_invariance},
      {"end-to-end CLI determinism and runtime", cli_determinism},
      {"run conservation and error counts", conservation},
      {"canonical schedule cooldowns", canonical_schedule},
      {"cold and warm first response", cold_warm},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    failures += !o.pass;
    std::cout << (o.pass ? "[PASS] " : "[FAIL] ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (criteria.size() - static_cast<std::size_t>(failures)) << "/" << criteria.size() << " criteria passed"
            << std::endl;
  return failures == 0 ? 0 : 1;
}
