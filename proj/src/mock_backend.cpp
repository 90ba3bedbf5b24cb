// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <algorithm>
#include <cmath>
#include <random>

#include "xrbench/backend.hpp"
#include "xrbench/bench_output.hpp"
#include "xrbench/errors.hpp"

namespace xrbench {

namespace {

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::mt19937_64 run_rng(std::uint64_t seed, const std::string& model_id, const ExecutionContext& ctx,
                        std::uint64_t salt) {
  const auto m = fnv1a(model_id);
  const auto d = fnv1a(ctx.device_id);
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(m), static_cast<std::uint32_t>(m >> 32),
                    static_cast<std::uint32_t>(d), static_cast<std::uint32_t>(d >> 32),
                    static_cast<std::uint32_t>(ctx.case_index),
                    static_cast<std::uint32_t>(ctx.run_index),
                    static_cast<std::uint32_t>(ctx.attempt), static_cast<std::uint32_t>(salt)};
  return std::mt19937_64(seq);
}

// Unimodal in log2(threads), peak at 6 threads.
double thread_factor(int threads) {
  const double x = (std::log2(static_cast<double>(std::max(threads, 1))) - std::log2(6.0)) / 1.2;
  return std::exp(-0.5 * x * x);
}

}  // namespace

double MockBackend::base_rate(const ModelSpec& model, const TestCase& c) const {
  const double params_b = std::max(model.params / 1e9, 0.1);
  const bool tg = c.phase() == Phase::TokenGeneration;
  const auto& overrides = tg ? config_.tg_rate : config_.pp_rate;
  double rate;
  if (auto it = overrides.find(model.id); it != overrides.end())
    rate = it->second;
  else
    rate = tg ? 20.0 / params_b : 120.0 / params_b;

  const double length = static_cast<double>(std::max(c.measured_tokens(), 1));
  rate *= 1.0 / (1.0 + length / 2048.0);
  rate *= 1.0 / (1.0 + static_cast<double>(c.batch_size) / 4096.0);
  rate *= thread_factor(c.threads);
  return rate * config_.speed_factor;
}

std::uint64_t MockBackend::memory_for(const ModelSpec& model, const TestCase& c) const {
  const double kv = static_cast<double>(c.batch_size) * 1024.0 * 1024.0 *
                    static_cast<double>(std::max(model.layers, 1)) / 24.0;
  return static_cast<std::uint64_t>(static_cast<double>(model.file_size) * 1.05 + kv);
}

const MockInjection* MockBackend::match(const ModelSpec& model, const TestCase& c,
                                        const ExecutionContext& ctx) const {
  for (const auto& inj : config_.injections) {
    if (inj.model_id && *inj.model_id != model.id) continue;
    if (inj.device_id && *inj.device_id != ctx.device_id) continue;
    if (inj.kind && *inj.kind != c.kind) continue;
    if (inj.pp_tokens && *inj.pp_tokens != c.pp_tokens) continue;
    if (inj.tg_tokens && *inj.tg_tokens != c.tg_tokens) continue;
    if (inj.run_index && *inj.run_index != ctx.run_index) continue;
    if (inj.attempt && *inj.attempt != ctx.attempt) continue;
    return &inj;
  }
  return nullptr;
}

std::vector<double> MockBackend::run_speeds(const ModelSpec& model, const TestCase& c,
                                            const ExecutionContext& ctx) const {
  const double rate = base_rate(model, c);
  std::vector<double> speeds(kGateSamples);
  const MockInjection* inj = match(model, c, ctx);

  if (inj && inj->effect == MockInjection::Effect::Cv) {
    // Standardize the noise so the set has exactly the requested cv.
    for (std::uint64_t salt = 1;; ++salt) {
      auto rng = run_rng(config_.seed, model.id, ctx, salt);
      std::normal_distribution<double> normal(0.0, 1.0);
      Eigen::Matrix<double, kGateSamples, 1> z;
      for (auto& v : z) v = normal(rng);
      auto [mean, sd] = population_moments(z);
      if (sd < 1e-6) continue;
      z = (z.array() - mean) / sd;
      if ((1.0 + inj->cv * z.array()).minCoeff() <= 0.01) continue;
      for (std::size_t i = 0; i < kGateSamples; ++i)
        speeds[i] = rate * (1.0 + inj->cv * z(static_cast<Eigen::Index>(i)));
      // Rounding can land a boundary cv one ulp on the wrong side of the gate;
      // check the speeds as they will be recovered from L / t.
      const double tokens = c.measured_tokens();
      std::vector<double> recovered(speeds);
      for (auto& s : recovered) s = tokens / (tokens / s);
      if (gate_speed(recovered).status != classify_cv(inj->cv)) continue;
      return speeds;
    }
  }

  auto rng = run_rng(config_.seed, model.id, ctx, 0);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (auto& s : speeds) s = rate * std::max(0.05, 1.0 + config_.noise_cv * normal(rng));
  return speeds;
}

BackendResult MockBackend::execute(const ModelSpec& model, const TestCase& c,
                                   const ExecutionContext& ctx) {
  if (!c.gated()) throw PreconditionError("first-response cases go through measure_first_response");
  BackendResult result;
  const MockInjection* inj = match(model, c, ctx);
  if (inj && inj->effect == MockInjection::Effect::Crash) {
    result.exit_status = ExitStatus::Crash;
    result.raw_output = "mock: injected crash\n";
    return result;
  }
  if (inj && inj->effect == MockInjection::Effect::Hang) {
    result.exit_status = ExitStatus::Timeout;
    result.raw_output = "mock: no output within " + std::to_string(ctx.timeout) + " s\n";
    return result;
  }
  if (inj && ctx.repetition == 0 && classify_cv(inj->cv) == RunStatus::Unstable) ++injected_unstable_;

  const auto speeds = run_speeds(model, c, ctx);
  const double speed = speeds.at(ctx.repetition % kGateSamples);
  const int tokens = c.measured_tokens();
  TimingSample<double> sample{tokens, static_cast<double>(tokens) / speed, c.phase()};
  result.timing = sample;
  result.raw_output = render_bench_output(std::span<const TimingSample<double>>(&sample, 1), model.id);
  result.memory_peak = memory_for(model, c);
  return result;
}

FirstResponseTiming MockBackend::measure_first_response(const ModelSpec& model, const std::string&,
                                                        FirstResponseMode mode,
                                                        const ExecutionContext&) {
  if (mode == FirstResponseMode::Cold) {
    loaded_[model.id] = true;
    return {config_.load_time, config_.first_token_latency, FirstResponseMode::Cold};
  }
  if (!loaded_[model.id])
    throw PreconditionError("warm first-response probe for '" + model.id +
                            "' needs a prior cold probe in the same session");
  return {0.0, config_.first_token_latency, FirstResponseMode::Warm};
}

}  // namespace xrbench
