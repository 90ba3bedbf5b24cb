#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

/**
 * @file backend.hpp
 * @brief Uniform execution contract for inference engines.
 *
 * A backend runs one repetition of a test case and returns the raw engine
 * output together with the parsed timing. Gating and statistics are not done
 * here. Three adapters exist: a local subprocess (bench binary driven by a
 * command template), an OpenAI-compatible streaming HTTP endpoint, and a
 * deterministic mock used by tests and dry runs.
 *
 * A physical backend measures one thing at a time; callers go through a
 * BackendHandle and hold a BackendLease for the duration of a measurement.
 */

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "xrbench/metrics.hpp"
#include "xrbench/types.hpp"

namespace xrbench {

enum class ExitStatus { Ok, Crash, Timeout, ParseFailure };

const char* to_string(ExitStatus s);

struct BackendResult {
  std::optional<TimingSample<double>> timing;  // present iff exit_status == Ok
  std::string raw_output;
  ExitStatus exit_status = ExitStatus::Ok;
  std::optional<std::uint64_t> memory_peak;  // bytes, when the adapter can observe the process

  bool ok() const { return exit_status == ExitStatus::Ok; }
};

enum class FirstResponseMode { Cold, Warm };

struct FirstResponseTiming {
  double load_time = 0;            // seconds; 0 in Warm mode
  double first_token_latency = 0;  // seconds
  FirstResponseMode mode = FirstResponseMode::Cold;

  double total() const { return load_time + first_token_latency; }
};

inline constexpr const char* kDefaultProbePrompt = "Give me 20 continuous words as text only";

// Identifies one repetition inside a campaign. The mock derives its noise from it.
struct ExecutionContext {
  std::string device_id;
  std::size_t case_index = 0;
  std::size_t run_index = 0;
  std::size_t attempt = 0;
  std::size_t repetition = 0;
  double timeout = 600.0;  // seconds
};

/// Per-case timeout. 600 s before anything is known about the pair, otherwise
/// ten times the duration predicted from the last consistent speed, at least 120 s.
double case_timeout(std::optional<double> previous_speed, int tokens);

// What a mock injects into a matching 5-sample set.
struct MockInjection {
  std::optional<std::string> model_id;
  std::optional<std::string> device_id;
  std::optional<TestKind> kind;
  std::optional<int> pp_tokens;
  std::optional<int> tg_tokens;
  std::optional<std::size_t> run_index;
  std::optional<std::size_t> attempt;

  enum class Effect { Cv, Crash, Hang } effect = Effect::Cv;
  double cv = 0.5;  // for Effect::Cv: exact coefficient of variation of the five speeds
};

struct MockConfig {
  double noise_cv = 0.05;
  double speed_factor = 1.0;       // device-level multiplier
  double load_time = 2.0;          // seconds
  double first_token_latency = 0.5;
  double battery_drain = 2.5;      // percent per 600 s
  std::map<std::string, double> pp_rate;  // model id -> base t/s at 64 tokens, overrides the size model
  std::map<std::string, double> tg_rate;
  std::vector<MockInjection> injections;
  std::uint64_t seed = 0;
};

enum class BackendType { Mock, Subprocess, Http };

struct BackendConfig {
  BackendType type = BackendType::Mock;
  // Subprocess: shell command with {model_path} {pp} {tg} {batch} {threads} {repetitions}.
  std::string command;
  // Subprocess cold-start command for first-response probes; {model_path} {prompt}.
  std::string first_response_command;
  // Http: base URL such as "http://127.0.0.1:8080"; path of the chat completions route.
  std::string endpoint;
  std::string api_path = "/v1/chat/completions";
  std::string api_key_env = "AIVALUATE_API_KEY";
  double memory_cadence = 0.1;  // seconds between RSS polls
  MockConfig mock;
};

class Backend {
 public:
  virtual ~Backend() = default;

  virtual BackendResult execute(const ModelSpec& model, const TestCase& c,
                                const ExecutionContext& ctx) = 0;

  virtual FirstResponseTiming measure_first_response(const ModelSpec& model,
                                                     const std::string& prompt,
                                                     FirstResponseMode mode,
                                                     const ExecutionContext& ctx) = 0;

  // Mock backends run on a logical clock; cooldowns are not slept.
  virtual bool simulated_time() const { return false; }
};

class BackendLease;

// Owns a backend and serializes measurements on it.
class BackendHandle {
 public:
  explicit BackendHandle(std::unique_ptr<Backend> backend) : backend_(std::move(backend)) {}

  BackendLease lease();
  std::optional<BackendLease> try_lease();
  Backend& unsafe_get() { return *backend_; }

 private:
  friend class BackendLease;
  std::unique_ptr<Backend> backend_;
  std::mutex mutex_;
};

class BackendLease {
 public:
  Backend* operator->() const { return backend_; }
  Backend& operator*() const { return *backend_; }

 private:
  friend class BackendHandle;
  BackendLease(std::unique_lock<std::mutex> lock, Backend* b) : lock_(std::move(lock)), backend_(b) {}
  std::unique_lock<std::mutex> lock_;
  Backend* backend_;
};

std::unique_ptr<Backend> make_backend(const BackendConfig& config);

// Concrete adapters -------------------------------------------------------

class MockBackend : public Backend {
 public:
  explicit MockBackend(MockConfig config) : config_(std::move(config)) {}

  BackendResult execute(const ModelSpec& model, const TestCase& c,
                        const ExecutionContext& ctx) override;
  FirstResponseTiming measure_first_response(const ModelSpec& model, const std::string& prompt,
                                             FirstResponseMode mode,
                                             const ExecutionContext& ctx) override;
  bool simulated_time() const override { return true; }

  // Noise-free throughput the mock would report for this case.
  double base_rate(const ModelSpec& model, const TestCase& c) const;
  // Peak RSS the mock reports for this case.
  std::uint64_t memory_for(const ModelSpec& model, const TestCase& c) const;

  // The five speeds of one gated run, before any repetition is picked out.
  std::vector<double> run_speeds(const ModelSpec& model, const TestCase& c,
                                 const ExecutionContext& ctx) const;

  std::size_t injected_unstable() const { return injected_unstable_; }
  const MockConfig& config() const { return config_; }

 private:
  const MockInjection* match(const ModelSpec& model, const TestCase& c,
                             const ExecutionContext& ctx) const;

  MockConfig config_;
  std::map<std::string, bool> loaded_;
  std::size_t injected_unstable_ = 0;
};

class SubprocessBackend : public Backend {
 public:
  explicit SubprocessBackend(BackendConfig config) : config_(std::move(config)) {}

  BackendResult execute(const ModelSpec& model, const TestCase& c,
                        const ExecutionContext& ctx) override;
  FirstResponseTiming measure_first_response(const ModelSpec& model, const std::string& prompt,
                                             FirstResponseMode mode,
                                             const ExecutionContext& ctx) override;

  // Placeholder substitution; exposed for tests.
  static std::string expand_command(const std::string& tmpl, const ModelSpec& model,
                                    const TestCase& c, const std::string& prompt = {});

 private:
  BackendConfig config_;
};

class HttpBackend : public Backend {
 public:
  explicit HttpBackend(BackendConfig config) : config_(std::move(config)) {}

  BackendResult execute(const ModelSpec& model, const TestCase& c,
                        const ExecutionContext& ctx) override;
  FirstResponseTiming measure_first_response(const ModelSpec& model, const std::string& prompt,
                                             FirstResponseMode mode,
                                             const ExecutionContext& ctx) override;

 private:
  struct StreamTiming {
    double first_token = 0;  // seconds from request start
    double last_token = 0;
    int tokens = 0;
    std::string text;
  };
  StreamTiming stream_chat(const ModelSpec& model, const std::string& prompt, int max_tokens,
                           double timeout);

  BackendConfig config_;
  std::map<std::string, bool> warm_;
};

}  // namespace xrbench
