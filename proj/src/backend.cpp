// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/backend.hpp"

#include <algorithm>

#include "xrbench/errors.hpp"

namespace xrbench {

const char* to_string(TestKind k) {
  switch (k) {
    case TestKind::PromptProcessing: return "pp";
    case TestKind::TokenGeneration: return "tg";
    case TestKind::BatchTest: return "bt";
    case TestKind::ThreadTest: return "tt";
    case TestKind::FirstResponse: return "frt";
  }
  return "?";
}

TestKind test_kind_from_string(const std::string& s) {
  if (s == "pp") return TestKind::PromptProcessing;
  if (s == "tg") return TestKind::TokenGeneration;
  if (s == "bt") return TestKind::BatchTest;
  if (s == "tt") return TestKind::ThreadTest;
  if (s == "frt") return TestKind::FirstResponse;
  throw ValidationError("unknown test kind '" + s + "'");
}

std::string label(const TestCase& c) {
  switch (c.kind) {
    case TestKind::PromptProcessing: return "pp" + std::to_string(c.pp_tokens);
    case TestKind::TokenGeneration: return "tg" + std::to_string(c.tg_tokens);
    case TestKind::BatchTest:
      return "bt" + std::to_string(c.pp_tokens) + "@b" + std::to_string(c.batch_size);
    case TestKind::ThreadTest:
      return "tt" + std::to_string(c.pp_tokens) + "@t" + std::to_string(c.threads);
    case TestKind::FirstResponse: return "frt";
  }
  return "?";
}

const char* to_string(ExitStatus s) {
  switch (s) {
    case ExitStatus::Ok: return "ok";
    case ExitStatus::Crash: return "crash";
    case ExitStatus::Timeout: return "timeout";
    case ExitStatus::ParseFailure: return "parse_failure";
  }
  return "?";
}

double case_timeout(std::optional<double> previous_speed, int tokens) {
  if (!previous_speed || !(*previous_speed > 0) || tokens <= 0) return 600.0;
  return std::max(120.0, 10.0 * static_cast<double>(tokens) / *previous_speed);
}

BackendLease BackendHandle::lease() {
  return BackendLease(std::unique_lock<std::mutex>(mutex_), backend_.get());
}

std::optional<BackendLease> BackendHandle::try_lease() {
  std::unique_lock<std::mutex> lock(mutex_, std::try_to_lock);
  if (!lock.owns_lock()) return std::nullopt;
  return BackendLease(std::move(lock), backend_.get());
}

std::unique_ptr<Backend> make_backend(const BackendConfig& config) {
  switch (config.type) {
    case BackendType::Mock: return std::make_unique<MockBackend>(config.mock);
    case BackendType::Subprocess: return std::make_unique<SubprocessBackend>(config);
    case BackendType::Http: return std::make_unique<HttpBackend>(config);
  }
  throw ValidationError("unknown backend type");
}

}  // namespace xrbench
