// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <chrono>
#include <cstdlib>
#include <sstream>

#include <json.hpp>

#include "xrbench/backend.hpp"
#include "xrbench/errors.hpp"

// After Eigen: resolv.h defines a _res macro that clashes with Eigen internals.
#include <httplib.h>

namespace xrbench {

namespace {

std::string synthetic_prompt(int words) {
  std::string p;
  p.reserve(static_cast<std::size_t>(words) * 6);
  for (int i = 0; i < words; ++i) p += (i ? " hello" : "hello");
  return p;
}

}  // namespace

HttpBackend::StreamTiming HttpBackend::stream_chat(const ModelSpec& model, const std::string& prompt,
                                                   int max_tokens, double timeout) {
  if (config_.endpoint.empty()) throw ValidationError("http backend without an endpoint");
  httplib::Client client(config_.endpoint);
  const auto secs = static_cast<time_t>(timeout);
  const auto usecs = static_cast<time_t>((timeout - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);

  nlohmann::json body = {
      {"model", model.path.empty() ? model.id : model.path},
      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", prompt}}})},
      {"stream", true},
      {"max_tokens", max_tokens},
  };

  httplib::Request req;
  req.method = "POST";
  req.path = config_.api_path;
  req.body = body.dump();
  req.set_header("Content-Type", "application/json");
  req.set_header("Accept", "text/event-stream");
  if (const char* key = std::getenv(config_.api_key_env.c_str()); key && *key)
    req.set_header("Authorization", std::string("Bearer ") + key);

  using clock = std::chrono::steady_clock;
  StreamTiming timing;
  std::string pending;
  bool done = false;
  const auto start = clock::now();

  auto handle_event = [&](const std::string& line) {
    if (line.rfind("data:", 0) != 0) return;
    std::string payload = line.substr(5);
    while (!payload.empty() && payload.front() == ' ') payload.erase(0, 1);
    if (payload == "[DONE]") {
      done = true;
      return;
    }
    auto chunk = nlohmann::json::parse(payload, nullptr, false);
    if (chunk.is_discarded()) return;
    const auto& choices = chunk.value("choices", nlohmann::json::array());
    if (choices.empty()) return;
    const auto& delta = choices[0].value("delta", nlohmann::json::object());
    auto content = delta.value("content", std::string());
    if (content.empty()) return;
    const double now = std::chrono::duration<double>(clock::now() - start).count();
    if (timing.tokens == 0) timing.first_token = now;
    timing.last_token = now;
    ++timing.tokens;
    timing.text += content;
  };

  req.content_receiver = [&](const char* data, std::size_t len, std::uint64_t, std::uint64_t) {
    pending.append(data, len);
    std::size_t nl;
    while ((nl = pending.find('\n')) != std::string::npos) {
      std::string line = pending.substr(0, nl);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      pending.erase(0, nl + 1);
      handle_event(line);
    }
    return !done;
  };

  auto res = client.send(req);
  if (!res) {
    if (res.error() == httplib::Error::Read && timing.tokens == 0)
      throw TimeoutError("no token within " + std::to_string(timeout) + " s");
    if (!done) throw NetworkError("request to " + config_.endpoint + " failed: " + httplib::to_string(res.error()));
  } else if (res->status != 200) {
    throw NetworkError("endpoint returned HTTP " + std::to_string(res->status));
  }
  if (!pending.empty()) handle_event(pending);
  if (timing.tokens == 0) throw TimeoutError("stream ended without a token");
  return timing;
}

BackendResult HttpBackend::execute(const ModelSpec& model, const TestCase& c,
                                   const ExecutionContext& ctx) {
  if (!c.gated()) throw PreconditionError("first-response cases go through measure_first_response");
  BackendResult result;
  try {
    if (c.phase() == Phase::PromptProcessing) {
      auto t = stream_chat(model, synthetic_prompt(c.pp_tokens), 1, ctx.timeout);
      result.raw_output = t.text;
      result.timing = TimingSample<double>{c.pp_tokens, t.first_token, Phase::PromptProcessing};
    } else {
      auto t = stream_chat(model, "Continue counting: 1 2 3", c.tg_tokens, ctx.timeout);
      result.raw_output = t.text;
      // The first token carries the prompt latency; throughput is measured after it.
      const int generated = t.tokens - 1;
      const double elapsed = t.last_token - t.first_token;
      if (generated < 1 || !(elapsed > 0)) {
        result.exit_status = ExitStatus::ParseFailure;
        return result;
      }
      result.timing = TimingSample<double>{generated, elapsed, Phase::TokenGeneration};
    }
  } catch (const TimeoutError& e) {
    result.exit_status = ExitStatus::Timeout;
    result.raw_output = e.what();
  } catch (const NetworkError& e) {
    result.exit_status = ExitStatus::Crash;
    result.raw_output = e.what();
  }
  return result;
}

FirstResponseTiming HttpBackend::measure_first_response(const ModelSpec& model, const std::string& prompt,
                                                        FirstResponseMode mode,
                                                        const ExecutionContext& ctx) {
  if (mode == FirstResponseMode::Warm && !warm_[model.id])
    throw PreconditionError("warm first-response probe for '" + model.id +
                            "' needs a prior cold probe in the same session");
  auto t = stream_chat(model, prompt, 32, ctx.timeout);
  warm_[model.id] = true;
  // Server-side load time is not observable from the client; the cold figure
  // is the full prompt-to-first-token time of the first request.
  return {0.0, t.first_token, mode};
}

}  // namespace xrbench
