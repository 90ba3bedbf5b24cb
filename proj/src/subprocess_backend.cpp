// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <spawn.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <future>
#include <regex>

#include "xrbench/backend.hpp"
#include "xrbench/bench_output.hpp"
#include "xrbench/errors.hpp"
#include "xrbench/samplers.hpp"

extern char** environ;

namespace xrbench {

namespace {

struct ProcessOutcome {
  std::string output;
  int exit_code = -1;
  bool timed_out = false;
  std::optional<double> first_byte;  // seconds after spawn
  std::optional<std::uint64_t> memory_peak;
};

void replace_all(std::string& s, const std::string& from, const std::string& to) {
  for (std::size_t pos = 0; (pos = s.find(from, pos)) != std::string::npos; pos += to.size())
    s.replace(pos, from.size(), to);
}

// Single-quote for /bin/sh.
std::string shell_quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'')
      out += "'\\''";
    else
      out += c;
  }
  return out + "'";
}

ProcessOutcome run_process(const std::string& command, double timeout, double memory_cadence) {
  int fds[2];
  if (pipe(fds) != 0) throw Error("pipe() failed");

  posix_spawn_file_actions_t actions;
  posix_spawn_file_actions_init(&actions);
  posix_spawn_file_actions_adddup2(&actions, fds[1], STDOUT_FILENO);
  posix_spawn_file_actions_addclose(&actions, fds[0]);
  posix_spawn_file_actions_addclose(&actions, fds[1]);
  posix_spawn_file_actions_addopen(&actions, STDERR_FILENO, "/dev/null", O_WRONLY, 0);

  // exec so that the measured pid is the bench process, not the shell. A
  // compound command keeps its shell, and memory then covers the shell's pid only.
  const bool compound = command.find_first_of(";&|\n") != std::string::npos;
  std::string script = compound ? command : "exec " + command;
  const char* argv[] = {"/bin/sh", "-c", script.c_str(), nullptr};
  pid_t pid = 0;
  const int rc = posix_spawn(&pid, "/bin/sh", &actions, nullptr, const_cast<char* const*>(argv), environ);
  posix_spawn_file_actions_destroy(&actions);
  close(fds[1]);
  if (rc != 0) {
    close(fds[0]);
    throw Error("posix_spawn failed for: " + command);
  }

  using clock = std::chrono::steady_clock;
  const auto start = clock::now();
  auto memory = std::async(std::launch::async, [pid, memory_cadence, timeout]() -> std::optional<std::uint64_t> {
    ProcRssSource source(pid);
    try {
      return sample_memory(source, memory_cadence, timeout);
    } catch (const NoSampleError&) {
      return std::nullopt;
    }
  });

  ProcessOutcome out;
  char buf[4096];
  pollfd pfd{fds[0], POLLIN, 0};
  while (true) {
    const double elapsed = std::chrono::duration<double>(clock::now() - start).count();
    if (elapsed > timeout) {
      out.timed_out = true;
      kill(pid, SIGKILL);
      break;
    }
    const int wait_ms = static_cast<int>(std::min(100.0, (timeout - elapsed) * 1000.0)) + 1;
    const int ready = poll(&pfd, 1, wait_ms);
    if (ready < 0 && errno != EINTR) break;
    if (ready <= 0) continue;
    const ssize_t n = read(fds[0], buf, sizeof buf);
    if (n <= 0) break;
    if (!out.first_byte) out.first_byte = std::chrono::duration<double>(clock::now() - start).count();
    out.output.append(buf, static_cast<std::size_t>(n));
  }
  close(fds[0]);

  int status = 0;
  waitpid(pid, &status, 0);
  out.memory_peak = memory.get();
  if (!out.timed_out) out.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : 128 + WTERMSIG(status);
  return out;
}

}  // namespace

std::string SubprocessBackend::expand_command(const std::string& tmpl, const ModelSpec& model,
                                              const TestCase& c, const std::string& prompt) {
  std::string cmd = tmpl;
  replace_all(cmd, "{model_path}", shell_quote(model.path.empty() ? model.id : model.path));
  replace_all(cmd, "{pp}", std::to_string(c.pp_tokens));
  replace_all(cmd, "{tg}", std::to_string(c.tg_tokens));
  replace_all(cmd, "{batch}", std::to_string(c.batch_size));
  replace_all(cmd, "{threads}", std::to_string(c.threads));
  replace_all(cmd, "{repetitions}", std::to_string(c.repetitions));
  replace_all(cmd, "{prompt}", shell_quote(prompt));
  return cmd;
}

BackendResult SubprocessBackend::execute(const ModelSpec& model, const TestCase& c,
                                         const ExecutionContext& ctx) {
  if (config_.command.empty()) throw ValidationError("subprocess backend without a command template");
  auto outcome = run_process(expand_command(config_.command, model, c), ctx.timeout, config_.memory_cadence);

  BackendResult result;
  result.raw_output = std::move(outcome.output);
  result.memory_peak = outcome.memory_peak;
  if (outcome.timed_out) {
    result.exit_status = ExitStatus::Timeout;
    return result;
  }
  if (outcome.exit_code != 0) {
    result.exit_status = ExitStatus::Crash;
    return result;
  }
  try {
    for (const auto& s : parse_bench_output(result.raw_output)) {
      if (s.kind == c.phase() && s.string_length == c.measured_tokens()) {
        result.timing = s;
        return result;
      }
    }
  } catch (const ParseFailure&) {
  }
  result.exit_status = ExitStatus::ParseFailure;
  return result;
}

FirstResponseTiming SubprocessBackend::measure_first_response(const ModelSpec& model,
                                                              const std::string& prompt,
                                                              FirstResponseMode mode,
                                                              const ExecutionContext& ctx) {
  if (mode == FirstResponseMode::Warm)
    throw PreconditionError("one-shot subprocesses keep no loaded model; warm probes need the http adapter");
  if (config_.first_response_command.empty())
    throw ValidationError("subprocess backend without a first_response_command");

  TestCase none;
  auto outcome = run_process(expand_command(config_.first_response_command, model, none, prompt),
                             ctx.timeout, config_.memory_cadence);
  if (outcome.timed_out || !outcome.first_byte) throw TimeoutError("no token within the timeout");

  FirstResponseTiming t;
  t.mode = FirstResponseMode::Cold;
  const double total = *outcome.first_byte;
  static const std::regex load_re(R"(load time\s*=\s*([0-9.]+)\s*ms)");
  std::smatch m;
  if (std::regex_search(outcome.output, m, load_re)) t.load_time = std::min(total, std::stod(m[1]) / 1000.0);
  t.first_token_latency = total - t.load_time;
  return t;
}

}  // namespace xrbench
