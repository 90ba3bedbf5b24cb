// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/orchestrator.hpp"

#include <algorithm>
#include <chrono>
#include <map>
#include <tuple>

#include "xrbench/errors.hpp"

namespace xrbench {

namespace {

using SlotKey = std::tuple<std::string, std::string, std::size_t, std::size_t>;

struct SlotState {
  std::size_t attempts = 0;
  bool done = false;
};

RecordStatus status_of(ExitStatus s) {
  switch (s) {
    case ExitStatus::Ok: return RecordStatus::Ok;
    case ExitStatus::Crash: return RecordStatus::Crash;
    case ExitStatus::Timeout: return RecordStatus::Timeout;
    case ExitStatus::ParseFailure: return RecordStatus::ParseFailure;
  }
  return RecordStatus::Crash;
}

std::unique_ptr<BatteryProbe> make_probe(const DeviceSpec& device, const ModelSpec& model,
                                         const Backend& backend) {
  if (backend.simulated_time()) {
    const auto* mock = dynamic_cast<const MockBackend*>(&backend);
    const double drain = mock ? mock->config().battery_drain : 2.5;
    // Larger models drain slightly faster.
    return std::make_unique<DrainBatteryProbe>(100.0, drain * (1.0 + 0.02 * model.params / 1e9));
  }
  switch (device.battery.type) {
    case BatteryProbeConfig::Type::Sysfs: return std::make_unique<SysfsBatteryProbe>(device.battery.supply);
    case BatteryProbeConfig::Type::Replay: return std::make_unique<ReplayBatteryProbe>(device.battery.path);
    case BatteryProbeConfig::Type::None: break;
  }
  return nullptr;
}

}  // namespace

RunSummary run_plan(const ExperimentPlan& plan, ResultStore& store, const RunOptions& options) {
  if (auto violations = validate_plan(plan); !violations.empty())
    throw ValidationError("invalid plan: " + violations.front());

  const std::uint64_t seed = options.seed.value_or(plan.seed);
  const Waiter real_wait = options.wait ? options.wait : sleeping_waiter();

  std::vector<std::unique_ptr<BackendHandle>> handles;
  for (const auto& device : plan.devices) {
    MockConfig mock = device.backend.type == BackendType::Mock ? device.backend.mock : plan.mock;
    if (device.backend.type == BackendType::Mock)
      mock.injections.insert(mock.injections.end(), plan.mock.injections.begin(), plan.mock.injections.end());
    mock.seed = seed;
    std::unique_ptr<Backend> backend;
    if (options.make_backend)
      backend = options.make_backend(device, mock);
    else if (options.force_mock || device.backend.type == BackendType::Mock)
      backend = std::make_unique<MockBackend>(mock);
    else
      backend = make_backend(device.backend);
    handles.push_back(std::make_unique<BackendHandle>(std::move(backend)));
  }

  std::map<SlotKey, SlotState> slots;
  const std::size_t max_attempts = static_cast<std::size_t>(plan.max_retries) + 1;
  for (const auto& r : store.snapshot().runs) {
    auto& s = slots[{r.device_id, r.model_id, r.case_index, r.run_index}];
    s.attempts = std::max(s.attempts, r.attempt + 1);
    if (r.usable()) s.done = true;
  }
  for (auto& [key, s] : slots)
    if (s.attempts >= max_attempts) s.done = true;
  std::map<std::tuple<std::string, std::string, std::size_t>, bool> battery_done;
  for (const auto& b : store.snapshot().battery) battery_done[{b.device_id, b.model_id, b.window_index}] = true;

  std::map<std::tuple<std::string, std::string, Phase>, double> last_speed;
  RunSummary summary;
  std::size_t attempts_written = 0;
  auto budget_left = [&] { return !options.stop_after || attempts_written < *options.stop_after; };

  const auto actions = schedule(plan);
  for (std::size_t i = 0; i < actions.size(); ++i) {
    const auto& a = actions[i];
    const auto& device = plan.devices[a.device];
    const auto& model = plan.models[a.model];
    auto& handle = *handles[a.device];

    switch (a.kind) {
      case ScheduledAction::Kind::Cooldown: {
        // Skip the wait when the next action has nothing left to do.
        if (i + 1 < actions.size()) {
          const auto& next = actions[i + 1];
          const auto& nm = plan.models[next.model];
          const auto& nd = plan.devices[next.device];
          bool pending = true;
          if (next.kind == ScheduledAction::Kind::Run)
            pending = !slots[{nd.id, nm.id, next.test, next.index}].done;
          else if (next.kind == ScheduledAction::Kind::Battery)
            pending = !battery_done[{nd.id, nm.id, next.index}];
          if (!pending) break;
        }
        if (!handle.unsafe_get().simulated_time() && budget_left()) real_wait(a.duration);
        break;
      }

      case ScheduledAction::Kind::Battery: {
        if (battery_done[{device.id, model.id, a.index}]) break;
        if (!budget_left()) {
          summary.interrupted = true;
          break;
        }
        auto lease = handle.lease();
        auto probe = make_probe(device, model, *lease);
        if (!probe) break;
        Waiter wait;
        if (lease->simulated_time()) {
          wait = [](double) {};
        } else {
          // Keep the device busy with generation for the whole window.
          wait = [&](double seconds) {
            const auto end = std::chrono::steady_clock::now() + std::chrono::duration<double>(seconds);
            TestCase load{TestKind::TokenGeneration, 0, 64};
            std::size_t rep = 0;
            while (std::chrono::steady_clock::now() < end) {
              ExecutionContext ctx{device.id, 0, 0, 0, rep++, 600.0};
              lease->execute(model, load, ctx);
            }
          };
        }
        BatteryRecord rec{model.id, device.id, a.index, battery_delta(*probe, a.duration, wait), a.at, seed};
        store.append(rec);
        battery_done[{device.id, model.id, a.index}] = true;
        ++summary.battery_windows;
        break;
      }

      case ScheduledAction::Kind::Run: {
        ++summary.scheduled;
        auto& slot = slots[{device.id, model.id, a.test, a.index}];
        if (slot.done) {
          ++summary.skipped;
          break;
        }
        const auto& tc = plan.tests[a.test];
        auto lease = handle.lease();
        while (!slot.done) {
          if (!budget_left()) {
            summary.interrupted = true;
            break;
          }
          RunRecord rec;
          rec.model_id = model.id;
          rec.device_id = device.id;
          rec.case_index = a.test;
          rec.test_case = tc;
          rec.run_index = a.index;
          rec.attempt = slot.attempts;
          rec.started_at = a.at;
          rec.plan_seed = seed;

          ExecutionContext ctx{device.id, a.test, a.index, slot.attempts, 0, 600.0};
          if (!tc.gated()) {
            try {
              rec.cold = lease->measure_first_response(model, plan.probe_prompt, FirstResponseMode::Cold, ctx);
              try {
                rec.warm = lease->measure_first_response(model, plan.probe_prompt, FirstResponseMode::Warm, ctx);
              } catch (const PreconditionError&) {
                // One-shot adapters have no warm state; only the cold figure exists.
              }
              rec.status = RecordStatus::Ok;
            } catch (const TimeoutError& e) {
              rec.status = RecordStatus::Timeout;
              rec.raw_output.push_back(e.what());
            } catch (const Error& e) {
              rec.status = RecordStatus::Crash;
              rec.raw_output.push_back(e.what());
            }
          } else {
            const auto speed_key = std::make_tuple(device.id, model.id, tc.phase());
            std::optional<double> prev;
            if (auto it = last_speed.find(speed_key); it != last_speed.end()) prev = it->second;
            ctx.timeout = case_timeout(prev, tc.measured_tokens());

            std::vector<double> speeds;
            rec.status = RecordStatus::Consistent;
            for (int rep = 0; rep < tc.repetitions; ++rep) {
              ctx.repetition = static_cast<std::size_t>(rep);
              auto result = lease->execute(model, tc, ctx);
              rec.raw_output.push_back(result.raw_output);
              if (result.memory_peak)
                rec.memory_peak = std::max(rec.memory_peak.value_or(0), *result.memory_peak);
              if (!result.ok()) {
                rec.status = status_of(result.exit_status);
                break;
              }
              speeds.push_back(instantaneous_speed(*result.timing));
            }
            if (rec.status == RecordStatus::Consistent) {
              rec.gated = gate_speed(speeds);
              rec.status = rec.gated->consistent() ? RecordStatus::Consistent : RecordStatus::Unstable;
              if (rec.gated->consistent()) last_speed[speed_key] = rec.gated->mean;
            }
          }

          store.append(rec);
          ++attempts_written;
          ++slot.attempts;
          if (rec.usable()) {
            slot.done = true;
            ++summary.completed;
          } else {
            ++summary.discarded_attempts;
            if (slot.attempts >= max_attempts) {
              slot.done = true;
              ++summary.errors;
            }
          }
        }
        break;
      }
    }
  }
  return summary;
}

std::vector<std::pair<double, double>> sweep_series(const std::vector<RunRecord>& runs,
                                                    const std::string& model_id,
                                                    const std::string& device_id,
                                                    SweepDimension dimension) {
  std::map<double, std::pair<double, std::size_t>> acc;
  for (const auto& r : runs) {
    if (r.model_id != model_id || r.device_id != device_id) continue;
    if (r.status != RecordStatus::Consistent || !r.gated) continue;
    const auto& c = r.test_case;
    double x;
    switch (dimension) {
      case SweepDimension::PromptLength:
        if (c.kind != TestKind::PromptProcessing) continue;
        x = c.pp_tokens;
        break;
      case SweepDimension::GenerationLength:
        if (c.kind != TestKind::TokenGeneration) continue;
        x = c.tg_tokens;
        break;
      case SweepDimension::Batch:
        if (c.kind != TestKind::BatchTest) continue;
        x = c.batch_size;
        break;
      case SweepDimension::Threads:
        if (c.kind != TestKind::ThreadTest) continue;
        x = c.threads;
        break;
    }
    auto& [sum, n] = acc[x];
    sum += r.gated->mean;
    ++n;
  }
  std::vector<std::pair<double, double>> out;
  for (const auto& [x, sn] : acc) out.emplace_back(x, sn.first / static_cast<double>(sn.second));
  return out;
}

}  // namespace xrbench
