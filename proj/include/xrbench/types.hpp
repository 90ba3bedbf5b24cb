#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <cstdint>
#include <optional>
#include <string>

#include "xrbench/metrics.hpp"

namespace xrbench {

// One row of the model table.
struct ModelSpec {
  std::string id;  // "m1".."m17" style
  std::string name;
  std::string series;
  std::string quantization;
  int layers = 0;
  double params = 0;            // parameter count
  std::uint64_t file_size = 0;  // bytes
  std::string path;             // model file or remote model name, used by adapters
};

enum class TestKind { PromptProcessing, TokenGeneration, BatchTest, ThreadTest, FirstResponse };

const char* to_string(TestKind k);
TestKind test_kind_from_string(const std::string& s);

struct TestCase {
  TestKind kind = TestKind::PromptProcessing;
  int pp_tokens = 0;
  int tg_tokens = 0;
  int batch_size = 512;
  int threads = 4;
  int repetitions = static_cast<int>(kGateSamples);

  // Phase whose throughput this case measures. BT/TT are prompt-processing runs.
  Phase phase() const {
    return kind == TestKind::TokenGeneration ? Phase::TokenGeneration : Phase::PromptProcessing;
  }
  int measured_tokens() const {
    return phase() == Phase::TokenGeneration ? tg_tokens : pp_tokens;
  }
  bool gated() const { return kind != TestKind::FirstResponse; }

  friend bool operator==(const TestCase&, const TestCase&) = default;
};

// Short label such as "pp64", "tg128", "bt64@b256", "tt64@t8", "frt".
std::string label(const TestCase& c);

}  // namespace xrbench
