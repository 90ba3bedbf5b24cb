#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "xrbench/metrics.hpp"

namespace xrbench {

// Parses llama-bench style output: the markdown table ("| test | t/s |" with
// rows such as "| pp64 | 19.91 ± 0.40 |") or the jsonl printer (n_prompt,
// n_gen, avg_ts). Speeds become timing samples with elapsed = L / speed.
//
// Throws ParseFailure on empty input, unknown format or a malformed row; the
// exception carries the first offending line.
std::vector<TimingSample<double>> parse_bench_output(std::string_view raw);

// Markdown table in the same shape the parser accepts. Speeds are printed with
// two decimals, so parse(render(x)) reproduces x up to that precision.
std::string render_bench_output(std::span<const TimingSample<double>> samples,
                                std::string_view model_label = "model");

}  // namespace xrbench
