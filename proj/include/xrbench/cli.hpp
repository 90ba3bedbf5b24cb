#pragma once

// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

namespace xrbench {

// Exit codes: 0 success, 1 validation or usage failure, 2 runtime error.
int run_cli(int argc, char** argv);

}  // namespace xrbench
