// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 The xrbench Authors

#include "xrbench/cli.hpp"

int main(int argc, char** argv) { return xrbench::run_cli(argc, argv); }
