// Copyright 2026 The metagraph Authors
// SPDX-License-Identifier: Apache-2.0

#include <iostream>

#include "metagraph/cli/commands.hpp"

int main(int argc, char** argv) {
  return metagraph::cli::run_cli({argv + 1, argv + argc}, {std::cout, std::cerr});
}
