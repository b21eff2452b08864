// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#include "celab/cli.hpp"

int main(int argc, char** argv) { return celab::cli_main(argc, argv); }
