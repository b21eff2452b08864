// Copyright 2026 The celab Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace celab {

/// Exit codes: 0 every non-skipped check passed, 1 some check failed,
/// 2 usage or input errors.
int cli_main(int argc, char** argv);

/// Same, with injectable streams. `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace celab
